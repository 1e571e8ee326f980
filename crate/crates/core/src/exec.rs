//! Sequential or data-parallel evaluation of independent jobs.
//!
//! Results always come back in job order, so output never depends on the
//! thread schedule. Without the `parallel` feature, [`Execution::Parallel`]
//! runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn map<R, F>(self, jobs: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..jobs).into_par_iter().map(f).collect(),
            _ => (0..jobs).map(f).collect(),
        }
    }

    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let seq = Execution::Sequential.map(1000, |i| i * i);
        let par = Execution::Parallel.map(1000, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 999 * 999);
    }
}
