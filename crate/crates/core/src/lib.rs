//! Classical finite generalized quadrangles and randomized constructions of
//! maximal partial ovoids in them.
//!
//! - [`gf`]: GF(p^k) arithmetic with Frobenius conjugation.
//! - [`projective`]: canonical points and lines of PG(n, q).
//! - [`geometry`]: indexed quadrangles with bit-parallel collinearity, perps,
//!   axiom and local-sparsity checks, and point-line duality.
//! - [`classical`]: Q-(5,q), W(q), Q(4,q), H(3,q^2), H(4,q^2) and the
//!   Q-(3,q) section of Q-(5,q).
//! - [`ovoid`]: partial ovoid verifiers, the two-round randomized
//!   construction, greedy baselines, and first-round diagnostics.
//! - [`experiment`]: seeded Monte-Carlo harness with CSV output.
//! - [`gqi`]: the GQI v1 interchange format.

pub mod bits;
pub mod classical;
pub mod exec;
pub mod experiment;
pub mod geometry;
pub mod gf;
pub mod gqi;
pub mod ovoid;
pub mod projective;
pub mod rng;

pub use bits::PointSet;
pub use classical::Family;
pub use exec::Execution;
pub use geometry::{Backend, PairCheck, Quadrangle, SparsityMode};
pub use gf::Field;
pub use ovoid::{PartialOvoid, RunParams, RunResult};
