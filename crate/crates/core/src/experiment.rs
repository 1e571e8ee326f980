//! Seeded Monte-Carlo trials of the two-round construction against the
//! random greedy baseline, with CSV output.
//!
//! Trial `i` uses seed `mix(master_seed, i)` for both algorithms and every
//! geometry. Records come back sorted by (geometry position, algorithm,
//! trial), so the output is identical for sequential and parallel runs apart
//! from the `runtime_ms` column.

use std::fmt;
use std::io::{self, Write};
use std::time::Instant;

use crate::classical::Family;
use crate::exec::Execution;
use crate::geometry::Quadrangle;
use crate::ovoid::{self, counting_lower_bound, ebert_hirschfeld_bound, BasePoint, OnFailure, OvoidError, RunParams};
use crate::rng;

pub const CSV_HEADER: [&str; 18] = [
    "geometry",
    "q",
    "s",
    "t",
    "algorithm",
    "trial",
    "seed",
    "alpha",
    "ps",
    "size_S",
    "size_T",
    "final_size",
    "maximal",
    "completion_path",
    "restarts",
    "runtime_ms",
    "counting_bound",
    "eh_bound",
];

/// Column holding wall-clock time, the only non-deterministic field.
pub const RUNTIME_COLUMN: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    TwoRound,
    Greedy,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::TwoRound => "two-round",
            Algorithm::Greedy => "greedy",
        })
    }
}

/// A geometry entered into an experiment.
#[derive(Debug, Clone)]
pub struct ExperimentGeometry {
    pub quadrangle: Quadrangle,
    pub q: Option<u32>,
    pub family: Option<Family>,
}

impl ExperimentGeometry {
    pub fn classical(family: Family, q: u32) -> Result<Self, crate::classical::ClassicalError> {
        Ok(ExperimentGeometry {
            quadrangle: family.build(q)?,
            q: Some(q),
            family: Some(family),
        })
    }

    fn eh_bound(&self) -> Option<u64> {
        match (self.family, self.q) {
            (Some(Family::EllipticQ5), Some(q)) => Some(ebert_hirschfeld_bound(q as u64)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub master_seed: u64,
    pub alpha: f64,
    pub p_override: Option<f64>,
    pub max_restarts: u32,
    pub on_failure: OnFailure,
    pub include_greedy: bool,
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            trials: 10,
            master_seed: 0,
            alpha: 4.1,
            p_override: None,
            max_restarts: 3,
            on_failure: OnFailure::GreedyComplete,
            include_greedy: true,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub geometry: String,
    pub geometry_index: usize,
    pub q: Option<u32>,
    pub s: usize,
    pub t: usize,
    pub algorithm: Algorithm,
    pub trial: usize,
    pub seed: u64,
    pub alpha: f64,
    pub ps: Option<f64>,
    pub size_s: Option<usize>,
    pub size_t: Option<usize>,
    pub final_size: usize,
    pub maximal: bool,
    pub completion_path: String,
    pub restarts: u32,
    pub runtime_ms: f64,
    pub counting_bound: u64,
    pub eh_bound: Option<u64>,
}

impl ExperimentRecord {
    pub fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            self.geometry.clone(),
            opt(self.q.map(|q| q.to_string())),
            self.s.to_string(),
            self.t.to_string(),
            self.algorithm.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
            self.alpha.to_string(),
            opt(self.ps.map(|p| format!("{p:.6}"))),
            opt(self.size_s.map(|v| v.to_string())),
            opt(self.size_t.map(|v| v.to_string())),
            self.final_size.to_string(),
            self.maximal.to_string(),
            self.completion_path.clone(),
            self.restarts.to_string(),
            format!("{:.3}", self.runtime_ms),
            self.counting_bound.to_string(),
            opt(self.eh_bound.map(|v| v.to_string())),
        ]
    }
}

fn trial_records(
    geom: &ExperimentGeometry,
    index: usize,
    trial: usize,
    cfg: &ExperimentConfig,
) -> Vec<ExperimentRecord> {
    let gq = &geom.quadrangle;
    let seed = rng::mix(cfg.master_seed, trial as u64);
    let base = ExperimentRecord {
        geometry: gq.label().to_string(),
        geometry_index: index,
        q: geom.q,
        s: gq.s(),
        t: gq.t(),
        algorithm: Algorithm::TwoRound,
        trial,
        seed,
        alpha: cfg.alpha,
        ps: None,
        size_s: None,
        size_t: None,
        final_size: 0,
        maximal: false,
        completion_path: String::new(),
        restarts: 0,
        runtime_ms: 0.0,
        counting_bound: counting_lower_bound(gq.s() as u64, gq.t() as u64),
        eh_bound: geom.eh_bound(),
    };

    let params = RunParams {
        alpha: cfg.alpha,
        seed,
        x: BasePoint::Random,
        p_override: cfg.p_override,
        max_restarts: cfg.max_restarts,
        on_failure: cfg.on_failure,
    };
    let start = Instant::now();
    let run = match ovoid::two_round(gq, &params) {
        Ok(r) => r,
        Err(OvoidError::RunFailed(r)) => *r,
        Err(e) => panic!("experiment parameters were validated: {e}"),
    };
    let elapsed = start.elapsed();
    let mut out = vec![ExperimentRecord {
        ps: Some(run.probability.ps),
        size_s: Some(run.s_set.len()),
        size_t: Some(run.t_set.len()),
        final_size: run.final_ovoid.len(),
        maximal: run.final_ovoid.is_maximal(),
        completion_path: run.completion_path.to_string(),
        restarts: run.restarts_used,
        runtime_ms: elapsed.as_secs_f64() * 1e3,
        ..base.clone()
    }];

    if cfg.include_greedy {
        let start = Instant::now();
        let g = ovoid::greedy_random(gq, seed);
        out.push(ExperimentRecord {
            algorithm: Algorithm::Greedy,
            final_size: g.len(),
            maximal: g.is_maximal(),
            completion_path: "greedy".into(),
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            ..base
        });
    }
    out
}

/// Runs every trial on every geometry.
pub fn run_experiment(
    geometries: &[ExperimentGeometry],
    cfg: &ExperimentConfig,
) -> Result<Vec<ExperimentRecord>, OvoidError> {
    let probe = RunParams {
        alpha: cfg.alpha,
        p_override: cfg.p_override,
        ..Default::default()
    };
    probe.validate()?;
    for g in geometries {
        if g.quadrangle.s() <= 1 {
            return Err(OvoidError::UndefinedLog(g.quadrangle.s()));
        }
    }
    let n = cfg.trials;
    let jobs = geometries.len() * n;
    let mut records: Vec<ExperimentRecord> = cfg
        .execution
        .map(jobs, |j| trial_records(&geometries[j / n], j / n, j % n, cfg))
        .into_iter()
        .flatten()
        .collect();
    records.sort_by_key(|r| (r.geometry_index, r.algorithm, r.trial));
    Ok(records)
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()
}

/// Aggregate of final sizes for one (geometry, algorithm) group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub geometry: String,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub mean_size: f64,
    pub min_size: usize,
    pub max_size: usize,
    pub maximal: usize,
    pub clean: usize,
    pub mean_size_s: Option<f64>,
}

pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut keys: Vec<(usize, Algorithm)> = records.iter().map(|r| (r.geometry_index, r.algorithm)).collect();
    keys.dedup();
    for (gi, alg) in keys {
        let group: Vec<&ExperimentRecord> = records
            .iter()
            .filter(|r| r.geometry_index == gi && r.algorithm == alg)
            .collect();
        let n = group.len();
        let sizes = group.iter().map(|r| r.final_size);
        let s_sizes: Vec<usize> = group.iter().filter_map(|r| r.size_s).collect();
        rows.push(SummaryRow {
            geometry: group[0].geometry.clone(),
            algorithm: alg,
            trials: n,
            mean_size: sizes.clone().sum::<usize>() as f64 / n as f64,
            min_size: sizes.clone().min().unwrap_or(0),
            max_size: sizes.max().unwrap_or(0),
            maximal: group.iter().filter(|r| r.maximal).count(),
            clean: group.iter().filter(|r| r.completion_path == "clean").count(),
            mean_size_s: (!s_sizes.is_empty()).then(|| s_sizes.iter().sum::<usize>() as f64 / s_sizes.len() as f64),
        });
    }
    rows
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::from("geometry algorithm trials mean_size min max maximal clean mean_size_S\n");
    for r in rows {
        out.push_str(&format!(
            "{} {} {} {:.3} {} {} {} {} {}\n",
            r.geometry,
            r.algorithm,
            r.trials,
            r.mean_size,
            r.min_size,
            r.max_size,
            r.maximal,
            r.clean,
            r.mean_size_s.map_or("-".to_string(), |m| format!("{m:.3}")),
        ));
    }
    out
}
