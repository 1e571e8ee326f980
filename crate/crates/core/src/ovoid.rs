//! Partial ovoids: verification, the two-round randomized construction,
//! greedy baselines, size bounds and first-round diagnostics.
//!
//! The two-round construction, for a quadrangle of order `(s, t)`:
//!
//! 1. Fix a point `x`. On each of the `t + 1` lines through `x` flip a coin
//!    with heads probability `ps`; on heads add a uniform point of the line
//!    other than `x` to `S`. Let `U` be the points not in `(S ∪ {x})^⋈`.
//! 2. Pick `x*` uniformly in `x^⊥∘ \ S^⋈`. On each line through `x*` that
//!    meets `U`, add a uniform point of `ℓ ∩ U` to `T`; also add `x⁺`, a point
//!    of the line `x x*` other than `x` and `x*`.
//!
//! `S ∪ T` is always a partial ovoid. When it is not maximal (or no `x*`
//! exists) the run restarts from a derived seed, and after `max_restarts`
//! failures applies the configured failure policy.

use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::bits::PointSet;
use crate::geometry::Quadrangle;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OvoidError {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("log log s is undefined for s = {0}")]
    UndefinedLog(usize),
    #[error("point {index} out of range (P = {points})")]
    PointOutOfRange { index: usize, points: usize },
    #[error("every neighbour of x is covered by S")]
    NoUncoveredNeighbor,
    #[error("the given set is not a partial ovoid")]
    NotPartialOvoid,
    #[error("no maximal partial ovoid after {} attempts", .0.restarts_used + 1)]
    RunFailed(Box<RunResult>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OvoidStatus {
    Unverified,
    VerifiedPartial,
    VerifiedMaximal,
}

impl fmt::Display for OvoidStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OvoidStatus::Unverified => "unverified",
            OvoidStatus::VerifiedPartial => "verified-partial",
            OvoidStatus::VerifiedMaximal => "verified-maximal",
        })
    }
}

/// A point set with the outcome of its last verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialOvoid {
    /// Sorted ascending, no repeats.
    pub members: Vec<usize>,
    pub status: OvoidStatus,
}

impl PartialOvoid {
    pub fn unverified(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        PartialOvoid {
            members,
            status: OvoidStatus::Unverified,
        }
    }

    /// Verifies against `gq` and records the status. A set that is not a
    /// partial ovoid stays `Unverified`.
    pub fn verified(members: Vec<usize>, gq: &Quadrangle) -> Self {
        let mut o = PartialOvoid::unverified(members);
        o.status = if !is_partial_ovoid(gq, &o.members) {
            OvoidStatus::Unverified
        } else if is_maximal(gq, &o.members) {
            OvoidStatus::VerifiedMaximal
        } else {
            OvoidStatus::VerifiedPartial
        };
        o
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_maximal(&self) -> bool {
        self.status == OvoidStatus::VerifiedMaximal
    }
}

/// All pairs of distinct members non-collinear. Checked pair by pair, without
/// the cover machinery the constructions use.
pub fn is_partial_ovoid(gq: &Quadrangle, set: &[usize]) -> bool {
    let p = gq.num_points();
    if set.iter().any(|&u| u >= p) {
        return false;
    }
    for (i, &u) in set.iter().enumerate() {
        for &v in &set[i + 1..] {
            if u == v || gq.line_joining(u, v).is_some() {
                return false;
            }
        }
    }
    true
}

/// A partial ovoid whose members are collinear with every point.
pub fn is_maximal(gq: &Quadrangle, set: &[usize]) -> bool {
    if !is_partial_ovoid(gq, set) {
        return false;
    }
    let mut covered = vec![false; gq.num_points()];
    for &u in set {
        covered[u] = true;
        for &l in gq.lines_through(u) {
            for &v in gq.line(l) {
                covered[v] = true;
            }
        }
    }
    covered.into_iter().all(|c| c)
}

/// `ceil((1 + s + st + s^2 t) / (1 + s + st))`, the smallest size a maximal
/// partial ovoid can have.
pub fn counting_lower_bound(s: u64, t: u64) -> u64 {
    let num = 1 + s + s * t + s * s * t;
    let den = 1 + s + s * t;
    num.div_ceil(den)
}

/// Known lower bound for maximal partial ovoids of Q-(5,q): `2q + 1`, or
/// `2q + 2` once `q >= 5`.
pub fn ebert_hirschfeld_bound(q: u64) -> u64 {
    if q >= 5 {
        2 * q + 2
    } else {
        2 * q + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability {
    /// Per-point probability `P(y in S)` for `y` in `x^⊥∘`.
    pub p: f64,
    /// Per-line coin probability.
    pub ps: f64,
    /// Whether clamping to `[0, 1]` changed `ps`.
    pub clamped: bool,
    /// `ps` before clamping.
    pub ps_raw: f64,
}

/// `ps = (s ln t - alpha s ln ln s) / t`, clamped to `[0, 1]`; `p = ps / s`.
pub fn compute_p(s: usize, t: usize, alpha: f64) -> Result<Probability, OvoidError> {
    if s <= 1 {
        return Err(OvoidError::UndefinedLog(s));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(OvoidError::InvalidAlpha(alpha));
    }
    let (sf, tf) = (s as f64, t as f64);
    let ps_raw = (sf * tf.ln() - alpha * sf * sf.ln().ln()) / tf;
    let ps = ps_raw.clamp(0.0, 1.0);
    Ok(Probability {
        p: ps / sf,
        ps,
        clamped: ps != ps_raw,
        ps_raw,
    })
}

/// Probability from a fixed per-point value `p`: `ps = p s`, clamped to 1.
pub fn probability_from_p(s: usize, p: f64) -> Result<Probability, OvoidError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(OvoidError::InvalidProbability(p));
    }
    let ps_raw = p * s as f64;
    let ps = ps_raw.min(1.0);
    Ok(Probability {
        p,
        ps,
        clamped: ps != ps_raw,
        ps_raw,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstRound {
    /// In the order of the lines through `x`.
    pub selected: Vec<usize>,
    pub uncovered: PointSet,
}

fn check_point(gq: &Quadrangle, x: usize) -> Result<(), OvoidError> {
    if x >= gq.num_points() {
        return Err(OvoidError::PointOutOfRange {
            index: x,
            points: gq.num_points(),
        });
    }
    Ok(())
}

/// One Bernoulli(`ps`) coin per line through `x`; on heads a uniform point of
/// the line other than `x` joins `S`. Returns `S` and `U = P \ (S ∪ {x})^⋈`.
pub fn first_round(gq: &Quadrangle, x: usize, ps: f64, rng: &mut Rng) -> Result<FirstRound, OvoidError> {
    check_point(gq, x)?;
    if !(0.0..=1.0).contains(&ps) {
        return Err(OvoidError::InvalidProbability(ps));
    }
    let mut selected = Vec::new();
    for &l in gq.lines_through(x) {
        if rng.gen_bool(ps) {
            let line = gq.line(l);
            let k = rng.gen_range(0..line.len() - 1);
            // skip x: the k-th point of the line after removing x
            let pos = line.binary_search(&x).expect("x is on its own lines");
            selected.push(line[if k < pos { k } else { k + 1 }]);
        }
    }
    let mut cover = gq.cover_unchecked(&selected);
    cover.union_with_words(&gq.neighborhood_words(x));
    Ok(FirstRound {
        selected,
        uncovered: cover.complement(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondRound {
    pub x_star: usize,
    pub x_plus: usize,
    /// One point per line through `x*` meeting `U`, in line order, then `x⁺`.
    pub selected: Vec<usize>,
}

/// Chooses `x*` in `x^⊥∘ \ S^⋈`, one uniform point of `ℓ ∩ U` on each line
/// `ℓ` through `x*` that meets `U`, and `x⁺` = the smallest point of the line
/// `x x*` other than `x` and `x*`.
pub fn second_round(
    gq: &Quadrangle,
    x: usize,
    selected: &[usize],
    uncovered: &PointSet,
    rng: &mut Rng,
) -> Result<SecondRound, OvoidError> {
    check_point(gq, x)?;
    let mut candidates = gq.neighborhood(x);
    candidates.remove(x);
    candidates.difference_with(&gq.cover_unchecked(selected));
    let n = candidates.len();
    if n == 0 {
        return Err(OvoidError::NoUncoveredNeighbor);
    }
    let x_star = candidates.nth(rng.gen_range(0..n)).expect("index below count");

    let mut chosen = Vec::new();
    let mut meet = Vec::new();
    for &l in gq.lines_through(x_star) {
        meet.clear();
        meet.extend(gq.line(l).iter().copied().filter(|&p| uncovered.contains(p)));
        if let Some(&p) = meet.choose(rng) {
            chosen.push(p);
        }
    }
    let joining = gq.line_joining(x, x_star).expect("x* is collinear with x");
    let x_plus = gq
        .line(joining)
        .iter()
        .copied()
        .find(|&p| p != x && p != x_star)
        .expect("thick lines have a third point");
    chosen.push(x_plus);
    Ok(SecondRound {
        x_star,
        x_plus,
        selected: chosen,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnFailure {
    Fail,
    GreedyComplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletionPath {
    Clean,
    FallbackGreedy,
    Failed,
}

impl fmt::Display for CompletionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompletionPath::Clean => "clean",
            CompletionPath::FallbackGreedy => "fallback-greedy",
            CompletionPath::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasePoint {
    Random,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub alpha: f64,
    pub seed: u64,
    pub x: BasePoint,
    /// Per-point probability `p`; replaces the computed value when set.
    pub p_override: Option<f64>,
    pub max_restarts: u32,
    pub on_failure: OnFailure,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            alpha: 4.1,
            seed: 0,
            x: BasePoint::Random,
            p_override: None,
            max_restarts: 3,
            on_failure: OnFailure::GreedyComplete,
        }
    }
}

impl RunParams {
    pub fn validate(&self) -> Result<(), OvoidError> {
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(OvoidError::InvalidAlpha(self.alpha));
        }
        if let Some(p) = self.p_override {
            if !(0.0..=1.0).contains(&p) {
                return Err(OvoidError::InvalidProbability(p));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub first_round: Duration,
    pub second_round: Duration,
    pub verification: Duration,
    pub completion: Duration,
}

impl PhaseTimings {
    pub fn total(&self) -> Duration {
        self.first_round + self.second_round + self.verification + self.completion
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub s_set: Vec<usize>,
    pub t_set: Vec<usize>,
    pub x: usize,
    pub x_star: Option<usize>,
    pub x_plus: Option<usize>,
    pub uncovered_after_first_round: usize,
    pub final_ovoid: PartialOvoid,
    pub probability: Probability,
    pub restarts_used: u32,
    pub completion_path: CompletionPath,
    pub timings: PhaseTimings,
}

impl RunResult {
    /// Equality ignoring wall-clock timings.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        RunResult {
            timings: PhaseTimings::default(),
            ..self.clone()
        } == RunResult {
            timings: PhaseTimings::default(),
            ..other.clone()
        }
    }
}

struct Attempt {
    x: usize,
    first: FirstRound,
    second: Option<SecondRound>,
    maximal: bool,
}

fn attempt(gq: &Quadrangle, params: &RunParams, ps: f64, index: u32, timings: &mut PhaseTimings) -> Attempt {
    let mut r = rng::seeded(rng::mix(params.seed, index as u64));
    let x = match params.x {
        BasePoint::Fixed(x) => x,
        BasePoint::Random => r.gen_range(0..gq.num_points()),
    };
    let t0 = Instant::now();
    let first = first_round(gq, x, ps, &mut r).expect("validated inputs");
    let t1 = Instant::now();
    let second = second_round(gq, x, &first.selected, &first.uncovered, &mut r).ok();
    let t2 = Instant::now();
    // without a second round S alone may still be maximal
    let mut cover = gq.cover_unchecked(&first.selected);
    if let Some(sr) = &second {
        cover.union_with(&gq.cover_unchecked(&sr.selected));
    }
    let maximal = cover.is_full();
    let t3 = Instant::now();
    timings.first_round += t1 - t0;
    timings.second_round += t2 - t1;
    timings.verification += t3 - t2;
    Attempt {
        x,
        first,
        second,
        maximal,
    }
}

/// Runs the two-round construction with restarts and the failure policy.
///
/// Attempt `i` (0-based) draws everything from `ChaCha8Rng` seeded with
/// `mix(seed, i)`; a greedy completion uses `mix(seed, max_restarts + 1)`.
pub fn two_round(gq: &Quadrangle, params: &RunParams) -> Result<RunResult, OvoidError> {
    params.validate()?;
    if let BasePoint::Fixed(x) = params.x {
        check_point(gq, x)?;
    }
    let probability = match params.p_override {
        Some(p) => probability_from_p(gq.s(), p)?,
        None => compute_p(gq.s(), gq.t(), params.alpha)?,
    };
    let mut timings = PhaseTimings::default();
    let mut restarts_used = 0;
    let mut last = attempt(gq, params, probability.ps, 0, &mut timings);
    while !last.maximal && restarts_used < params.max_restarts {
        restarts_used += 1;
        last = attempt(gq, params, probability.ps, restarts_used, &mut timings);
    }

    let s_set = last.first.selected.clone();
    let t_set = last.second.as_ref().map(|sr| sr.selected.clone()).unwrap_or_default();
    let union: Vec<usize> = s_set.iter().chain(&t_set).copied().collect();
    let mut result = RunResult {
        x: last.x,
        x_star: last.second.as_ref().map(|sr| sr.x_star),
        x_plus: last.second.as_ref().map(|sr| sr.x_plus),
        uncovered_after_first_round: last.first.uncovered.len(),
        s_set,
        t_set,
        final_ovoid: PartialOvoid::unverified(union.clone()),
        probability,
        restarts_used,
        completion_path: CompletionPath::Clean,
        timings,
    };

    if last.maximal {
        let t = Instant::now();
        result.final_ovoid = PartialOvoid::verified(union, gq);
        result.timings.verification += t.elapsed();
        debug_assert!(result.final_ovoid.is_maximal());
        return Ok(result);
    }
    match params.on_failure {
        OnFailure::Fail => {
            result.final_ovoid = PartialOvoid::verified(union, gq);
            result.completion_path = CompletionPath::Failed;
            Err(OvoidError::RunFailed(Box::new(result)))
        }
        OnFailure::GreedyComplete => {
            let t = Instant::now();
            let seed = rng::mix(params.seed, params.max_restarts as u64 + 1);
            result.final_ovoid = greedy_complete(gq, &union, seed)?;
            result.timings.completion += t.elapsed();
            result.completion_path = CompletionPath::FallbackGreedy;
            Ok(result)
        }
    }
}

/// Extends a partial ovoid to a maximal one by repeatedly adding a uniform
/// random point that is not yet covered.
pub fn greedy_complete(gq: &Quadrangle, start: &[usize], seed: u64) -> Result<PartialOvoid, OvoidError> {
    if !is_partial_ovoid(gq, start) {
        return Err(OvoidError::NotPartialOvoid);
    }
    let mut r = rng::seeded(seed);
    let mut members = start.to_vec();
    let mut uncovered = gq.cover_unchecked(start).complement();
    let mut left = uncovered.len();
    while left > 0 {
        let u = uncovered.nth(r.gen_range(0..left)).expect("index below count");
        members.push(u);
        uncovered.difference_with(&gq.neighborhood(u));
        left = uncovered.len();
    }
    let out = PartialOvoid::verified(members, gq);
    debug_assert!(out.is_maximal());
    Ok(out)
}

/// Random greedy maximal partial ovoid from the empty set.
pub fn greedy_random(gq: &Quadrangle, seed: u64) -> PartialOvoid {
    greedy_complete(gq, &[], seed).expect("the empty set is a partial ovoid")
}

/// Statistics of a first-round outcome with their reference values.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// max `|ℓ ∩ U|` over lines not through `x`.
    pub max_line_uncovered: usize,
    /// `ceil(ln s)`
    pub line_reference: f64,
    /// max `|u^⊥ ∩ U|` over `u` in `x^⊥ \ S`.
    pub max_perp_uncovered: usize,
    /// `s (ln s)^alpha`
    pub perp_reference: f64,
    /// min `|{v,w}^⊥∘ ∩ U|` over sampled non-collinear `v, w` outside
    /// `S ∪ {x}`; `None` when no pair was sampled.
    pub min_pair_uncovered: Option<usize>,
    /// `(ln s)^alpha`
    pub pair_reference: f64,
    pub pairs_sampled: u64,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "max |line ∩ U| over lines missing x: {} (reference ceil(ln s) = {})",
            self.max_line_uncovered, self.line_reference
        )?;
        writeln!(
            f,
            "max |u^perp ∩ U| over u in x^perp \\ S: {} (reference s(ln s)^alpha = {:.3})",
            self.max_perp_uncovered, self.perp_reference
        )?;
        match self.min_pair_uncovered {
            Some(m) => writeln!(
                f,
                "min |{{v,w}}^perp ∩ U| over {} sampled pairs: {} (reference (ln s)^alpha = {:.3})",
                self.pairs_sampled, m, self.pair_reference
            ),
            None => writeln!(f, "no non-collinear pairs sampled"),
        }
    }
}

/// Measures the three first-round statistics. Nothing here is asserted.
pub fn diagnostics_properties(
    gq: &Quadrangle,
    x: usize,
    selected: &[usize],
    uncovered: &PointSet,
    alpha: f64,
    pair_samples: u64,
    seed: u64,
) -> Result<Diagnostics, OvoidError> {
    check_point(gq, x)?;
    let s = gq.s() as f64;
    let ln_s = s.ln();

    let max_line_uncovered = (0..gq.num_lines())
        .filter(|&l| gq.line(l).binary_search(&x).is_err())
        .map(|l| gq.line(l).iter().filter(|&&p| uncovered.contains(p)).count())
        .max()
        .unwrap_or(0);

    let in_s = PointSet::from_indices(gq.num_points(), selected.iter().copied());
    let max_perp_uncovered = gq
        .neighborhood(x)
        .iter()
        .filter(|&u| !in_s.contains(u))
        .map(|u| crate::bits::and_count(&gq.neighborhood_words(u), uncovered.words()))
        .max()
        .unwrap_or(0);

    let mut r = rng::seeded(seed);
    let mut min_pair: Option<usize> = None;
    let excluded = |p: usize| p == x || in_s.contains(p);
    let eligible = gq.num_points() - 1 - selected.len();
    let mut sampled = 0;
    if eligible >= 2 {
        while sampled < pair_samples {
            let v = r.gen_range(0..gq.num_points());
            let w = r.gen_range(0..gq.num_points());
            if excluded(v) || excluded(w) || gq.is_collinear(v, w) {
                continue;
            }
            sampled += 1;
            // non-collinear, so v, w are not in their own common perp
            let k = crate::bits::and3_count(&gq.neighborhood_words(v), &gq.neighborhood_words(w), uncovered.words());
            min_pair = Some(min_pair.map_or(k, |m| m.min(k)));
        }
    }

    Ok(Diagnostics {
        max_line_uncovered,
        line_reference: ln_s.ceil(),
        max_perp_uncovered,
        perp_reference: s * ln_s.powf(alpha),
        min_pair_uncovered: min_pair,
        pair_reference: ln_s.powf(alpha),
        pairs_sampled: sampled,
    })
}
