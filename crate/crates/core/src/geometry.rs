//! Generalized quadrangles as indexed point-line incidence structures.
//!
//! Points are `0..P`, lines are `0..L`. A point is treated as collinear with
//! itself, so `x` is a member of `x^⊥` and of every cover containing `x`.
//!
//! Collinearity is answered either from a dense bit matrix (one row per
//! point, `P^2` bits) or, above [`MATRIX_LIMIT`] points, by searching the
//! sorted lines through one point for the other. The row form makes the set
//! operations below (perps, covers, triple intersections) word-parallel.

use std::borrow::Cow;
use std::fmt;

use rand::Rng as _;
use thiserror::Error;

use crate::bits::{and3_count, and_count, BitMatrix, PointSet};
use crate::exec::Execution;
use crate::rng;

/// Largest point count that gets the dense collinearity matrix.
pub const MATRIX_LIMIT: usize = 32_768;
/// Largest point count for which exhaustive triple checking is allowed.
pub const EXHAUSTIVE_TRIPLE_LIMIT: usize = 400;
/// Point count up to which pair-level checks run over all pairs by default.
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 500;
/// Default number of sampled (point, line) pairs for the perpendicular axiom.
pub const DEFAULT_AXIOM_SAMPLES: u64 = 100_000;
/// Default number of sampled non-collinear pairs for the pair perp identity.
pub const DEFAULT_PAIR_SAMPLES: u64 = 10_000;

const SAMPLE_CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("inconsistent counts: {0}")]
    InconsistentCounts(String),
    #[error("line {line} repeats point {point}")]
    DuplicatePointOnLine { line: usize, point: usize },
    #[error("point index {index} out of range (P = {points})")]
    IndexOutOfRange { index: usize, points: usize },
    #[error("perp of the empty set is undefined")]
    EmptySetForPerp,
    #[error("exhaustive triple check needs P <= {limit}, got {points}", limit = EXHAUSTIVE_TRIPLE_LIMIT)]
    ExhaustiveTooLarge { points: usize },
    #[error("sampled check needs at least one sample")]
    NoSamples,
    #[error("geometry fails the quadrangle axioms: {0}")]
    AxiomFailure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Dense `P x P` bit matrix.
    Matrix,
    /// Binary search of the sorted lines through a point.
    LineSearch,
}

#[derive(Clone)]
enum Collinearity {
    Matrix(BitMatrix),
    LineSearch,
}

/// A finite incidence structure intended to be a generalized quadrangle of
/// order `(s, t)`. Construction only checks the data is well formed; use
/// [`Quadrangle::verify_axioms`] to check the quadrangle axioms.
#[derive(Clone)]
pub struct Quadrangle {
    s: usize,
    t: usize,
    num_points: usize,
    lines: Vec<Vec<usize>>,
    point_lines: Vec<Vec<usize>>,
    collinearity: Collinearity,
    label: String,
}

impl fmt::Debug for Quadrangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Quadrangle")
            .field("label", &self.label)
            .field("s", &self.s)
            .field("t", &self.t)
            .field("points", &self.num_points)
            .field("lines", &self.lines.len())
            .field("backend", &self.backend())
            .finish()
    }
}

impl Quadrangle {
    /// Builds the structure from its lines; `P` is one more than the largest
    /// point index used.
    pub fn from_lines(
        s: usize,
        t: usize,
        lines: Vec<Vec<usize>>,
        label: impl Into<String>,
    ) -> Result<Self, GeometryError> {
        let points = lines.iter().flatten().max().map_or(0, |m| m + 1);
        Self::from_lines_with_points(s, t, points, lines, label)
    }

    pub fn from_lines_with_points(
        s: usize,
        t: usize,
        num_points: usize,
        mut lines: Vec<Vec<usize>>,
        label: impl Into<String>,
    ) -> Result<Self, GeometryError> {
        if s == 0 || t == 0 {
            return Err(GeometryError::InconsistentCounts(format!(
                "order ({s},{t}) must have s, t >= 1"
            )));
        }
        if lines.is_empty() {
            return Err(GeometryError::InconsistentCounts("no lines".into()));
        }
        for (i, line) in lines.iter_mut().enumerate() {
            if line.len() != s + 1 {
                return Err(GeometryError::InconsistentCounts(format!(
                    "line {i} has {} points, expected s+1 = {}",
                    line.len(),
                    s + 1
                )));
            }
            line.sort_unstable();
            if let Some(w) = line.windows(2).find(|w| w[0] == w[1]) {
                return Err(GeometryError::DuplicatePointOnLine { line: i, point: w[0] });
            }
            if let Some(&last) = line.last() {
                if last >= num_points {
                    return Err(GeometryError::IndexOutOfRange {
                        index: last,
                        points: num_points,
                    });
                }
            }
        }
        let mut point_lines = vec![Vec::with_capacity(t + 1); num_points];
        for (i, line) in lines.iter().enumerate() {
            for &p in line {
                point_lines[p].push(i);
            }
        }
        let mut q = Quadrangle {
            s,
            t,
            num_points,
            lines,
            point_lines,
            collinearity: Collinearity::LineSearch,
            label: label.into(),
        };
        if num_points <= MATRIX_LIMIT {
            q = q.with_backend(Backend::Matrix);
        }
        Ok(q)
    }

    /// Switches the collinearity backend.
    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.collinearity = match backend {
            Backend::LineSearch => Collinearity::LineSearch,
            Backend::Matrix => {
                let mut m = BitMatrix::new(self.num_points);
                for line in &self.lines {
                    for &a in line {
                        for &b in line {
                            m.set(a, b);
                        }
                    }
                }
                // isolated points still satisfy x in x^perp
                for p in 0..self.num_points {
                    m.set(p, p);
                }
                Collinearity::Matrix(m)
            }
        };
        self
    }

    pub fn backend(&self) -> Backend {
        match self.collinearity {
            Collinearity::Matrix(_) => Backend::Matrix,
            Collinearity::LineSearch => Backend::LineSearch,
        }
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    /// `(s+1)(st+1)`
    pub fn expected_points(&self) -> usize {
        (self.s + 1) * (self.s * self.t + 1)
    }

    /// `(t+1)(st+1)`
    pub fn expected_lines(&self) -> usize {
        (self.t + 1) * (self.s * self.t + 1)
    }

    /// Points of a line, sorted ascending.
    pub fn line(&self, l: usize) -> &[usize] {
        &self.lines[l]
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    /// Lines through a point, ascending.
    pub fn lines_through(&self, p: usize) -> &[usize] {
        &self.point_lines[p]
    }

    fn check_index(&self, p: usize) -> Result<(), GeometryError> {
        if p >= self.num_points {
            return Err(GeometryError::IndexOutOfRange {
                index: p,
                points: self.num_points,
            });
        }
        Ok(())
    }

    pub fn collinear(&self, u: usize, v: usize) -> Result<bool, GeometryError> {
        self.check_index(u)?;
        self.check_index(v)?;
        Ok(self.is_collinear(u, v))
    }

    /// Unchecked collinearity; `u == v` counts as collinear.
    #[inline]
    pub fn is_collinear(&self, u: usize, v: usize) -> bool {
        match &self.collinearity {
            Collinearity::Matrix(m) => m.get(u, v),
            Collinearity::LineSearch => u == v || self.line_joining(u, v).is_some(),
        }
    }

    /// A line containing both points, found by searching the lines through `u`.
    pub fn line_joining(&self, u: usize, v: usize) -> Option<usize> {
        if u == v {
            return None;
        }
        self.point_lines[u]
            .iter()
            .copied()
            .find(|&l| self.lines[l].binary_search(&v).is_ok())
    }

    /// Row of `u^⊥` as packed words.
    pub fn neighborhood_words(&self, u: usize) -> Cow<'_, [u64]> {
        match &self.collinearity {
            Collinearity::Matrix(m) => Cow::Borrowed(m.row(u)),
            Collinearity::LineSearch => Cow::Owned(self.neighborhood_by_lines(u).words().to_vec()),
        }
    }

    /// `u^⊥`, including `u`.
    pub fn neighborhood(&self, u: usize) -> PointSet {
        match &self.collinearity {
            Collinearity::Matrix(m) => PointSet::from_words(m.row(u).to_vec(), self.num_points),
            Collinearity::LineSearch => self.neighborhood_by_lines(u),
        }
    }

    fn neighborhood_by_lines(&self, u: usize) -> PointSet {
        let mut s = PointSet::new(self.num_points);
        s.insert(u);
        for &l in &self.point_lines[u] {
            for &p in &self.lines[l] {
                s.insert(p);
            }
        }
        s
    }

    fn check_all(&self, set: &[usize]) -> Result<(), GeometryError> {
        set.iter().try_for_each(|&p| self.check_index(p))
    }

    /// `R^⊥`: points collinear with every member of `R`.
    pub fn perp(&self, set: &[usize]) -> Result<PointSet, GeometryError> {
        self.check_all(set)?;
        let (&first, rest) = set.split_first().ok_or(GeometryError::EmptySetForPerp)?;
        let mut acc = self.neighborhood(first);
        for &p in rest {
            acc.intersect_with_words(&self.neighborhood_words(p));
        }
        Ok(acc)
    }

    /// `R^⊥ \ R`.
    pub fn perp_strict(&self, set: &[usize]) -> Result<PointSet, GeometryError> {
        let mut acc = self.perp(set)?;
        for &p in set {
            acc.remove(p);
        }
        Ok(acc)
    }

    /// `R^⋈`: points collinear with at least one member of `R`.
    pub fn cover(&self, set: &[usize]) -> Result<PointSet, GeometryError> {
        self.check_all(set)?;
        Ok(self.cover_unchecked(set))
    }

    pub(crate) fn cover_unchecked(&self, set: &[usize]) -> PointSet {
        let mut acc = PointSet::new(self.num_points);
        for &p in set {
            acc.union_with_words(&self.neighborhood_words(p));
        }
        acc
    }

    /// `R^⋈ \ R`.
    pub fn cover_strict(&self, set: &[usize]) -> Result<PointSet, GeometryError> {
        let mut acc = self.cover(set)?;
        for &p in set {
            acc.remove(p);
        }
        Ok(acc)
    }

    /// Checks the quadrangle axioms and reports each one separately.
    pub fn verify_axioms(&self, mode: PairCheck) -> AxiomReport {
        let mut checks = Vec::new();
        let (p, l) = (self.num_points, self.lines.len());

        checks.push(AxiomCheck::from_result(
            Axiom::PointCount,
            1,
            (p != self.expected_points())
                .then(|| Witness::note(format!("P = {p}, (s+1)(st+1) = {}", self.expected_points()))),
        ));
        checks.push(AxiomCheck::from_result(
            Axiom::LineCount,
            1,
            (l != self.expected_lines())
                .then(|| Witness::note(format!("L = {l}, (t+1)(st+1) = {}", self.expected_lines()))),
        ));

        let bad_line = self.lines.iter().position(|line| line.len() != self.s + 1);
        checks.push(AxiomCheck::from_result(
            Axiom::LineSize,
            l as u64,
            bad_line.map(|i| Witness {
                points: vec![],
                lines: vec![i],
                note: format!("line has {} points, expected {}", self.lines[i].len(), self.s + 1),
            }),
        ));

        let bad_point = (0..p).find(|&x| self.point_lines[x].len() != self.t + 1);
        checks.push(AxiomCheck::from_result(
            Axiom::PointDegree,
            p as u64,
            bad_point.map(|x| Witness {
                points: vec![x],
                lines: self.point_lines[x].clone(),
                note: format!(
                    "point lies on {} lines, expected {}",
                    self.point_lines[x].len(),
                    self.t + 1
                ),
            }),
        ));

        checks.push(self.check_unique_common_line());

        let (triangles, perpendicular) = self.check_perpendiculars(mode);
        checks.push(triangles);
        checks.push(perpendicular);

        AxiomReport { checks }
    }

    fn check_unique_common_line(&self) -> AxiomCheck {
        let mut seen = vec![usize::MAX; self.num_points];
        for u in 0..self.num_points {
            for &l in &self.point_lines[u] {
                for &v in &self.lines[l] {
                    if v == u {
                        continue;
                    }
                    if seen[v] == u {
                        let shared: Vec<usize> = self.point_lines[u]
                            .iter()
                            .copied()
                            .filter(|&m| self.lines[m].binary_search(&v).is_ok())
                            .collect();
                        return AxiomCheck::from_result(
                            Axiom::UniqueCommonLine,
                            u as u64 + 1,
                            Some(Witness {
                                points: vec![u, v],
                                lines: shared,
                                note: "two points on more than one common line".into(),
                            }),
                        );
                    }
                    seen[v] = u;
                }
            }
        }
        AxiomCheck::from_result(Axiom::UniqueCommonLine, self.num_points as u64, None)
    }

    /// Number of points of `line` collinear with `x` (for `x` off the line).
    fn points_collinear_on_line(&self, x: usize, line: usize) -> usize {
        match &self.collinearity {
            Collinearity::Matrix(m) => self.lines[line].iter().filter(|&&y| m.get(x, y)).count(),
            Collinearity::LineSearch => self.lines[line].iter().filter(|&&y| self.is_collinear(x, y)).count(),
        }
    }

    /// Checks "at most one" (no triangles) and "exactly one" (the GQ axiom)
    /// over non-incident (point, line) pairs.
    fn check_perpendiculars(&self, mode: PairCheck) -> (AxiomCheck, AxiomCheck) {
        #[derive(Default)]
        struct Tally {
            checked: u64,
            triangle: Option<(usize, usize, usize)>,
            missing: Option<(usize, usize)>,
        }
        let examine = |tally: &mut Tally, x: usize, l: usize| {
            tally.checked += 1;
            let c = self.points_collinear_on_line(x, l);
            if c > 1 && tally.triangle.is_none() {
                tally.triangle = Some((x, l, c));
            }
            if c == 0 && tally.missing.is_none() {
                tally.missing = Some((x, l));
            }
        };
        let merge = |parts: Vec<Tally>| {
            parts.into_iter().fold(Tally::default(), |mut acc, t| {
                acc.checked += t.checked;
                acc.triangle = acc.triangle.or(t.triangle);
                acc.missing = acc.missing.or(t.missing);
                acc
            })
        };
        let (p, nl) = (self.num_points, self.lines.len());
        let tally = match mode.resolve(p) {
            ResolvedPairCheck::Exhaustive(exec) => merge(exec.map(p, |x| {
                let mut t = Tally::default();
                for l in 0..nl {
                    if self.lines[l].binary_search(&x).is_err() {
                        examine(&mut t, x, l);
                    }
                }
                t
            })),
            ResolvedPairCheck::Sampled { samples, seed, exec } => {
                let chunks = samples.div_ceil(SAMPLE_CHUNK);
                merge(exec.map(chunks as usize, |c| {
                    let mut t = Tally::default();
                    let mut r = rng::seeded(rng::mix(seed, c as u64));
                    let n = SAMPLE_CHUNK.min(samples - c as u64 * SAMPLE_CHUNK);
                    let mut done = 0;
                    while done < n {
                        let x = r.gen_range(0..p);
                        let l = r.gen_range(0..nl);
                        if self.lines[l].binary_search(&x).is_ok() {
                            continue;
                        }
                        examine(&mut t, x, l);
                        done += 1;
                    }
                    t
                }))
            }
        };
        let triangles = AxiomCheck::from_result(
            Axiom::NoTriangles,
            tally.checked,
            tally.triangle.map(|(x, l, c)| Witness {
                points: vec![x],
                lines: vec![l],
                note: format!("{c} points of the line are collinear with the point"),
            }),
        );
        let unique = AxiomCheck::from_result(
            Axiom::UniquePerpendicular,
            tally.checked,
            tally
                .triangle
                .map(|(x, l, c)| Witness {
                    points: vec![x],
                    lines: vec![l],
                    note: format!("{c} perpendiculars from the point to the line"),
                })
                .or(tally.missing.map(|(x, l)| Witness {
                    points: vec![x],
                    lines: vec![l],
                    note: "no point of the line is collinear with the point".into(),
                })),
        );
        (triangles, unique)
    }

    /// Checks `|u^⊥∘| = s(t+1)` for every point and `|{u,v}^⊥∘| = t+1` for
    /// non-collinear pairs (all pairs or a sample, per `mode`).
    pub fn check_perp_identities(&self, mode: PairCheck) -> PerpIdentityReport {
        let p = self.num_points;
        let single = self.s * (self.t + 1);
        let pair = self.t + 1;
        let mut report = PerpIdentityReport {
            points_checked: p as u64,
            ..Default::default()
        };
        for u in 0..p {
            let n = self.neighborhood(u).len() - 1;
            if n != single {
                report.point_failures += 1;
                report.first_point_failure.get_or_insert((u, n));
            }
        }

        let pair_size = |u: usize, v: usize| and_count(&self.neighborhood_words(u), &self.neighborhood_words(v));
        type PairTally = (u64, u64, Option<(usize, usize, usize)>);
        let merge = |parts: Vec<PairTally>| {
            parts.into_iter().fold((0, 0, None), |acc: PairTally, t| {
                (acc.0 + t.0, acc.1 + t.1, acc.2.or(t.2))
            })
        };
        let (checked, failures, first) = match mode.resolve(p) {
            ResolvedPairCheck::Exhaustive(exec) => merge(exec.map(p, |u| {
                let mut t: PairTally = (0, 0, None);
                let row = self.neighborhood(u);
                for v in u + 1..p {
                    if row.contains(v) {
                        continue;
                    }
                    t.0 += 1;
                    let n = pair_size(u, v);
                    if n != pair {
                        t.1 += 1;
                        t.2.get_or_insert((u, v, n));
                    }
                }
                t
            })),
            ResolvedPairCheck::Sampled { samples, seed, exec } => {
                let chunks = samples.div_ceil(SAMPLE_CHUNK);
                merge(exec.map(chunks as usize, |c| {
                    let mut t: PairTally = (0, 0, None);
                    let mut r = rng::seeded(rng::mix(seed, c as u64));
                    let n = SAMPLE_CHUNK.min(samples - c as u64 * SAMPLE_CHUNK);
                    while t.0 < n {
                        let u = r.gen_range(0..p);
                        let v = r.gen_range(0..p);
                        if self.is_collinear(u, v) {
                            continue;
                        }
                        t.0 += 1;
                        let k = pair_size(u, v);
                        if k != pair {
                            t.1 += 1;
                            t.2.get_or_insert((u, v, k));
                        }
                    }
                    t
                }))
            }
        };
        report.pairs_checked = checked;
        report.pair_failures = failures;
        report.first_pair_failure = first;
        report
    }

    /// Looks for a triple of pairwise non-collinear points with more than
    /// `s + 1` common neighbours.
    pub fn locally_sparse(&self, mode: SparsityMode) -> Result<SparsityReport, GeometryError> {
        self.locally_sparse_with(mode, Execution::default())
    }

    pub fn locally_sparse_with(&self, mode: SparsityMode, exec: Execution) -> Result<SparsityReport, GeometryError> {
        let p = self.num_points;
        let bound = self.s + 1;
        match mode {
            SparsityMode::Exhaustive => {
                if p > EXHAUSTIVE_TRIPLE_LIMIT {
                    return Err(GeometryError::ExhaustiveTooLarge { points: p });
                }
                let rows: Vec<PointSet> = (0..p).map(|u| self.neighborhood(u)).collect();
                let parts = exec.map(p, |a| {
                    let mut part = TripleTally::default();
                    for b in a + 1..p {
                        if rows[a].contains(b) {
                            continue;
                        }
                        let mut ab = rows[a].clone();
                        ab.intersect_with(&rows[b]);
                        for c in b + 1..p {
                            if rows[a].contains(c) || rows[b].contains(c) {
                                continue;
                            }
                            part.record([a, b, c], ab.intersection_len(&rows[c]), bound);
                        }
                    }
                    part
                });
                Ok(TripleTally::merge(parts).into_report(bound, true))
            }
            SparsityMode::Sampled { triples, seed } => {
                if triples == 0 {
                    return Err(GeometryError::NoSamples);
                }
                let chunks = triples.div_ceil(SAMPLE_CHUNK);
                let parts = exec.map(chunks as usize, |c| {
                    let mut part = TripleTally::default();
                    let mut r = rng::seeded(rng::mix(seed, c as u64));
                    let n = SAMPLE_CHUNK.min(triples - c as u64 * SAMPLE_CHUNK);
                    for _ in 0..n {
                        let a = r.gen_range(0..p);
                        let b = loop {
                            let b = r.gen_range(0..p);
                            if !self.is_collinear(a, b) {
                                break b;
                            }
                        };
                        let c = loop {
                            let c = r.gen_range(0..p);
                            if !self.is_collinear(a, c) && !self.is_collinear(b, c) {
                                break c;
                            }
                        };
                        let k = and3_count(
                            &self.neighborhood_words(a),
                            &self.neighborhood_words(b),
                            &self.neighborhood_words(c),
                        );
                        part.record([a, b, c], k, bound);
                    }
                    part
                });
                Ok(TripleTally::merge(parts).into_report(bound, false))
            }
        }
    }

    /// The point-line dual, of order `(t, s)`: its points are the lines of
    /// `self` and its lines are the pencils through each point of `self`.
    pub fn dualize(&self) -> Result<Quadrangle, GeometryError> {
        let report = self.verify_axioms(PairCheck::default());
        if let Some(fail) = report.first_failure() {
            return Err(GeometryError::AxiomFailure(fail.to_string()));
        }
        Ok(self.dual_unchecked())
    }

    pub(crate) fn dual_unchecked(&self) -> Quadrangle {
        let label = match self.label.strip_prefix("dual of ") {
            Some(orig) => orig.to_string(),
            None => format!("dual of {}", self.label),
        };
        Quadrangle::from_lines_with_points(self.t, self.s, self.lines.len(), self.point_lines.clone(), label)
            .expect("pencils of a verified quadrangle are well formed")
    }
}

/// How pair-level checks cover the pair space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCheck {
    Exhaustive,
    Sampled {
        samples: u64,
        seed: u64,
    },
    /// Exhaustive up to [`EXHAUSTIVE_PAIR_LIMIT`] points, else sampled.
    Auto {
        samples: u64,
        seed: u64,
    },
}

impl Default for PairCheck {
    fn default() -> Self {
        PairCheck::Auto {
            samples: DEFAULT_AXIOM_SAMPLES,
            seed: 0,
        }
    }
}

enum ResolvedPairCheck {
    Exhaustive(Execution),
    Sampled { samples: u64, seed: u64, exec: Execution },
}

impl PairCheck {
    fn resolve(self, points: usize) -> ResolvedPairCheck {
        let exec = Execution::default();
        match self {
            PairCheck::Exhaustive => ResolvedPairCheck::Exhaustive(exec),
            PairCheck::Sampled { samples, seed } => ResolvedPairCheck::Sampled { samples, seed, exec },
            PairCheck::Auto { samples, seed } => {
                if points <= EXHAUSTIVE_PAIR_LIMIT {
                    ResolvedPairCheck::Exhaustive(exec)
                } else {
                    ResolvedPairCheck::Sampled { samples, seed, exec }
                }
            }
        }
    }

    pub fn is_exhaustive_for(self, points: usize) -> bool {
        matches!(self.resolve(points), ResolvedPairCheck::Exhaustive(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    PointCount,
    LineCount,
    LineSize,
    PointDegree,
    UniqueCommonLine,
    NoTriangles,
    UniquePerpendicular,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::PointCount => "point count (s+1)(st+1)",
            Axiom::LineCount => "line count (t+1)(st+1)",
            Axiom::LineSize => "s+1 points per line",
            Axiom::PointDegree => "t+1 lines per point",
            Axiom::UniqueCommonLine => "at most one line through two points",
            Axiom::NoTriangles => "no triangles",
            Axiom::UniquePerpendicular => "unique perpendicular",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub points: Vec<usize>,
    pub lines: Vec<usize>,
    pub note: String,
}

impl Witness {
    fn note(note: String) -> Self {
        Witness {
            points: vec![],
            lines: vec![],
            note,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.note)?;
        if !self.points.is_empty() {
            write!(f, "; points {:?}", self.points)?;
        }
        if !self.lines.is_empty() {
            write!(f, "; lines {:?}", self.lines)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub checked: u64,
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    fn from_result(axiom: Axiom, checked: u64, witness: Option<Witness>) -> Self {
        AxiomCheck {
            axiom,
            passed: witness.is_none(),
            checked,
            witness,
        }
    }
}

impl fmt::Display for AxiomCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} checked)", self.axiom, self.checked)?;
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .expect("every axiom is reported")
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PerpIdentityReport {
    pub points_checked: u64,
    pub point_failures: u64,
    /// `(u, |u^⊥∘|)`
    pub first_point_failure: Option<(usize, usize)>,
    pub pairs_checked: u64,
    pub pair_failures: u64,
    /// `(u, v, |{u,v}^⊥∘|)`
    pub first_pair_failure: Option<(usize, usize, usize)>,
}

impl PerpIdentityReport {
    pub fn passed(&self) -> bool {
        self.point_failures == 0 && self.pair_failures == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsityMode {
    Exhaustive,
    Sampled { triples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityReport {
    /// False only when a violating triple was found. A sampled `true` means
    /// no counterexample was found, not a proof.
    pub verdict: bool,
    pub exhaustive: bool,
    pub triples_checked: u64,
    /// Largest common-neighbour count seen over checked triples.
    pub max_perp: usize,
    pub bound: usize,
    /// First violating triple (in check order) and its strict perp size.
    pub witness: Option<([usize; 3], usize)>,
}

#[derive(Default)]
struct TripleTally {
    checked: u64,
    max_perp: usize,
    witness: Option<([usize; 3], usize)>,
}

impl TripleTally {
    #[inline]
    fn record(&mut self, triple: [usize; 3], perp: usize, bound: usize) {
        self.checked += 1;
        self.max_perp = self.max_perp.max(perp);
        if perp > bound && self.witness.is_none() {
            self.witness = Some((triple, perp));
        }
    }

    fn merge(parts: Vec<TripleTally>) -> TripleTally {
        parts.into_iter().fold(TripleTally::default(), |mut acc, t| {
            acc.checked += t.checked;
            acc.max_perp = acc.max_perp.max(t.max_perp);
            acc.witness = acc.witness.or(t.witness);
            acc
        })
    }

    fn into_report(self, bound: usize, exhaustive: bool) -> SparsityReport {
        SparsityReport {
            verdict: self.witness.is_none(),
            exhaustive,
            triples_checked: self.checked,
            max_perp: self.max_perp,
            bound,
            witness: self.witness,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// W(2) (the "doily"): points are the 2-subsets of {0..5}, lines are the
    /// partitions of {0..5} into three pairs.
    pub(crate) fn doily() -> Quadrangle {
        let mut pairs = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                pairs.push((a, b));
            }
        }
        let idx = |a: usize, b: usize| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
        let mut lines = Vec::new();
        for b in 1..6 {
            let rest: Vec<usize> = (1..6).filter(|&x| x != b).collect();
            let (c, others) = (rest[0], &rest[1..]);
            for &d in others {
                let last: Vec<usize> = others.iter().copied().filter(|&x| x != d).collect();
                lines.push(vec![idx(0, b), idx(c, d), idx(last[0], last[1])]);
            }
        }
        Quadrangle::from_lines(2, 2, lines, "doily").unwrap()
    }

    fn fano() -> Quadrangle {
        let lines = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        Quadrangle::from_lines(2, 2, lines, "fano").unwrap()
    }

    #[test]
    fn doily_is_a_quadrangle() {
        let q = doily();
        assert_eq!((q.num_points(), q.num_lines()), (15, 15));
        let report = q.verify_axioms(PairCheck::Exhaustive);
        assert!(report.all_passed(), "{report}");
        assert!(q.check_perp_identities(PairCheck::Exhaustive).passed());
    }

    #[test]
    fn fano_fails_unique_perpendicular() {
        let q = fano();
        let report = q.verify_axioms(PairCheck::Exhaustive);
        let check = report.get(Axiom::UniquePerpendicular);
        assert!(!check.passed);
        assert!(check.witness.is_some());
        assert!(!report.get(Axiom::NoTriangles).passed);
        assert!(!report.get(Axiom::PointCount).passed);
        assert!(report.get(Axiom::PointDegree).passed);
        assert!(q.dualize().is_err());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            Quadrangle::from_lines(2, 2, vec![], "empty"),
            Err(GeometryError::InconsistentCounts(_))
        ));
        assert!(matches!(
            Quadrangle::from_lines(2, 2, vec![vec![0, 1]], "short"),
            Err(GeometryError::InconsistentCounts(_))
        ));
        assert_eq!(
            Quadrangle::from_lines(2, 2, vec![vec![0, 1, 1]], "dup").unwrap_err(),
            GeometryError::DuplicatePointOnLine { line: 0, point: 1 }
        );
        assert_eq!(
            Quadrangle::from_lines_with_points(2, 2, 3, vec![vec![0, 1, 5]], "oob").unwrap_err(),
            GeometryError::IndexOutOfRange { index: 5, points: 3 }
        );
    }

    #[test]
    fn collinearity_and_perps() {
        let q = doily();
        assert!(q.collinear(4, 4).unwrap());
        assert!(matches!(q.collinear(0, 15), Err(GeometryError::IndexOutOfRange { .. })));
        for u in 0..15 {
            assert_eq!(q.cover(&[u]).unwrap(), q.neighborhood(u));
            assert_eq!(q.neighborhood(u).len(), 7);
            for v in 0..15 {
                let mut both = q.perp(&[u]).unwrap();
                both.intersect_with(&q.perp(&[v]).unwrap());
                assert_eq!(both, q.perp(&[u, v]).unwrap());
            }
        }
        assert_eq!(q.perp(&[]), Err(GeometryError::EmptySetForPerp));
        assert!(q.cover(&[]).unwrap().is_empty());
        let s = q.perp_strict(&[3]).unwrap();
        assert!(!s.contains(3));
        assert_eq!(s.len(), 6);
        assert_eq!(q.cover_strict(&[3]).unwrap(), s);
    }

    #[test]
    fn backends_agree() {
        let m = doily();
        let l = doily().with_backend(Backend::LineSearch);
        assert_eq!(m.backend(), Backend::Matrix);
        for u in 0..15 {
            for v in 0..15 {
                assert_eq!(m.is_collinear(u, v), l.is_collinear(u, v));
            }
            assert_eq!(m.neighborhood(u), l.neighborhood(u));
        }
        assert_eq!(
            m.locally_sparse(SparsityMode::Exhaustive).unwrap(),
            l.locally_sparse(SparsityMode::Exhaustive).unwrap()
        );
    }

    #[test]
    fn deleting_a_line_breaks_degrees() {
        let q = doily();
        let mut lines = q.lines().to_vec();
        lines.remove(4);
        let broken = Quadrangle::from_lines_with_points(2, 2, 15, lines, "broken").unwrap();
        let report = broken.verify_axioms(PairCheck::Exhaustive);
        let deg = report.get(Axiom::PointDegree);
        assert!(!deg.passed);
        let w = deg.witness.as_ref().unwrap();
        assert!(q.line(4).contains(&w.points[0]));
    }

    #[test]
    fn dual_of_dual_restores_lines() {
        let q = doily();
        let d = q.dualize().unwrap();
        assert_eq!((d.s(), d.t()), (2, 2));
        assert!(d.verify_axioms(PairCheck::Exhaustive).all_passed());
        let dd = d.dualize().unwrap();
        let mut a = q.lines().to_vec();
        let mut b = dd.lines().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(dd.label(), "doily");
    }

    #[test]
    fn sparsity_modes() {
        let q = doily();
        let r = q.locally_sparse(SparsityMode::Exhaustive).unwrap();
        // In W(q) every pair is regular, so triples on a hyperbolic line
        // share q+1 = s+1 neighbours: sparse but tight.
        assert!(r.verdict);
        assert_eq!(r.max_perp, 3);
        assert_eq!(
            q.locally_sparse(SparsityMode::Sampled { triples: 0, seed: 1 }),
            Err(GeometryError::NoSamples)
        );
        let s = q
            .locally_sparse(SparsityMode::Sampled { triples: 5000, seed: 1 })
            .unwrap();
        assert_eq!(s.triples_checked, 5000);
        assert!(s.verdict);
    }

    #[test]
    fn sampled_checks_do_not_depend_on_execution() {
        let q = doily();
        let mode = SparsityMode::Sampled { triples: 9000, seed: 3 };
        assert_eq!(
            q.locally_sparse_with(mode, Execution::Sequential).unwrap(),
            q.locally_sparse_with(mode, Execution::Parallel).unwrap()
        );
    }
}
