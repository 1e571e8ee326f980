//! Points of PG(n, q) in canonical homogeneous coordinates.

use thiserror::Error;

use crate::gf::{Elem, Field};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectiveError {
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("a line needs two distinct points")]
    IdenticalPoints,
    #[error("coordinate vectors have different lengths ({0} vs {1})")]
    DimensionMismatch(usize, usize),
}

/// A projective point whose leftmost nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint(Vec<Elem>);

impl ProjPoint {
    pub fn coords(&self) -> &[Elem] {
        &self.0
    }

    /// Projective dimension `n` of the ambient PG(n, q).
    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }

    pub fn into_coords(self) -> Vec<Elem> {
        self.0
    }
}

/// Scales `v` so that its leftmost nonzero coordinate becomes 1.
pub fn normalize(field: &Field, v: &[Elem]) -> Result<ProjPoint, ProjectiveError> {
    let lead = *v.iter().find(|&&c| c != 0).ok_or(ProjectiveError::ZeroVector)?;
    let s = field.inv(lead).expect("lead is nonzero");
    Ok(ProjPoint(v.iter().map(|&c| field.mul(s, c)).collect()))
}

/// Number of points of PG(n, q).
pub fn point_count(n: usize, q: u32) -> usize {
    let q = q as usize;
    (q.pow(n as u32 + 1) - 1) / (q - 1)
}

/// Calls `f` on every canonical vector of PG(n, q) in lexicographic order.
pub fn for_each_point(n: usize, field: &Field, mut f: impl FnMut(&[Elem])) {
    let q = field.order();
    let mut v = vec![0; n + 1];
    // More leading zeros sort first, so walk the pivot from the right.
    for lead in (0..=n).rev() {
        v.iter_mut().for_each(|c| *c = 0);
        v[lead] = 1;
        loop {
            f(&v);
            // odometer over positions lead+1..=n, rightmost fastest
            let mut pos = n;
            loop {
                if pos == lead {
                    break;
                }
                v[pos] += 1;
                if v[pos] < q {
                    break;
                }
                v[pos] = 0;
                pos -= 1;
            }
            if pos == lead {
                break;
            }
        }
    }
}

/// All points of PG(n, q), sorted lexicographically by canonical coordinates.
pub fn enumerate_points(n: usize, field: &Field) -> Vec<ProjPoint> {
    let mut out = Vec::with_capacity(point_count(n, field.order()));
    for_each_point(n, field, |v| out.push(ProjPoint(v.to_vec())));
    out
}

/// The `q + 1` points on the line spanned by `u` and `v`, sorted.
pub fn line_through(field: &Field, u: &[Elem], v: &[Elem]) -> Result<Vec<ProjPoint>, ProjectiveError> {
    if u.len() != v.len() {
        return Err(ProjectiveError::DimensionMismatch(u.len(), v.len()));
    }
    let nu = normalize(field, u)?;
    let nv = normalize(field, v)?;
    if nu == nv {
        return Err(ProjectiveError::IdenticalPoints);
    }
    let mut pts = Vec::with_capacity(field.order() as usize + 1);
    pts.push(nu.clone());
    let mut w = vec![0; u.len()];
    for lambda in field.elements() {
        for (i, c) in w.iter_mut().enumerate() {
            *c = field.add(field.mul(lambda, nu.0[i]), nv.0[i]);
        }
        pts.push(normalize(field, &w)?);
    }
    pts.sort();
    Ok(pts)
}

/// Dense index of canonical vectors by their base-`q` key.
///
/// Keys of lexicographically ordered canonical vectors increase strictly, so
/// lookup is a binary search.
#[derive(Debug, Clone)]
pub struct PointIndex {
    q: u64,
    keys: Vec<u64>,
}

impl PointIndex {
    pub fn new(q: u32) -> Self {
        PointIndex {
            q: q as u64,
            keys: Vec::new(),
        }
    }

    pub fn key(&self, coords: &[Elem]) -> u64 {
        coords.iter().fold(0, |acc, &c| acc * self.q + c as u64)
    }

    /// Appends a point; points must arrive in increasing order.
    pub fn push(&mut self, coords: &[Elem]) -> usize {
        let k = self.key(coords);
        assert!(
            self.keys.last().is_none_or(|&last| last < k),
            "points must be pushed in order"
        );
        self.keys.push(k);
        self.keys.len() - 1
    }

    pub fn get(&self, coords: &[Elem]) -> Option<usize> {
        self.keys.binary_search(&self.key(coords)).ok()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}
