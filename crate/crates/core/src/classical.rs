//! Coordinate models of the classical quadrangles.
//!
//! Each model is the polar space of a form: points are the singular points of
//! PG(n, q) (all points, for the symplectic form) and lines are the projective
//! lines all of whose points are singular. Two distinct singular points span
//! such a line exactly when they are orthogonal, so lines are found by
//! scanning orthogonal pairs and keeping each line once, from its smallest
//! point.

use std::fmt;

use thiserror::Error;

use crate::geometry::Quadrangle;
use crate::gf::{prime_power, Elem, Field, GfError};
use crate::projective::{for_each_point, line_through, PointIndex};

pub const MAX_Q5_MINUS: u32 = 13;
pub const MAX_SYMPLECTIC: u32 = 16;
pub const MAX_PARABOLIC: u32 = 16;
pub const MAX_H3: u32 = 4;
pub const MAX_H4: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("q = {q} exceeds the cap {max} for {family}")]
    TooLarge { family: Family, q: u32, max: u32 },
    #[error("point set requested from a geometry that is not an elliptic Q-(5,q) model: {0}")]
    WrongGeometry(String),
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Q-(5,q), order (q, q^2).
    EllipticQ5,
    /// W(q), order (q, q).
    Symplectic,
    /// Q(4,q), order (q, q).
    ParabolicQ4,
    /// H(3,q^2), order (q^2, q).
    Hermitian3,
    /// H(4,q^2), order (q^2, q^3).
    Hermitian4,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::EllipticQ5,
        Family::Symplectic,
        Family::ParabolicQ4,
        Family::Hermitian3,
        Family::Hermitian4,
    ];

    /// Short name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            Family::EllipticQ5 => "q5minus",
            Family::Symplectic => "w",
            Family::ParabolicQ4 => "q4",
            Family::Hermitian3 => "h3",
            Family::Hermitian4 => "h4",
        }
    }

    pub fn from_cli_name(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.cli_name() == name)
    }

    pub fn max_q(self) -> u32 {
        match self {
            Family::EllipticQ5 => MAX_Q5_MINUS,
            Family::Symplectic => MAX_SYMPLECTIC,
            Family::ParabolicQ4 => MAX_PARABOLIC,
            Family::Hermitian3 => MAX_H3,
            Family::Hermitian4 => MAX_H4,
        }
    }

    /// Order `(s, t)` of the family's member for parameter `q`.
    pub fn order(self, q: usize) -> (usize, usize) {
        match self {
            Family::EllipticQ5 => (q, q * q),
            Family::Symplectic | Family::ParabolicQ4 => (q, q),
            Family::Hermitian3 => (q * q, q),
            Family::Hermitian4 => (q * q, q * q * q),
        }
    }

    pub fn label(self, q: u32) -> String {
        match self {
            Family::EllipticQ5 => format!("Q-(5,{q})"),
            Family::Symplectic => format!("W({q})"),
            Family::ParabolicQ4 => format!("Q(4,{q})"),
            Family::Hermitian3 => format!("H(3,{})", q * q),
            Family::Hermitian4 => format!("H(4,{})", q * q),
        }
    }

    pub fn build(self, q: u32) -> Result<Quadrangle, ClassicalError> {
        match self {
            Family::EllipticQ5 => elliptic_q5(q),
            Family::Symplectic => symplectic_w(q),
            Family::ParabolicQ4 => parabolic_q4(q),
            Family::Hermitian3 => hermitian_h(3, q),
            Family::Hermitian4 => hermitian_h(4, q),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// `x0x1 + x2x3 + x4^2 + b x4x5 + c x5^2`
    EllipticQuadratic { b: Elem, c: Elem },
    /// `x0x1 + x2x3 + x4^2`
    ParabolicQuadratic,
    /// `x0y1 - x1y0 + x2y3 - x3y2`
    Symplectic,
    /// `sum x_i^(r+1)` over GF(r^2)
    Hermitian,
}

/// A form on the coordinate space of PG(n, q) together with its field.
#[derive(Debug, Clone)]
pub struct FormSpec {
    pub kind: FormKind,
    pub dimension: usize,
    pub field: Field,
}

impl FormSpec {
    /// The elliptic form on PG(5, q) with the lexicographically smallest
    /// `(b, c)` making `x^2 + bx + c` irreducible.
    pub fn elliptic(field: Field) -> Self {
        let (b, c) = elliptic_pair(&field);
        FormSpec {
            kind: FormKind::EllipticQuadratic { b, c },
            dimension: 5,
            field,
        }
    }

    pub fn parabolic(field: Field) -> Self {
        FormSpec {
            kind: FormKind::ParabolicQuadratic,
            dimension: 4,
            field,
        }
    }

    pub fn symplectic(field: Field) -> Self {
        FormSpec {
            kind: FormKind::Symplectic,
            dimension: 3,
            field,
        }
    }

    /// Diagonal Hermitian form on PG(n, r^2); `field` must be GF(r^2).
    pub fn hermitian(n: usize, field: Field) -> Result<Self, ClassicalError> {
        if !field.degree().is_multiple_of(2) {
            return Err(GfError::OddExtensionDegree(field.degree()).into());
        }
        Ok(FormSpec {
            kind: FormKind::Hermitian,
            dimension: n,
            field,
        })
    }

    /// Whether `v` is a singular (isotropic) vector.
    pub fn is_singular(&self, v: &[Elem]) -> bool {
        let f = &self.field;
        match self.kind {
            FormKind::Symplectic => true,
            FormKind::EllipticQuadratic { b, c } => {
                let mut acc = f.add(f.mul(v[0], v[1]), f.mul(v[2], v[3]));
                acc = f.add(acc, f.mul(v[4], v[4]));
                acc = f.add(acc, f.mul(b, f.mul(v[4], v[5])));
                acc = f.add(acc, f.mul(c, f.mul(v[5], v[5])));
                acc == 0
            }
            FormKind::ParabolicQuadratic => {
                let acc = f.add(f.add(f.mul(v[0], v[1]), f.mul(v[2], v[3])), f.mul(v[4], v[4]));
                acc == 0
            }
            FormKind::Hermitian => {
                let r = f.subfield_order() as u64;
                v.iter().fold(0, |acc, &x| f.add(acc, f.pow(x, r + 1))) == 0
            }
        }
    }

    /// Coefficients `a` with `u ⟂ v  <=>  sum a_i v_i = 0`.
    ///
    /// Quadratic forms use the polar form `B(u,v) = Q(u+v) - Q(u) - Q(v)`;
    /// the Hermitian form uses `h(v, u) = sum v_i u_i^r`, which vanishes
    /// exactly when `h(u, v)` does.
    pub fn functional(&self, u: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        match self.kind {
            FormKind::EllipticQuadratic { b, c } => {
                let two = f.add(1, 1);
                vec![
                    u[1],
                    u[0],
                    u[3],
                    u[2],
                    f.add(f.mul(two, u[4]), f.mul(b, u[5])),
                    f.add(f.mul(b, u[4]), f.mul(f.mul(two, c), u[5])),
                ]
            }
            FormKind::ParabolicQuadratic => {
                let two = f.add(1, 1);
                vec![u[1], u[0], u[3], u[2], f.mul(two, u[4])]
            }
            FormKind::Symplectic => vec![f.neg(u[1]), u[0], f.neg(u[3]), u[2]],
            FormKind::Hermitian => u.iter().map(|&x| f.frobenius(x).expect("even degree")).collect(),
        }
    }

    pub fn orthogonal(&self, u: &[Elem], v: &[Elem]) -> bool {
        dot(&self.field, &self.functional(u), v) == 0
    }

    /// Nondegeneracy of the polar space: no nonzero vector orthogonal to
    /// everything is singular. For quadrics in characteristic 2 the polar
    /// form may have a one-dimensional radical (the nucleus), which is fine
    /// as long as the nucleus is not on the quadric.
    pub fn is_nondegenerate(&self) -> bool {
        let n = self.dimension;
        let f = &self.field;
        // functional images of the standard basis, as columns
        let basis: Vec<Vec<Elem>> = (0..=n)
            .map(|i| {
                let mut e = vec![0; n + 1];
                e[i] = 1;
                self.functional(&e)
            })
            .collect();
        let mut radical_singular = false;
        for_each_point(n, f, |v| {
            if radical_singular {
                return;
            }
            let in_radical = basis.iter().all(|col| dot(f, col, v) == 0);
            if in_radical && self.is_singular(v) {
                radical_singular = true;
            }
        });
        !radical_singular
    }
}

fn dot(f: &Field, a: &[Elem], v: &[Elem]) -> Elem {
    a.iter().zip(v).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Lexicographically smallest `(b, c)` with `x^2 + bx + c` irreducible.
pub fn elliptic_pair(field: &Field) -> (Elem, Elem) {
    field
        .elements()
        .flat_map(|b| field.elements().map(move |c| (b, c)))
        .find(|&(b, c)| field.quadratic_is_irreducible(b, c))
        .expect("irreducible quadratics exist over every finite field")
}

/// Singular points of a form with their coordinates, in lexicographic order.
pub struct PolarSpace {
    pub form: FormSpec,
    /// Flattened coordinates, `dimension + 1` per point.
    pub coords: Vec<Elem>,
    index: PointIndex,
}

impl PolarSpace {
    pub fn new(form: FormSpec) -> Self {
        let mut coords = Vec::new();
        let mut index = PointIndex::new(form.field.order());
        for_each_point(form.dimension, &form.field, |v| {
            if form.is_singular(v) {
                coords.extend_from_slice(v);
                index.push(v);
            }
        });
        PolarSpace { form, coords, index }
    }

    pub fn num_points(&self) -> usize {
        self.index.len()
    }

    pub fn point(&self, i: usize) -> &[Elem] {
        let w = self.form.dimension + 1;
        &self.coords[i * w..(i + 1) * w]
    }

    pub fn index_of(&self, v: &[Elem]) -> Option<usize> {
        self.index.get(v)
    }

    /// All totally singular lines as sorted point-index lists.
    pub fn lines(&self) -> Vec<Vec<usize>> {
        let p = self.num_points();
        let f = &self.form.field;
        let mut lines = Vec::new();
        let mut seen = vec![usize::MAX; p];
        for u in 0..p {
            let a = self.form.functional(self.point(u));
            for v in u + 1..p {
                if seen[v] == u || dot(f, &a, self.point(v)) != 0 {
                    continue;
                }
                let pts = line_through(f, self.point(u), self.point(v)).expect("distinct points");
                let mut line: Vec<usize> = pts
                    .iter()
                    .map(|pt| {
                        self.index_of(pt.coords())
                            .expect("line through orthogonal singular points is singular")
                    })
                    .collect();
                line.sort_unstable();
                for &w in &line {
                    seen[w] = u;
                }
                if line[0] == u {
                    lines.push(line);
                }
            }
        }
        lines
    }

    pub fn into_quadrangle(self, s: usize, t: usize, label: String) -> Quadrangle {
        let lines = self.lines();
        Quadrangle::from_lines_with_points(s, t, self.num_points(), lines, label)
            .expect("classical line sets are well formed")
    }
}

fn check_q(family: Family, q: u32) -> Result<Field, ClassicalError> {
    prime_power(q).ok_or(ClassicalError::NotPrimePower(q))?;
    if q > family.max_q() {
        return Err(ClassicalError::TooLarge {
            family,
            q,
            max: family.max_q(),
        });
    }
    Ok(Field::of_order(q)?)
}

/// The elliptic quadric Q-(5,q), order `(q, q^2)`.
pub fn elliptic_q5(q: u32) -> Result<Quadrangle, ClassicalError> {
    let field = check_q(Family::EllipticQ5, q)?;
    let space = PolarSpace::new(FormSpec::elliptic(field));
    let q = q as usize;
    Ok(space.into_quadrangle(q, q * q, Family::EllipticQ5.label(q as u32)))
}

/// The symplectic quadrangle W(q) on all of PG(3,q), order `(q, q)`.
pub fn symplectic_w(q: u32) -> Result<Quadrangle, ClassicalError> {
    let field = check_q(Family::Symplectic, q)?;
    let space = PolarSpace::new(FormSpec::symplectic(field));
    let q = q as usize;
    Ok(space.into_quadrangle(q, q, Family::Symplectic.label(q as u32)))
}

/// The parabolic quadric Q(4,q), order `(q, q)`.
pub fn parabolic_q4(q: u32) -> Result<Quadrangle, ClassicalError> {
    let field = check_q(Family::ParabolicQ4, q)?;
    let space = PolarSpace::new(FormSpec::parabolic(field));
    let q = q as usize;
    Ok(space.into_quadrangle(q, q, Family::ParabolicQ4.label(q as u32)))
}

/// The Hermitian quadrangle H(n, q^2) for `n` in {3, 4}, with coordinates
/// over GF(q^2).
pub fn hermitian_h(n: usize, q: u32) -> Result<Quadrangle, ClassicalError> {
    let family = match n {
        3 => Family::Hermitian3,
        4 => Family::Hermitian4,
        _ => return Err(ClassicalError::WrongGeometry(format!("H({n},q^2) is not a quadrangle"))),
    };
    let _ = check_q(family, q)?;
    let field = Field::of_order(q * q)?;
    let space = PolarSpace::new(FormSpec::hermitian(n, field)?);
    let (s, t) = family.order(q as usize);
    Ok(space.into_quadrangle(s, t, family.label(q)))
}

/// Points of an elliptic Q-(5,q) model with `x2 = x3 = 0`: a Q-(3,q)
/// section, which is a maximal partial ovoid of size `q^2 + 1`.
///
/// The geometry is identified by its label and order; points are matched by
/// rebuilding the coordinate list, so `q5` must come from [`elliptic_q5`].
pub fn elliptic_q3_section(q5: &Quadrangle) -> Result<Vec<usize>, ClassicalError> {
    let q = q5.s() as u32;
    if q5.label() != Family::EllipticQ5.label(q) || q5.t() != q5.s() * q5.s() {
        return Err(ClassicalError::WrongGeometry(q5.label().to_string()));
    }
    let field = Field::of_order(q).map_err(|_| ClassicalError::NotPrimePower(q))?;
    let space = PolarSpace::new(FormSpec::elliptic(field));
    if space.num_points() != q5.num_points() {
        return Err(ClassicalError::WrongGeometry(q5.label().to_string()));
    }
    Ok((0..space.num_points())
        .filter(|&i| {
            let v = space.point(i);
            v[2] == 0 && v[3] == 0
        })
        .collect())
}
