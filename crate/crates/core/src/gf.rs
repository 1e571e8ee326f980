//! Arithmetic in GF(p^k) for small p^k.
//!
//! Elements are encoded as integers `0..q` whose base-`p` digits are the
//! polynomial coefficients, lowest degree first: `a = c0 + c1*p + c2*p^2 + ...`.
//! So in GF(4) the element `2` is the class of `x`.

use std::fmt;

use thiserror::Error;

/// A field element in its integer encoding.
pub type Elem = u32;

/// Largest extension degree supported.
pub const MAX_DEGREE: u32 = 4;
/// Largest field order supported.
pub const MAX_ORDER: u32 = 1 << 16;
/// Fields up to this order get full multiplication/inverse tables.
pub const TABLE_LIMIT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("extension degree {k} out of range (1..={max}, p^k <= {order})", max = MAX_DEGREE, order = MAX_ORDER)]
    DegreeOutOfRange { k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("frobenius conjugation needs an even extension degree, got {0}")]
    OddExtensionDegree(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k`, if it is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// The finite field GF(p^k). Immutable after construction.
#[derive(Clone)]
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, coefficients low degree first, length `k + 1`.
    modulus: Vec<u32>,
    add: Option<Vec<Elem>>,
    neg: Vec<Elem>,
    mul: Option<Vec<Elem>>,
    inv: Option<Vec<Elem>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.describe())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl Field {
    /// Builds GF(p^k) with the lexicographically smallest monic irreducible
    /// modulus (coefficients compared from the constant term upwards).
    pub fn new(p: u32, k: u32) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NonPrimeCharacteristic(p));
        }
        if k == 0 || k > MAX_DEGREE {
            return Err(GfError::DegreeOutOfRange { k });
        }
        let q = (p as u64).pow(k);
        if q > MAX_ORDER as u64 {
            return Err(GfError::DegreeOutOfRange { k });
        }
        let q = q as u32;
        let modulus = smallest_irreducible(p, k);

        let digits = |a: u32| to_digits(a, p, k);
        let neg: Vec<Elem> = (0..q)
            .map(|a| {
                let d: Vec<u32> = digits(a).iter().map(|c| (p - c) % p).collect();
                from_digits(&d, p)
            })
            .collect();

        let mut field = Field {
            p,
            k,
            q,
            modulus,
            add: None,
            neg,
            mul: None,
            inv: None,
        };
        if q <= TABLE_LIMIT {
            let add = (0..q * q).map(|i| field.poly_add(i / q, i % q)).collect();
            field.add = Some(add);
            let mut mul = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    mul.push(field.poly_mul(a, b));
                }
            }
            let mut inv = vec![0; q as usize];
            for a in 1..q {
                let b = (1..q)
                    .find(|&b| mul[(a * q + b) as usize] == 1)
                    .expect("field has inverses");
                inv[a as usize] = b;
            }
            field.mul = Some(mul);
            field.inv = Some(inv);
        }
        Ok(field)
    }

    /// Builds GF(q) for a prime power `q`.
    pub fn of_order(q: u32) -> Result<Self, GfError> {
        let (p, k) = prime_power(q).ok_or(GfError::NotPrimePower(q))?;
        Field::new(p, k)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.add {
            Some(t) => t[(a * self.q + b) as usize],
            None => self.poly_add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.mul {
            Some(t) => t[(a * self.q + b) as usize],
            None => self.poly_mul(a, b),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        Ok(match &self.inv {
            Some(t) => t[a as usize],
            // a^(q-2) = a^-1
            None => self.pow(a, (self.q - 2) as u64),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Conjugation `a -> a^r` of GF(r^2) over its subfield GF(r).
    pub fn frobenius(&self, a: Elem) -> Result<Elem, GfError> {
        if !self.k.is_multiple_of(2) {
            return Err(GfError::OddExtensionDegree(self.k));
        }
        Ok(self.pow(a, self.subfield_order() as u64))
    }

    /// Order `r` of the subfield when this field is GF(r^2).
    pub fn subfield_order(&self) -> u32 {
        self.p.pow(self.k / 2)
    }

    /// Returns true if `x^2 + b x + c` has no root in the field.
    pub fn quadratic_is_irreducible(&self, b: Elem, c: Elem) -> bool {
        self.elements()
            .all(|x| self.add(self.add(self.mul(x, x), self.mul(b, x)), c) != 0)
    }

    /// Human-readable field description, e.g. `x^2+x+1 over GF(2)`.
    pub fn describe(&self) -> String {
        if self.k == 1 {
            return format!("GF({})", self.p);
        }
        format!("{} over GF({})", format_poly(&self.modulus), self.p)
    }

    fn poly_add(&self, a: Elem, b: Elem) -> Elem {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let da = to_digits(a, self.p, self.k);
        let db = to_digits(b, self.p, self.k);
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        from_digits(&s, self.p)
    }

    fn poly_mul(&self, a: Elem, b: Elem) -> Elem {
        let (p, k) = (self.p, self.k as usize);
        let da = to_digits(a, p, self.k);
        let db = to_digits(b, p, self.k);
        let mut prod = vec![0u32; 2 * k - 1];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        reduce(&mut prod, &self.modulus, p);
        from_digits(&prod[..k], p)
    }
}

fn to_digits(mut a: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Reduces `poly` in place modulo a monic `modulus`.
fn reduce(poly: &mut [u32], modulus: &[u32], p: u32) {
    let deg = modulus.len() - 1;
    for i in (deg..poly.len()).rev() {
        let c = poly[i];
        if c == 0 {
            continue;
        }
        for (j, m) in modulus.iter().enumerate() {
            let idx = i - deg + j;
            poly[idx] = (poly[idx] + (p - c) * m) % p;
        }
    }
}

/// Remainder of `a` modulo monic `b` over GF(p). Both low degree first.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    if r.len() >= b.len() {
        reduce(&mut r, b, p);
        r.truncate(b.len() - 1);
    }
    r
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = p.pow(k);
    // Counting with the constant term as the most significant digit gives
    // the low-degree-first lexicographic order.
    (0..count)
        .map(|n| {
            let mut coeffs: Vec<u32> = to_digits(n, p, k).into_iter().rev().collect();
            coeffs.push(1);
            coeffs
        })
        .find(|m| is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub(crate) fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        for n in 0..p.pow(d as u32) {
            let mut f = to_digits(n, p, d as u32);
            f.push(1);
            if poly_rem(modulus, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn format_poly(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    terms.join("+")
}
