use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order supported; elements are stored as `u8` encodings.
pub const MAX_ORDER: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0:?} is not monic of degree >= 1")]
    BadModulus(Vec<u32>),
    #[error("modulus {0:?} is reducible over GF({1})")]
    Reducible(Vec<u32>, u32),
    #[error("field of order {0} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge(u64),
    #[error("no built-in defining polynomial for GF({0}); supply a modulus")]
    UnknownField(u64),
    #[error("cannot parse field name {0:?}")]
    BadName(String),
    #[error("coefficient {0} is out of range for characteristic {1}")]
    OutOfRange(u64, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
}

/// Description of GF(p^n): characteristic, degree and a monic irreducible
/// modulus (little-endian coefficients, length n+1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    pub modulus: Vec<u32>,
}

// Conway polynomials, little-endian.
const BUILTIN: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
];

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldSpec { p, n: 1, modulus: vec![0, 1] })
    }

    /// GF(q) from the built-in table (prime q needs no table).
    pub fn of_order(q: u64) -> Result<Self, FieldError> {
        if q > MAX_ORDER as u64 {
            return Err(FieldError::TooLarge(q));
        }
        if q <= u32::MAX as u64 && is_prime(q as u32) {
            return Self::prime(q as u32);
        }
        BUILTIN
            .iter()
            .find(|(p, n, _)| (*p as u64).pow(*n) == q)
            .map(|(p, n, m)| FieldSpec { p: *p, n: *n, modulus: m.to_vec() })
            .ok_or(FieldError::UnknownField(q))
    }

    /// Extension field with a user supplied modulus; irreducibility is checked.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(FieldError::BadModulus(modulus));
        }
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(FieldError::OutOfRange(c as u64, p));
        }
        let n = (modulus.len() - 1) as u32;
        let q = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
        if q > MAX_ORDER as u64 {
            return Err(FieldError::TooLarge(q));
        }
        if n == 1 {
            // any monic linear polynomial defines the prime field
            return Ok(FieldSpec { p, n: 1, modulus: vec![0, 1] });
        }
        if !poly_irreducible(p, &modulus) {
            return Err(FieldError::Reducible(modulus, p));
        }
        Ok(FieldSpec { p, n, modulus })
    }

    pub fn order(&self) -> usize {
        (self.p as usize).pow(self.n)
    }
}

impl std::str::FromStr for FieldSpec {
    type Err = FieldError;

    /// Accepts `GF4`, `GF(4)`, `gf9`, or a bare order such as `3`.
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let t = s.trim();
        let digits = t
            .strip_prefix("GF")
            .or_else(|| t.strip_prefix("gf"))
            .unwrap_or(t)
            .trim_start_matches('(')
            .trim_end_matches(')');
        let q: u64 = digits.parse().map_err(|_| FieldError::BadName(s.to_string()))?;
        Self::of_order(q)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order())
    }
}

fn poly_rem(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    // b monic
    let mut r = a.to_vec();
    while r.len() >= b.len() {
        let lead = *r.last().unwrap();
        let shift = r.len() - b.len();
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree <= n/2.
fn poly_irreducible(p: u32, modulus: &[u32]) -> bool {
    let n = modulus.len() - 1;
    for d in 1..=n / 2 {
        let count = (p as usize).pow(d as u32);
        for code in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                cand.push((c % p as usize) as u32);
                c /= p as usize;
            }
            cand.push(1);
            if poly_rem(p, modulus, &cand).is_empty() {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Prime,
    Char2,
    General,
}

pub(crate) struct Tables {
    pub(crate) spec: FieldSpec,
    pub(crate) q: usize,
    pub(crate) kind: Kind,
    pub(crate) add: Vec<u8>,
    pub(crate) mul: Vec<u8>,
    pub(crate) neg: Vec<u8>,
    pub(crate) inv: Vec<u8>,
}

/// A finite field with precomputed arithmetic tables. Cloning is cheap.
#[derive(Clone)]
pub struct Field(pub(crate) Arc<Tables>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.spec)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.spec)
    }
}

impl Field {
    pub fn new(spec: FieldSpec) -> Field {
        let p = spec.p as usize;
        let n = spec.n as usize;
        let q = spec.order();
        assert!(q <= MAX_ORDER, "field order {q} unsupported");
        let digits = |mut v: usize| -> Vec<usize> {
            (0..n)
                .map(|_| {
                    let d = v % p;
                    v /= p;
                    d
                })
                .collect()
        };
        let encode = |ds: &[usize]| -> usize { ds.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = encode(&sum) as u8;
                // schoolbook product then reduce by the monic modulus
                let mut prod = vec![0usize; 2 * n];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for k in (n..2 * n).rev() {
                    let lead = prod[k];
                    if lead != 0 {
                        for (i, &c) in spec.modulus.iter().enumerate().take(n) {
                            let idx = k - n + i;
                            prod[idx] = (prod[idx] + p * p - lead * c as usize % p) % p;
                        }
                        prod[k] = 0;
                    }
                }
                mul[a * q + b] = encode(&prod[..n]) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (0..q).find(|&b| mul[a * q + b] == 1).expect("modulus must be irreducible") as u8;
            }
        }
        let kind = if n == 1 {
            Kind::Prime
        } else if p == 2 {
            Kind::Char2
        } else {
            Kind::General
        };
        Field(Arc::new(Tables { spec, q, kind, add, mul, neg, inv }))
    }

    pub fn prime(p: u32) -> Result<Field, FieldError> {
        Ok(Field::new(FieldSpec::prime(p)?))
    }

    pub fn of_order(q: u64) -> Result<Field, FieldError> {
        Ok(Field::new(FieldSpec::of_order(q)?))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }
    pub fn characteristic(&self) -> u32 {
        self.0.spec.p
    }
    pub fn degree(&self) -> u32 {
        self.0.spec.n
    }
    pub fn order(&self) -> usize {
        self.0.q
    }
    pub(crate) fn kind(&self) -> Kind {
        self.0.kind
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.0.add[a as usize * self.0.q + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.0.mul[a as usize * self.0.q + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.0.neg[a as usize]
    }
    /// Inverse of a nonzero element; panics on zero (use [`Elem`] for a checked version).
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero");
        self.0.inv[a as usize]
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> u8 {
        v.rem_euclid(self.0.spec.p as i64) as u8
    }

    /// Encoding from little-endian coefficients over GF(p).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<u8, FieldError> {
        let p = self.0.spec.p;
        if coeffs.len() > self.0.spec.n as usize {
            return Err(FieldError::OutOfRange(coeffs.len() as u64, p));
        }
        let mut v = 0usize;
        for &c in coeffs.iter().rev() {
            if c >= p {
                return Err(FieldError::OutOfRange(c as u64, p));
            }
            v = v * p as usize + c as usize;
        }
        Ok(v as u8)
    }

    pub fn coeffs(&self, a: u8) -> Vec<u32> {
        let p = self.0.spec.p as usize;
        let mut v = a as usize;
        (0..self.0.spec.n)
            .map(|_| {
                let d = v % p;
                v /= p;
                d as u32
            })
            .collect()
    }

    pub fn elem(&self, v: u8) -> Elem {
        assert!((v as usize) < self.0.q);
        Elem { field: self.clone(), value: v }
    }

    /// `dst += c * src`, elementwise.
    #[inline]
    pub fn axpy(&self, dst: &mut [u8], c: u8, src: &[u8]) {
        debug_assert_eq!(dst.len(), src.len());
        if c == 0 {
            return;
        }
        let q = self.0.q;
        match self.0.kind {
            Kind::Prime if q == 2 => {
                for (d, s) in dst.iter_mut().zip(src) {
                    *d ^= s;
                }
            }
            Kind::Prime => {
                let p = q as u16;
                let c = c as u16;
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = ((*d as u16 + c * *s as u16) % p) as u8;
                }
            }
            Kind::Char2 => {
                let row = &self.0.mul[c as usize * q..(c as usize + 1) * q];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d ^= row[*s as usize];
                }
            }
            Kind::General => {
                let row = &self.0.mul[c as usize * q..(c as usize + 1) * q];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = self.0.add[*d as usize * q + row[*s as usize] as usize];
                }
            }
        }
    }

    /// `row *= c`.
    #[inline]
    pub fn scale(&self, row: &mut [u8], c: u8) {
        let q = self.0.q;
        let t = &self.0.mul[c as usize * q..(c as usize + 1) * q];
        for x in row.iter_mut() {
            *x = t[*x as usize];
        }
    }
}

/// A field element that remembers its field, for checked arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct Elem {
    field: Field,
    value: u8,
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{:?}", self.field.coeffs(self.value))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Neg,
}

impl Elem {
    pub fn value(&self) -> u8 {
        self.value
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same(&self, other: &Elem) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Elem) -> Result<Elem, FieldError> {
        self.same(other)?;
        Ok(self.field.elem(self.field.add(self.value, other.value)))
    }
    pub fn mul(&self, other: &Elem) -> Result<Elem, FieldError> {
        self.same(other)?;
        Ok(self.field.elem(self.field.mul(self.value, other.value)))
    }
    pub fn neg(&self) -> Elem {
        self.field.elem(self.field.neg(self.value))
    }
    pub fn inv(&self) -> Result<Elem, FieldError> {
        if self.value == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.field.elem(self.field.inv(self.value)))
    }
}

/// Exact arithmetic entry point: binary ops use `b`, unary ops ignore it.
pub fn field_arith(a: &Elem, b: &Elem, op: FieldOp) -> Result<Elem, FieldError> {
    match op {
        FieldOp::Add => a.add(b),
        FieldOp::Mul => a.mul(b),
        FieldOp::Inv => a.inv(),
        FieldOp::Neg => Ok(a.neg()),
    }
}
