//! The coefficient field F_q, q = p^e.
//!
//! Elements are stored as an index in `0..q` whose base-p digits are the
//! coordinates of the element in the power basis `1, g, g^2, ...` of
//! F_p[g]/(modulus). For `e = 1` the index is simply the residue mod p.
//! All arithmetic goes through precomputed tables, so a [`Field`] is built
//! once and shared by reference.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported field order. Tables are `q * q` entries.
pub const MAX_ORDER: u32 = 1024;

/// An element of F_q, identified by its index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fq(pub u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Description of the field: characteristic, degree, and defining modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    /// Coefficients `[c0, ..., ce]` of the monic modulus over F_p, low to high.
    /// Empty when `e = 1`.
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn prime(p: u32) -> Self {
        FieldSpec { p, e: 1, modulus: Vec::new() }
    }

    pub fn extension(p: u32, modulus: Vec<u32>) -> Self {
        let e = modulus.len().saturating_sub(1) as u32;
        FieldSpec { p, e, modulus }
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }
}

/// The finite field with its arithmetic tables.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(q={}", self.q)?;
        if self.spec.e > 1 {
            write!(f, ", mod={:?}", self.spec.modulus)?;
        }
        write!(f, ")")
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Product of two polynomials over F_p, low-to-high coefficient vectors.
fn fp_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|v| v as u32).collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m` over F_p.
fn fp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = (lead as u64 * c as u64) % p as u64;
                r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
            }
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    r
}

/// Irreducibility over F_p by trial division with every monic polynomial of
/// degree `1..=deg/2`.
fn fp_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut v = idx;
            for _ in 0..d {
                cand.push((v % p as u64) as u32);
                v /= p as u64;
            }
            cand.push(1);
            if fp_rem(m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let FieldSpec { p, e, .. } = spec;
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q64 = spec.order();
        if q64 > MAX_ORDER as u64 {
            return Err(Error::InvalidField(format!("q = {q64} exceeds the supported maximum {MAX_ORDER}")));
        }
        let q = q64 as u32;
        let e = e as usize;
        let mut spec = spec;
        if e == 1 {
            spec.modulus.clear();
        } else {
            let m = &spec.modulus;
            if m.len() != e + 1 {
                return Err(Error::InvalidField(format!("modulus must have {} coefficients", e + 1)));
            }
            if m.iter().any(|&c| c >= p) {
                return Err(Error::InvalidField("modulus coefficients must lie in [0, p)".into()));
            }
            if m[e] != 1 {
                return Err(Error::InvalidField("modulus must be monic".into()));
            }
            if !fp_irreducible(m, p) {
                return Err(Error::InvalidField(format!("modulus {m:?} is reducible over F_{p}")));
            }
        }

        let digits = |mut v: u32| -> Vec<u32> {
            let mut d = Vec::with_capacity(e);
            for _ in 0..e {
                d.push(v % p);
                v /= p;
            }
            d
        };
        let index = |d: &[u32]| -> u32 { d.iter().rev().fold(0u32, |acc, &x| acc * p + x) };

        let qs = q as usize;
        let mut add = vec![0u32; qs * qs];
        let mut mul = vec![0u32; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = index(&s);
                let prod = if e == 1 {
                    vec![((a as u64 * b as u64) % p as u64) as u32]
                } else {
                    let mut r = fp_rem(&fp_mul(&trim(&da), &trim(&db), p), &spec.modulus, p);
                    r.resize(e, 0);
                    r
                };
                mul[a as usize * qs + b as usize] = index(&prod);
            }
        }
        let mut neg = vec![0u32; qs];
        let mut inv = vec![0u32; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as u32;
                }
                if mul[a * qs + b] == 1 {
                    inv[a] = b as u32;
                }
            }
        }
        Ok(Field { spec, q, add, mul, neg, inv })
    }

    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(FieldSpec::prime(p))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.spec.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.spec.e
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.add[(a.0 * self.q + b.0) as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        Fq(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.mul[(a.0 * self.q + b.0) as usize])
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Fq) -> Fq {
        assert!(!a.is_zero(), "inverse of zero in F_q");
        Fq(self.inv[a.0 as usize])
    }

    pub fn try_inv(&self, a: Fq) -> Result<Fq> {
        if a.is_zero() {
            Err(Error::DivideByZero)
        } else {
            Ok(self.inv(a))
        }
    }

    #[inline]
    pub fn div(&self, a: Fq, b: Fq) -> Fq {
        self.mul(a, self.inv(b))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.spec.p as i64) as u32)
    }

    /// (-1)^k in F_q.
    pub fn sign(&self, k: usize) -> Fq {
        if k.is_multiple_of(2) {
            Fq::ONE
        } else {
            self.neg(Fq::ONE)
        }
    }

    /// Element with the given base-p digits (low to high); missing digits are zero.
    pub fn from_digits(&self, digits: &[u32]) -> Result<Fq> {
        let p = self.spec.p;
        if digits.len() > self.spec.e as usize || digits.iter().any(|&d| d >= p) {
            return Err(Error::Parse(format!("{digits:?} is not a valid element of F_{}", self.q)));
        }
        Ok(Fq(digits.iter().rev().fold(0u32, |acc, &x| acc * p + x)))
    }

    pub fn digits(&self, a: Fq) -> Vec<u32> {
        let p = self.spec.p;
        let mut v = a.0;
        (0..self.spec.e)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q).map(Fq)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fq> {
        (1..self.q).map(Fq)
    }
}

fn trim(v: &[u32]) -> Vec<u32> {
    let mut v = v.to_vec();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}
