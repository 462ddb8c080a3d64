//! Polynomials over F_q.

use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::laurent::NormExp;

/// A polynomial in F_q[z], coefficients lowest degree first, with no trailing
/// zero coefficients. The zero polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<Fq>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Fq::ONE] }
    }

    /// The indeterminate `z`.
    pub fn z() -> Self {
        Poly::monomial(Fq::ONE, 1)
    }

    pub fn constant(c: Fq) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * z^d`.
    pub fn monomial(c: Fq, d: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Fq::ZERO; d + 1];
        coeffs[d] = c;
        Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fq> {
        self.coeffs
    }

    /// Coefficient of `z^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fq::ONE
    }

    /// Degree, `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`, convenient for bounds
    /// such as `deg B < deg A`.
    pub fn deg_or_neg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    /// The norm exponent `‖f‖ = q^deg f`.
    pub fn norm(&self) -> NormExp {
        match self.deg() {
            Some(d) => NormExp::Fin(d as i64),
            None => NormExp::NegInf,
        }
    }

    pub fn lead(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fq::ONE
    }

    pub fn add(&self, other: &Poly, f: &Field) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Poly::from_coeffs(out)
    }

    pub fn sub(&self, other: &Poly, f: &Field) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let out = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Poly::from_coeffs(out)
    }

    pub fn neg(&self, f: &Field) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: Fq, f: &Field) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Fq::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn mul(&self, other: &Poly, f: &Field) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fq::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Euclidean division: returns `(s, r)` with `self = s * g + r` and `deg r < deg g`.
    pub fn divmod(&self, g: &Poly, f: &Field) -> Result<(Poly, Poly)> {
        let dg = g.deg().ok_or(Error::DivideByZero)?;
        let mut r = self.coeffs.clone();
        if r.len() <= dg {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv_lead = f.inv(g.lead());
        let mut s = vec![Fq::ZERO; r.len() - dg];
        for i in (dg..r.len()).rev() {
            let c = f.mul(r[i], inv_lead);
            if c.is_zero() {
                continue;
            }
            s[i - dg] = c;
            for (j, &b) in g.coeffs.iter().enumerate() {
                let idx = i - dg + j;
                r[idx] = f.sub(r[idx], f.mul(c, b));
            }
        }
        Ok((Poly::from_coeffs(s), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, g: &Poly, f: &Field) -> Result<Poly> {
        Ok(self.divmod(g, f)?.1)
    }

    /// Monic greatest common divisor (zero if both inputs vanish).
    pub fn gcd(&self, other: &Poly, f: &Field) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Scalar multiple with leading coefficient one (zero stays zero).
    pub fn monic(&self, f: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.lead()), f)
    }

    /// Iterator over every polynomial of degree `< d` (`q^d` of them), in
    /// lexicographic order of the coefficient string read from the top
    /// coefficient down.
    pub fn all_below(f: &Field, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = f.q() as u64;
        let total = q.checked_pow(d as u32).unwrap_or(u64::MAX);
        (0..total).map(move |mut idx| {
            let mut coeffs = vec![Fq::ZERO; d];
            for c in coeffs.iter_mut() {
                *c = Fq((idx % q) as u32);
                idx /= q;
            }
            Poly::from_coeffs(coeffs)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use proptest::prelude::*;

    fn p(v: &[u32]) -> Poly {
        Poly::from_coeffs(v.iter().map(|&c| Fq(c)).collect())
    }

    #[test]
    fn degree_and_norm() {
        assert_eq!(Poly::zero().deg(), None);
        assert_eq!(Poly::zero().norm(), NormExp::NegInf);
        assert_eq!(p(&[1, 0, 1, 0, 0]).deg(), Some(2));
        assert_eq!(p(&[0, 1]).norm(), NormExp::Fin(1));
    }

    #[test]
    fn char_two_square() {
        let f = Field::prime(2).unwrap();
        let a = p(&[1, 1]);
        assert_eq!(a.mul(&a, &f), p(&[1, 0, 1]));
    }

    #[test]
    fn gcd_basics() {
        let f = Field::prime(3).unwrap();
        let a = p(&[2, 0, 1]); // z^2 - 1
        let b = p(&[1, 1]); // z + 1
        assert_eq!(a.gcd(&b, &f), p(&[1, 1]));
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[0, 1]), &f), Poly::one());
        assert!(a.divmod(&Poly::zero(), &f).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let f = Field::prime(3).unwrap();
        let all: Vec<Poly> = Poly::all_below(&f, 2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], Poly::zero());
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 9);
    }

    fn arb_poly(q: u32, max_len: usize) -> impl Strategy<Value = Poly> {
        proptest::collection::vec(0..q, 0..max_len).prop_map(|v| Poly::from_coeffs(v.into_iter().map(Fq).collect()))
    }

    fn field_for(q: u32) -> Field {
        match q {
            4 => Field::new(FieldSpec::extension(2, vec![1, 1, 1])).unwrap(),
            9 => Field::new(FieldSpec::extension(3, vec![1, 0, 1])).unwrap(),
            _ => Field::prime(q).unwrap(),
        }
    }

    proptest! {
        #[test]
        fn degree_is_additive((q, a, b) in prop::sample::select(vec![2u32, 3, 4, 5, 9])
            .prop_flat_map(|q| (Just(q), arb_poly(q, 8), arb_poly(q, 8))))
        {
            let f = field_for(q);
            let prod = a.mul(&b, &f);
            match (a.deg(), b.deg()) {
                (Some(x), Some(y)) => prop_assert_eq!(prod.deg(), Some(x + y)),
                _ => prop_assert!(prod.is_zero()),
            }
            if !b.is_zero() {
                let (s, r) = a.divmod(&b, &f).unwrap();
                prop_assert_eq!(s.mul(&b, &f).add(&r, &f), a.clone());
                prop_assert!(r.deg_or_neg() < b.deg_or_neg());
            }
        }

        #[test]
        fn ring_laws_f2(a in arb_poly(2, 10), b in arb_poly(2, 10), c in arb_poly(2, 10)) {
            let f = Field::prime(2).unwrap();
            prop_assert_eq!(a.mul(&b.add(&c, &f), &f), a.mul(&b, &f).add(&a.mul(&c, &f), &f));
            prop_assert_eq!(a.sub(&a, &f), Poly::zero());
            let g = a.gcd(&b, &f);
            if !g.is_zero() {
                prop_assert!(a.rem(&g, &f).unwrap().is_zero());
                prop_assert!(b.rem(&g, &f).unwrap().is_zero());
            }
        }
    }
}
