//! Shared generators and brute-force oracles for the integration suites.
#![allow(dead_code)]

use ffda::contfrac::{CfExpansion, CfSource, DegRule, QuotientSpec};
use ffda::text::parse_field;
use ffda::{Field, Fq, Laurent, LaurentMatrix, NormExp, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn field(q: u32) -> Field {
    match q {
        4 => parse_field("q=2^2;mod=[1,1,1]").unwrap(),
        p => Field::prime(p).unwrap(),
    }
}

pub fn all_z(f: &Field) -> CfExpansion {
    CfExpansion::new(CfSource::Quotients(QuotientSpec::all_z()), f).unwrap()
}

/// `deg A_k = k`, monomial partial quotients.
pub fn growing(f: &Field) -> CfExpansion {
    CfExpansion::new(CfSource::Quotients(QuotientSpec::monomials(DegRule::parse("k").unwrap())), f).unwrap()
}

pub fn elem(r: &mut ChaCha8Rng, f: &Field) -> Fq {
    Fq(r.random_range(0..f.q()))
}

pub fn nonzero_elem(r: &mut ChaCha8Rng, f: &Field) -> Fq {
    Fq(r.random_range(1..f.q()))
}

/// Uniform polynomial of degree `< d`.
pub fn poly_below(r: &mut ChaCha8Rng, d: usize, f: &Field) -> Poly {
    Poly::from_coeffs((0..d).map(|_| elem(r, f)).collect())
}

/// Monic polynomial of degree exactly `d`.
pub fn monic(r: &mut ChaCha8Rng, d: usize, f: &Field) -> Poly {
    let mut c: Vec<Fq> = (0..d).map(|_| elem(r, f)).collect();
    c.push(Fq::ONE);
    Poly::from_coeffs(c)
}

/// A series in the open unit ball known to `z^-prec`.
pub fn unit_series(r: &mut ChaCha8Rng, prec: i64, f: &Field) -> Laurent {
    let c: Vec<Fq> = (0..prec).map(|_| elem(r, f)).collect();
    Laurent::from_parts(-1, c, prec, false)
}

pub fn unit_matrix(r: &mut ChaCha8Rng, n: usize, m: usize, prec: i64, f: &Field) -> LaurentMatrix {
    LaurentMatrix::new(n, m, (0..n * m).map(|_| unit_series(r, prec, f)).collect()).unwrap()
}

/// Every polynomial of degree `<= d` (including zero).
pub fn polys_upto(d: usize, f: &Field) -> Vec<Poly> {
    Poly::all_below(f, d + 1).collect()
}

/// Every vector of `k` polynomials of degree `<= d`.
pub fn vectors_upto(k: usize, d: usize, f: &Field) -> Vec<Vec<Poly>> {
    let ps = polys_upto(d, f);
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                ps.iter().map(move |p| {
                    let mut w = v.clone();
                    w.push(p.clone());
                    w
                })
            })
            .collect();
    }
    out
}

pub fn vec_deg(v: &[Poly]) -> i64 {
    v.iter().map(|p| p.deg_or_neg()).max().unwrap_or(-1)
}

/// `|<Σ_j a_ij x_j - θ_i>|` computed coordinate by coordinate with plain
/// series arithmetic, independently of the enumeration kernel.
pub fn naive_dist(a: &LaurentMatrix, x: &[Poly], theta: Option<&[Laurent]>, f: &Field) -> Option<NormExp> {
    let mut worst = NormExp::NegInf;
    for i in 0..a.rows() {
        let mut acc = match theta {
            Some(t) => t[i].neg(f),
            None => Laurent::zero(),
        };
        for (j, xj) in x.iter().enumerate() {
            acc = acc.add(&a.get(i, j).mul_poly(xj, f), f);
        }
        {
            let e = acc.frac_norm().ok()??;
            worst = worst.max(e)
        }
    }
    Some(worst)
}
