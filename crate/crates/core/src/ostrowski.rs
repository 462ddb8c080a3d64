//! Ostrowski numeration with respect to a continued fraction.
//!
//! Polynomials of degree below `deg Q_{k+1}` decompose uniquely as
//! `Σ B_{i+1} Q_i` with `deg B_i < deg A_i`, and every `β` with `‖β‖ < 1` has
//! an expansion `β = Σ σ_{k+1} D_k` with `deg σ_i < deg A_i`. A digit prefix
//! of length `n` pins `β` to a closed ball of radius `q^(-deg Q_n - 1)`.

use crate::contfrac::CfExpansion;
use crate::error::{check_budget, Error, Result, SCAN_CAP};
use crate::field::Field;
use crate::laurent::{Laurent, NormExp};
use crate::poly::Poly;

/// Extra coefficients carried below the radius when materializing a cylinder center.
pub const CENTER_MARGIN: i64 = 16;

/// Digits `σ_1, ..., σ_n` of an expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OstrowskiDigits {
    pub digits: Vec<Poly>,
}

/// The set of `β` whose expansion starts with `prefix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    pub prefix: Vec<Poly>,
    pub center: Laurent,
    /// The ball is `{β : ‖β - center‖ <= q^radius_exp}`.
    pub radius_exp: i64,
}

impl Cylinder {
    pub fn contains(&self, beta: &Laurent, f: &Field) -> Result<bool> {
        let diff = beta.sub(&self.center, f);
        match diff.norm() {
            Ok(v) => Ok(v <= NormExp::Fin(self.radius_exp)),
            Err(_) if diff.prec() >= -self.radius_exp => Ok(true),
            Err(e) => Err(e),
        }
    }
}

/// Greedy decomposition `Q = B_1 Q_0 + ... + B_{k+1} Q_k`.
pub fn decompose_poly(q: &Poly, cf: &mut CfExpansion, k: usize, f: &Field) -> Result<Vec<Poly>> {
    cf.ensure(k + 1, f)?;
    if cf.len() < k + 1 {
        return Err(Error::CfTooShort { needed: k + 1, available: cf.len() });
    }
    let bound = cf.deg_q(k + 1);
    if q.deg_or_neg() >= bound as i64 {
        return Err(Error::DepthTooSmall { deg: q.deg().unwrap_or(0), bound });
    }
    let mut digits = vec![Poly::zero(); k + 1];
    let mut rest = q.clone();
    for j in (0..=k).rev() {
        let (b, r) = rest.divmod(cf.q(j), f)?;
        digits[j] = b;
        rest = r;
    }
    debug_assert!(rest.is_zero());
    Ok(digits)
}

/// `Σ B_{i+1} Q_i`.
pub fn recompose_poly(digits: &[Poly], cf: &CfExpansion, f: &Field) -> Poly {
    digits.iter().enumerate().fold(Poly::zero(), |acc, (i, b)| acc.add(&b.mul(cf.q(i), f), f))
}

/// `Σ_{k < n} σ_{k+1} D_k` known down to `z^-prec`.
pub fn reconstruct(digits: &[Poly], cf: &mut CfExpansion, prec: i64, f: &Field) -> Result<Laurent> {
    let mut acc = Laurent::zero();
    for (k, s) in digits.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        let dk = cf.d(k, prec + s.deg_or_neg().max(0), f)?;
        acc = acc.add(&dk.mul_poly(s, f), f);
    }
    Ok(if acc.is_exact() { acc } else { acc.truncate(prec) })
}

/// The first `depth` Ostrowski digits of `β`, by greedy elimination of the
/// leading coefficient block by block.
pub fn expand_beta(beta: &Laurent, cf: &mut CfExpansion, depth: usize, f: &Field) -> Result<OstrowskiDigits> {
    if let Ok(NormExp::Fin(t)) = beta.norm() {
        if t >= 0 {
            return Err(Error::OutsideUnitBall);
        }
    }
    cf.ensure(depth + 1, f)?;
    if cf.len() < depth {
        return Err(Error::CfTooShort { needed: depth, available: cf.len() });
    }
    // a digit at index n moves coefficients down to z^-deg Q_n; ask for one more level
    let needed = if cf.len() > depth { cf.deg_q(depth + 1) } else { cf.deg_q(depth) } as i64;
    if beta.prec() < needed {
        return Err(Error::PrecisionExceeded { needed, available: beta.prec() });
    }
    let work_prec = cf.deg_q(depth) as i64;
    let max_a = (1..=depth).map(|i| cf.a(i).deg().unwrap()).max().unwrap_or(0) as i64;
    let mut cur = beta.truncate(work_prec);
    let mut digits = Vec::with_capacity(depth);
    for k in 0..depth {
        let dk = cf.d(k, work_prec + max_a, f)?;
        let lead = dk.coeff(-(cf.deg_q(k + 1) as i64))?;
        let lead_inv = f.inv(lead);
        let da = cf.a(k + 1).deg().unwrap();
        let dq = cf.deg_q(k) as i64;
        let mut sigma = vec![crate::Fq::ZERO; da];
        // block k covers positions -deg Q_k - 1 down to -deg Q_{k+1}
        for i in (0..da).rev() {
            let pos = i as i64 - cf.deg_q(k + 1) as i64;
            debug_assert!(pos < -dq);
            let c = cur.coeff(pos)?;
            if c.is_zero() {
                continue;
            }
            let t = f.mul(c, lead_inv);
            sigma[i] = t;
            let term = dk.shift(i as i64).scale(t, f);
            cur = cur.sub(&term, f);
        }
        digits.push(Poly::from_coeffs(sigma));
    }
    Ok(OstrowskiDigits { digits })
}

/// The cylinder of a digit prefix.
pub fn cylinder_of(prefix: &[Poly], cf: &mut CfExpansion, f: &Field) -> Result<Cylinder> {
    let n = prefix.len();
    cf.ensure(n, f)?;
    if cf.len() < n {
        return Err(Error::CfTooShort { needed: n, available: cf.len() });
    }
    for (i, s) in prefix.iter().enumerate() {
        let bound = cf.a(i + 1).deg().unwrap();
        if s.deg_or_neg() >= bound as i64 {
            return Err(Error::InvalidPrefix { index: i + 1, deg: s.deg().unwrap_or(0), bound });
        }
    }
    let radius_exp = -(cf.deg_q(n) as i64) - 1;
    let center = reconstruct(prefix, cf, -radius_exp + CENTER_MARGIN, f)?;
    Ok(Cylinder { prefix: prefix.to_vec(), center, radius_exp })
}

/// Every element of `L_n(α)` in lexicographic order; there are `q^deg Q_n`.
pub fn enumerate_prefixes(cf: &mut CfExpansion, n: usize, f: &Field) -> Result<Vec<Vec<Poly>>> {
    cf.ensure(n, f)?;
    if cf.len() < n {
        return Err(Error::CfTooShort { needed: n, available: cf.len() });
    }
    let total = (f.q() as u128).checked_pow(cf.deg_q(n) as u32).unwrap_or(u128::MAX);
    check_budget("prefix enumeration", total, SCAN_CAP)?;
    let mut out: Vec<Vec<Poly>> = vec![Vec::new()];
    for i in 1..=n {
        let choices: Vec<Poly> = Poly::all_below(f, cf.a(i).deg().unwrap()).collect();
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for p in &out {
            for c in &choices {
                let mut v = p.clone();
                v.push(c.clone());
                next.push(v);
            }
        }
        out = next;
    }
    Ok(out)
}
