//! Dirichlet solutions, best approximations and exponent witnesses.
//!
//! Conventions: `A` is `n x m` (`rows x cols`). Inhomogeneous problems look for
//! `x in F_q[z]^m` with `|<A x - θ>|` small; best approximations concern the
//! transposed forms `M(y) = |<A^T y>|` for `y in F_q[z]^n`.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::kernel::{shell_minima, Dist, Forms};
use crate::laurent::{bracket_dist, polyvec_norm, Laurent, LaurentMatrix, NormExp, PolyVec};
use crate::poly::Poly;

/// `M(y) = |<A^T y>|` by direct Laurent arithmetic.
pub fn eval_m(a: &LaurentMatrix, y: &[Poly], f: &Field) -> Result<NormExp> {
    bracket_dist(&a.apply_t(y, f)?)
}

/// `|<A x - θ>|` by direct Laurent arithmetic (`θ = None` means zero).
pub fn eval_dist(a: &LaurentMatrix, x: &[Poly], theta: Option<&[Laurent]>, f: &Field) -> Result<NormExp> {
    let mut v = a.apply(x, f)?;
    if let Some(t) = theta {
        if t.len() != v.len() {
            return Err(Error::DimensionMismatch(format!("target of length {} for {} rows", t.len(), v.len())));
        }
        for (vi, ti) in v.iter_mut().zip(t) {
            *vi = vi.sub(ti, f);
        }
    }
    bracket_dist(&v)
}

/// A Dirichlet vector `u != 0` with `|<A u>| < q^(-c m / n)` and `‖u‖ <= q^c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletSolution {
    pub u: PolyVec,
    pub norm: NormExp,
    /// Distance exponent; `None` means below `q^dist_bound` (undetermined further).
    pub dist: Dist,
    pub dist_bound: i64,
}

/// Does a distance exponent `e` satisfy `e * n < -c * m`?
fn dirichlet_pass(dist: Dist, bound: i64, c: i64, m: i64, n: i64) -> Option<bool> {
    match dist {
        Some(NormExp::NegInf) => Some(true),
        Some(NormExp::Fin(e)) => Some(e * n < -c * m),
        None => (bound * n < -c * m).then_some(true),
    }
}

/// Searches shells `0..=c` in canonical order for the first Dirichlet vector.
/// Failure to find one is a defect: existence is guaranteed.
pub fn dirichlet_solve(a: &LaurentMatrix, c: usize, f: &Field) -> Result<DirichletSolution> {
    if c == 0 {
        return Err(Error::InvalidInput("c must be a positive integer".into()));
    }
    let (n, m) = (a.rows() as i64, a.cols() as i64);
    let forms = Forms::new(f, a, None, c)?;
    let bound = forms.tiny_bound();
    for h in 0..=c {
        let mut found: Option<Result<(PolyVec, Dist)>> = None;
        forms.scan_shell(h, |digits, dist| match dirichlet_pass(dist, bound, c as i64, m, n) {
            Some(true) => {
                found = Some(Ok((forms.to_polys(digits), dist)));
                std::ops::ControlFlow::Break(())
            }
            Some(false) => std::ops::ControlFlow::Continue(()),
            None => {
                found = Some(Err(Error::PrecisionExceeded { needed: forms.digits() as i64 + 1, available: forms.digits() as i64 }));
                std::ops::ControlFlow::Break(())
            }
        })?;
        if let Some(r) = found {
            let (u, dist) = r?;
            return Ok(DirichletSolution { norm: polyvec_norm(&u), u, dist, dist_bound: bound });
        }
    }
    Err(Error::Defect(format!("no Dirichlet vector with norm <= q^{c} for a {n}x{m} matrix")))
}

/// One record `(y_i, Y_i, M_i)`; `Y_i = q^y_exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestApprox {
    pub y: PolyVec,
    pub y_exp: i64,
    pub m_exp: NormExp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestApproxSeq {
    pub records: Vec<BestApprox>,
    /// Height exponent up to which the search was complete.
    pub y_max: i64,
}

/// The inductive best-approximation construction for `A^T`, complete for
/// heights up to `q^y_max`. Within each shell the first minimizer in
/// canonical order is selected.
pub fn best_approx_seq(a: &LaurentMatrix, y_max: usize, f: &Field) -> Result<BestApproxSeq> {
    let at = a.transpose();
    let forms = Forms::new(f, &at, None, y_max)?;
    let shells = shell_minima(&forms, y_max)?;
    let undetermined = || Error::PrecisionExceeded { needed: forms.digits() as i64 + 1, available: forms.digits() as i64 };
    let mut records: Vec<BestApprox> = Vec::new();
    for s in shells {
        let Some(min) = s.min else {
            match records.last() {
                Some(r) if r.m_exp == NormExp::NegInf => break,
                _ => return Err(undetermined()),
            }
        };
        let better = match records.last() {
            None => true,
            Some(r) => min < r.m_exp,
        };
        if better {
            records.push(BestApprox { y: s.argmin, y_exp: s.shell as i64, m_exp: min });
        }
        if min == NormExp::NegInf {
            break;
        }
    }
    Ok(BestApproxSeq { records, y_max: y_max as i64 })
}

/// A finite-scale exponent value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exponent {
    Finite(Ratio<i64>),
    Infinite,
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

/// `-log_q M / log_q Y` for `M = q^m_exp`, `Y = q^y_exp` (`y_exp > 0`).
fn ratio(m_exp: NormExp, y_exp: i64) -> Option<Exponent> {
    if y_exp <= 0 {
        return None;
    }
    Some(match m_exp {
        NormExp::NegInf => Exponent::Infinite,
        NormExp::Fin(e) => Exponent::Finite(Ratio::new(-e, y_exp)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestApproxReport {
    pub increasing_y: bool,
    pub decreasing_m: bool,
    /// `Y_{i+1} >= q Y_i` at every consecutive pair.
    pub growth: bool,
    /// Indices where the literal `Y_i >= q^i` fails (informational).
    pub literal_growth_failures: Vec<usize>,
    /// `M_i < q^(n/m) Y_{i+1}^(-n/m)` at every checkable index.
    pub dirichlet_bound: bool,
    /// For `m = 1`: `M_i <= q^(n-1) Y_{i+1}^(-n)`.
    pub sharpened_bound: Option<bool>,
    /// `-log M_i / log Y_i` for `i >= 2`.
    pub exponents_own: Vec<(usize, Exponent)>,
    /// `-log M_i / log Y_{i+1}`.
    pub exponents_next: Vec<(usize, Exponent)>,
}

impl BestApproxReport {
    pub fn all_pass(&self) -> bool {
        self.increasing_y && self.decreasing_m && self.growth && self.dirichlet_bound && self.sharpened_bound != Some(false)
    }
}

/// Checks the structural properties of a best-approximation sequence for an
/// `n x m` matrix. Indices in the report are 1-based.
pub fn check_best_approx_props(seq: &BestApproxSeq, n: usize, m: usize) -> BestApproxReport {
    let r = &seq.records;
    let (n, m) = (n as i64, m as i64);
    let pairs = r.windows(2);
    let increasing_y = pairs.clone().all(|w| w[1].y_exp > w[0].y_exp) && r.first().is_none_or(|x| x.y_exp == 0);
    let decreasing_m = pairs.clone().all(|w| w[1].m_exp < w[0].m_exp);
    let growth = pairs.clone().all(|w| w[1].y_exp > w[0].y_exp);
    let literal_growth_failures = r.iter().enumerate().filter(|(i, x)| x.y_exp < *i as i64 + 1).map(|(i, _)| i + 1).collect();
    let dirichlet_bound = pairs.clone().all(|w| match w[0].m_exp {
        NormExp::NegInf => true,
        NormExp::Fin(e) => e * m < n * (1 - w[1].y_exp),
    });
    let sharpened_bound = (m == 1).then(|| {
        pairs.clone().all(|w| match w[0].m_exp {
            NormExp::NegInf => true,
            NormExp::Fin(e) => e <= n - 1 - n * w[1].y_exp,
        })
    });
    let exponents_own = r.iter().enumerate().filter_map(|(i, x)| ratio(x.m_exp, x.y_exp).map(|v| (i + 1, v))).collect();
    let exponents_next = pairs.enumerate().filter_map(|(i, w)| ratio(w[0].m_exp, w[1].y_exp).map(|v| (i + 1, v))).collect();
    BestApproxReport {
        increasing_y,
        decreasing_m,
        growth,
        literal_growth_failures,
        dirichlet_bound,
        sharpened_bound,
        exponents_own,
        exponents_next,
    }
}

/// One row of an exponent table: at height `H = q^h`, the best distance
/// `q^-e(H)` over `‖x‖ <= H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentRow {
    pub h: i64,
    /// `e(H)`; `None` means the minimum is zero.
    pub e: Option<i64>,
    pub ratio: Exponent,
    pub argmin: PolyVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentTable {
    pub rows: Vec<ExponentRow>,
    /// Largest `e(H) / log_q H` over the table.
    pub omega_est: Exponent,
    /// Smallest `e(H) / log_q H` over the upper half of the heights.
    pub omega_hat_est: Exponent,
}

/// Finite-height witnesses for the ordinary and uniform exponents of
/// `|<A x - θ>|` (`θ = None`: homogeneous, `x != 0`).
pub fn exponent_estimates(a: &LaurentMatrix, theta: Option<&[Laurent]>, h: usize, f: &Field) -> Result<ExponentTable> {
    if h == 0 {
        return Err(Error::InvalidInput("height exponent must be at least 1".into()));
    }
    let forms = Forms::new(f, a, theta, h)?;
    let shells = shell_minima(&forms, h)?;
    let mut best: Option<(NormExp, PolyVec)> = None;
    if theta.is_some() {
        let zero = vec![Poly::zero(); a.cols()];
        let d = forms.eval(&zero)?.ok_or(Error::PrecisionExceeded { needed: forms.digits() as i64 + 1, available: forms.digits() as i64 })?;
        best = Some((d, zero));
    }
    let mut rows = Vec::with_capacity(h);
    for s in shells {
        let min = s.min.ok_or(Error::PrecisionExceeded { needed: forms.digits() as i64 + 1, available: forms.digits() as i64 })?;
        if best.as_ref().is_none_or(|(b, _)| min < *b) {
            best = Some((min, s.argmin));
        }
        if s.shell == 0 {
            continue;
        }
        let (d, arg) = best.clone().unwrap();
        let hh = s.shell as i64;
        let (e, ratio) = match d {
            NormExp::NegInf => (None, Exponent::Infinite),
            NormExp::Fin(v) => (Some(-v), Exponent::Finite(Ratio::new(-v, hh))),
        };
        rows.push(ExponentRow { h: hh, e, ratio, argmin: arg });
    }
    let omega_est = rows.iter().map(|r| r.ratio).max().unwrap();
    let half = h.div_ceil(2) as i64;
    let omega_hat_est = rows.iter().filter(|r| r.h >= half).map(|r| r.ratio).min().unwrap();
    Ok(ExponentTable { rows, omega_est, omega_hat_est })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeReport {
    /// `|<y . θ>|`
    pub lhs: NormExp,
    /// `‖y‖ |<A x - θ>|`
    pub inhomogeneous_term: NormExp,
    /// `‖x‖ M(y)`
    pub homogeneous_term: NormExp,
    pub holds: bool,
}

/// Checks `|<y . θ>| <= max(‖y‖ |<A x - θ>|, ‖x‖ M(y))`.
pub fn bridge_inequality_check(a: &LaurentMatrix, x: &[Poly], y: &[Poly], theta: &[Laurent], f: &Field) -> Result<BridgeReport> {
    if y.len() != a.rows() || theta.len() != a.rows() {
        return Err(Error::DimensionMismatch("y and θ must have one entry per row".into()));
    }
    let mut dot = Laurent::zero();
    for (yi, ti) in y.iter().zip(theta) {
        dot = dot.add(&ti.mul_poly(yi, f), f);
    }
    let lhs = bracket_dist(&[dot])?;
    let inhomogeneous_term = polyvec_norm(y) + eval_dist(a, x, Some(theta), f)?;
    let homogeneous_term = polyvec_norm(x) + eval_m(a, y, f)?;
    let holds = lhs <= inhomogeneous_term.max(homogeneous_term);
    Ok(BridgeReport { lhs, inhomogeneous_term, homogeneous_term, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{CfExpansion, QuotientSpec};
    use crate::field::Fq;
    use crate::text::parse_poly;

    fn all_z(f: &Field, prec: i64) -> (CfExpansion, LaurentMatrix) {
        let mut cf = CfExpansion::from_quotients(QuotientSpec::all_z(), 10, f).unwrap();
        let alpha = cf.alpha(prec, f).unwrap();
        (cf, LaurentMatrix::scalar(alpha))
    }

    #[test]
    fn eval_m_examples() {
        let f = Field::prime(2).unwrap();
        let (cf, a) = all_z(&f, 30);
        assert_eq!(eval_m(&a, &[cf.q(2).clone()], &f).unwrap(), NormExp::Fin(-3));
        assert_eq!(eval_m(&a, &[Poly::zero()], &f).unwrap(), NormExp::NegInf);
        assert_eq!(eval_m(&a, &[Poly::z()], &f).unwrap(), NormExp::Fin(-2));
    }

    #[test]
    fn dirichlet_examples() {
        let f = Field::prime(2).unwrap();
        let (_, a) = all_z(&f, 30);
        let s = dirichlet_solve(&a, 2, &f).unwrap();
        assert_eq!(s.u, vec![parse_poly("z^2+1", &f).unwrap()]);
        assert_eq!(s.dist, Some(NormExp::Fin(-3)));
        let s = dirichlet_solve(&a, 1, &f).unwrap();
        assert_eq!(s.u, vec![Poly::z()]);
        // rational entry 1/z: z times it is a polynomial
        let r = LaurentMatrix::scalar(Laurent::monomial(Fq::ONE, -1));
        let s = dirichlet_solve(&r, 3, &f).unwrap();
        assert_eq!(s.dist, Some(NormExp::NegInf));
        assert_eq!(s.u, vec![Poly::z()]);
    }

    #[test]
    fn best_approx_matches_convergents() {
        let f = Field::prime(2).unwrap();
        let (cf, a) = all_z(&f, 40);
        let seq = best_approx_seq(&a, 6, &f).unwrap();
        assert_eq!(seq.records.len(), 7);
        for (i, r) in seq.records.iter().enumerate() {
            assert_eq!(r.y_exp, i as i64);
            assert_eq!(r.m_exp, NormExp::Fin(-(i as i64) - 1));
            assert_eq!(r.y[0], *cf.q(i));
        }
        let rep = check_best_approx_props(&seq, 1, 1);
        assert!(rep.all_pass());
        assert_eq!(rep.sharpened_bound, Some(true));
        assert_eq!(rep.literal_growth_failures.len(), 7);
    }

    #[test]
    fn exponent_examples() {
        let f = Field::prime(2).unwrap();
        let (_, a) = all_z(&f, 40);
        let t = exponent_estimates(&a, None, 5, &f).unwrap();
        let e: Vec<i64> = t.rows.iter().map(|r| r.e.unwrap()).collect();
        assert_eq!(e, vec![2, 3, 4, 5, 6]);
        assert_eq!(t.omega_est, Exponent::Finite(Ratio::from_integer(2)));
        assert_eq!(t.omega_hat_est, Exponent::Finite(Ratio::new(6, 5)));
        let p = LaurentMatrix::scalar(Laurent::from_poly(&Poly::z()));
        let t = exponent_estimates(&p, None, 2, &f).unwrap();
        assert_eq!(t.omega_est, Exponent::Infinite);
    }

    #[test]
    fn bridge_examples() {
        let f = Field::prime(2).unwrap();
        let (cf, a) = all_z(&f, 40);
        let theta = vec![Laurent::monomial(Fq::ONE, -2)];
        let r = bridge_inequality_check(&a, &[Poly::zero()], &[Poly::zero()], &theta, &f).unwrap();
        assert!(r.holds && r.lhs == NormExp::NegInf);
        let r = bridge_inequality_check(&a, &[cf.p(3).clone()], &[cf.q(3).clone()], &theta, &f).unwrap();
        assert!(r.holds);
    }
}
