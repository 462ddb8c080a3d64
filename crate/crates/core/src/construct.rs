//! Explicit `ξ` with prescribed growth of convergent denominators, and a
//! target `θ = Σ u_k (Q_k ξ - P_k)` whose uniform inhomogeneous exponent is a
//! prescribed `ν`.
//!
//! Every partial quotient and every `u_k` is a pure power of `z`, so all norms
//! are determined by degree sequences. The builders record those sequences and
//! materialize the series only while degrees stay under [`MATERIALIZE_CAP`];
//! beyond it the verifiers fall back to the degree identities alone.

use std::ops::ControlFlow;

use num_rational::Ratio;

use crate::contfrac::{CfExpansion, CfSource, DegRule, QuotientSpec};
use crate::error::{check_budget, Error, Result, SCAN_CAP};
use crate::field::{Field, Fq};
use crate::kernel::Forms;
use crate::laurent::{Laurent, LaurentMatrix, NormExp};
use crate::poly::Poly;

/// Largest `deg Q_{K+1}` accepted by [`build_xi`]; keeps the exponent
/// arithmetic comfortably inside `i64`.
pub const DEGREE_CAP: u64 = 1 << 48;
/// Convergents are expanded as polynomials only while `deg Q_k` stays here.
pub const EXPAND_CAP: u64 = 1024;
/// Largest working precision for which `θ` is materialized.
pub const MATERIALIZE_CAP: u64 = 1024;

type Q = Ratio<i64>;

/// `ω` (or the infinite branch, where `ω_k = k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Omega {
    Finite(Q),
    Infinite,
}

/// `ν`; the infinite value is only meaningful in the infinite branch and
/// selects `u_k = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nu {
    Finite(Q),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthSpec {
    pub omega: Omega,
    pub nu: Nu,
}

impl GrowthSpec {
    pub fn new(omega: Omega, nu: Nu) -> Result<Self> {
        let one = Q::from_integer(1);
        match (omega, nu) {
            (Omega::Finite(w), _) if w < one => Err(Error::InvalidInput(format!("omega = {w} is below 1"))),
            (Omega::Finite(_), Nu::Infinite) => Err(Error::InvalidInput("nu = inf requires omega = inf".into())),
            (Omega::Finite(w), Nu::Finite(v)) if v * w < one || v > w => {
                Err(Error::InvalidInput(format!("nu = {v} is outside [1/omega, omega] for omega = {w}")))
            }
            (Omega::Infinite, Nu::Finite(v)) if v < Q::from_integer(0) => Err(Error::InvalidInput("nu must be non-negative".into())),
            _ => Ok(GrowthSpec { omega, nu }),
        }
    }

    /// `ω_k`.
    pub fn omega_at(&self, k: usize) -> Q {
        match self.omega {
            Omega::Finite(w) => w,
            Omega::Infinite => Q::from_integer(k as i64),
        }
    }
}

fn ceil_mul(r: Q, n: u64) -> Option<u64> {
    let num = (*r.numer() as i128).checked_mul(n as i128)?;
    let den = *r.denom() as i128;
    let c = num.div_euclid(den) + i128::from(num.rem_euclid(den) != 0);
    u64::try_from(c.max(0)).ok()
}

/// `n_0 = 0, n_1 = 1, n_{k+1} = max(n_k + 1, ⌈ω_k n_k⌉)` for `k < len`,
/// saturating once the values stop fitting.
pub fn degree_sequence(spec: &GrowthSpec, len: usize) -> Vec<u64> {
    let mut n = vec![0u64];
    if len >= 1 {
        n.push(1);
    }
    for k in 1..len {
        let nk = n[k];
        let next = ceil_mul(spec.omega_at(k), nk).unwrap_or(u64::MAX).max(nk.saturating_add(1));
        n.push(next);
    }
    n
}

/// The check `lower <= value < lower + 1` on log-scale exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowCheck {
    pub k: usize,
    pub lower: Q,
    pub value: i64,
    pub ok: bool,
}

fn window(k: usize, lower: Q, value: u64) -> WindowCheck {
    let v = Q::from_integer(value as i64);
    WindowCheck { k, lower, value: value as i64, ok: lower <= v && v < lower + 1 }
}

#[derive(Clone, Debug)]
pub struct XiBuild {
    pub spec: GrowthSpec,
    pub levels: usize,
    /// `n_k = deg Q_k` for `k = 0..=levels + 1`.
    pub degrees: Vec<u64>,
    /// `‖Q_k‖^ω_k <= ‖Q_{k+1}‖ < q ‖Q_k‖^ω_k` for `k >= 1`.
    pub windows: Vec<WindowCheck>,
    pub cf: CfExpansion,
}

impl XiBuild {
    pub fn windows_hold(&self) -> bool {
        self.windows.iter().all(|w| w.ok)
    }
}

/// Builds `ξ = [0; z^(n_1 - n_0), z^(n_2 - n_1), ...]` with `levels` certified levels.
pub fn build_xi(spec: GrowthSpec, levels: usize, f: &Field) -> Result<XiBuild> {
    if levels == 0 {
        return Err(Error::InvalidInput("at least one level is required".into()));
    }
    let degrees = degree_sequence(&spec, levels + 1);
    check_budget("deg Q_(K+1)", degrees[levels + 1] as u128, DEGREE_CAP as u128)?;
    let windows = (1..levels).map(|k| window(k, spec.omega_at(k) * degrees[k] as i64, degrees[k + 1])).collect();
    let rule_spec = spec;
    let rule = DegRule::func(move |k| {
        let n = degree_sequence(&rule_spec, k);
        // far beyond any requested precision: clamp rather than overflow
        (n[k] - n[k - 1]).min(1 << 40) as usize
    });
    let mut cf = CfExpansion::new(CfSource::Quotients(QuotientSpec::monomials(rule)), f)?;
    let expand = (0..=levels).take_while(|&k| degrees[k] <= EXPAND_CAP).last().unwrap_or(0);
    cf.ensure(expand, f)?;
    Ok(XiBuild { spec, levels, degrees, windows, cf })
}

#[derive(Clone, Debug)]
pub struct ThetaBuild {
    pub xi: XiBuild,
    /// `deg u_k` for `k = 0..=levels`.
    pub u_degrees: Vec<u64>,
    /// `‖Q_k‖^((ω_k - ν)/(ν + 1)) <= ‖u_k‖ < q ...` for `k >= 1` (finite `ν`).
    pub u_windows: Vec<WindowCheck>,
    /// `θ` known down to `z^-prec`, when materialized.
    pub theta: Option<Laurent>,
    pub prec: i64,
    /// `V_k = Σ_{i<=k} u_i Q_i` and `W_k = Σ u_i P_i` for `k < levels`, when materialized.
    pub v: Vec<Poly>,
    pub w: Vec<Poly>,
    /// `‖V_k‖ = ‖u_k‖ ‖Q_k‖` for every materialized `k`.
    pub v_norms_ok: bool,
}

impl ThetaBuild {
    pub fn materialized(&self) -> bool {
        self.theta.is_some()
    }

    pub fn deg_v(&self, k: usize) -> i64 {
        (self.u_degrees[k] + self.xi.degrees[k]) as i64
    }

    fn nu(&self) -> Nu {
        self.xi.spec.nu
    }
}

fn u_exponent(spec: &GrowthSpec, k: usize, nk: u64) -> Option<Q> {
    match spec.nu {
        Nu::Infinite => None,
        Nu::Finite(v) => Some((spec.omega_at(k) - v) / (v + 1) * nk as i64),
    }
}

/// Builds `θ` from `ξ`: `deg u_k = max(0, ⌈n_k (ω_k - ν) / (ν + 1)⌉)`, or
/// `u_k = 1` for `ν = ∞`, with `u_0 = 1`.
pub fn build_theta(xi: XiBuild, f: &Field) -> Result<ThetaBuild> {
    let k_max = xi.levels;
    let mut u_degrees = vec![0u64];
    let mut u_windows = Vec::new();
    for k in 1..=k_max {
        match u_exponent(&xi.spec, k, xi.degrees[k]) {
            None => u_degrees.push(0),
            Some(e) => {
                let d = e.ceil().to_integer().max(0) as u64;
                u_windows.push(window(k, e, d));
                u_degrees.push(d);
            }
        }
    }
    // the tail from index `levels` on has norm q^(deg u_K - n_{K+1})
    let prec = xi.degrees[k_max + 1] as i64 - u_degrees[k_max] as i64 - 1;
    let mut tb = ThetaBuild { xi, u_degrees, u_windows, theta: None, prec, v: Vec::new(), w: Vec::new(), v_norms_ok: true };
    if prec as u64 > MATERIALIZE_CAP || prec < 1 {
        return Ok(tb);
    }
    tb.xi.cf.ensure(k_max, f)?;
    let mut theta = Laurent::zero_to(prec);
    let (mut v, mut w) = (Poly::zero(), Poly::zero());
    for k in 0..k_max {
        let u = Poly::monomial(Fq::ONE, tb.u_degrees[k] as usize);
        let dk = tb.xi.cf.d(k, prec + tb.u_degrees[k] as i64, f)?;
        theta = theta.add(&dk.mul_poly(&u, f), f).truncate(prec);
        v = v.add(&u.mul(tb.xi.cf.q(k), f), f);
        w = w.add(&u.mul(tb.xi.cf.p(k), f), f);
        tb.v_norms_ok &= v.deg_or_neg() == tb.deg_v(k);
        tb.v.push(v.clone());
        tb.w.push(w.clone());
    }
    tb.theta = Some(theta);
    Ok(tb)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail,
    Skipped(String),
}

impl Check {
    fn of(b: bool) -> Self {
        if b {
            Check::Pass
        } else {
            Check::Fail
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }
}

/// The chain `‖V_nξ - W_n - θ‖ < q ‖Q_{n+1}‖^(-ν(ω_{n+1}+1)/(ν+1)) <= q^(1+ν) ‖V_{n+1}‖^-ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperReport {
    pub n: usize,
    /// Predicted `log_q ‖V_nξ - W_n - θ‖ = deg u_{n+1} - n_{n+2}`.
    pub dist_exp: i64,
    /// Measured value when `θ` is materialized.
    pub measured: Option<i64>,
    pub middle_exp: Option<Q>,
    pub right_exp: Option<Q>,
    /// For `ν = ∞`: `-dist_exp / deg V_{n+1}`, which must reach `ω_{n+1}`.
    pub witness_ratio: Option<Q>,
    pub status: Check,
}

pub fn verify_upper(tb: &mut ThetaBuild, n: usize, f: &Field) -> UpperReport {
    let k = tb.xi.levels;
    let dist_exp = if n + 2 <= k { tb.u_degrees[n + 1] as i64 - tb.xi.degrees[n + 2] as i64 } else { 0 };
    let mut rep = UpperReport { n, dist_exp, measured: None, middle_exp: None, right_exp: None, witness_ratio: None, status: Check::Pass };
    if n + 2 > k {
        rep.status = Check::Skipped(format!("needs level {} but only {k} were built", n + 2));
        return rep;
    }
    if let Some(theta) = tb.theta.clone() {
        let r = tb.xi.cf.alpha(tb.prec + tb.deg_v(n), f).map(|xi| {
            let x = xi.mul_poly(&tb.v[n], f).sub(&Laurent::from_poly(&tb.w[n]), f).sub(&theta, f);
            x.norm()
        });
        match r {
            Ok(Ok(NormExp::Fin(e))) => rep.measured = Some(e),
            _ => {
                rep.status = Check::Skipped("distance below the materialized precision".into());
                return rep;
            }
        }
    }
    let identity_ok = rep.measured.is_none_or(|m| m == dist_exp) && tb.v_norms_ok;
    let d = Q::from_integer(dist_exp);
    let n1 = tb.xi.degrees[n + 1] as i64;
    match tb.nu() {
        Nu::Finite(v) => {
            let middle = Q::from_integer(1) - v * (tb.xi.spec.omega_at(n + 1) + 1) / (v + 1) * n1;
            let right = Q::from_integer(1) + v - v * tb.deg_v(n + 1);
            rep.status = Check::of(identity_ok && d < middle && middle <= right);
            rep.middle_exp = Some(middle);
            rep.right_exp = Some(right);
        }
        Nu::Infinite => {
            let ratio = -d / tb.deg_v(n + 1);
            rep.status = Check::of(identity_ok && ratio >= tb.xi.spec.omega_at(n + 1));
            rep.witness_ratio = Some(ratio);
        }
    }
    rep
}

/// `min_{‖x‖ <= ‖V_n‖/q} |<x ξ - θ>| >= q^-2 ‖V_n‖^-ν`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerReport {
    pub n: usize,
    pub deg_v: i64,
    pub candidates: u128,
    pub min_exp: Option<NormExp>,
    pub argmin: Option<Poly>,
    pub bound_exp: Option<Q>,
    pub status: Check,
}

pub fn verify_lower(tb: &ThetaBuild, n: usize, f: &Field) -> Result<LowerReport> {
    let deg_v = if n < tb.xi.levels { tb.deg_v(n) } else { 0 };
    let mut rep = LowerReport { n, deg_v, candidates: 0, min_exp: None, argmin: None, bound_exp: None, status: Check::Pass };
    let Nu::Finite(nu) = tb.nu() else {
        rep.status = Check::Skipped("no lower bound in the nu = inf branch".into());
        return Ok(rep);
    };
    if n == 0 || n >= tb.xi.levels {
        rep.status = Check::Skipped(format!("index must lie in 1..{}", tb.xi.levels));
        return Ok(rep);
    }
    let Some(theta) = &tb.theta else {
        rep.status = Check::Skipped("θ not materialized".into());
        return Ok(rep);
    };
    let bound = Q::from_integer(-2) - nu * deg_v;
    rep.bound_exp = Some(bound);
    let dmax = (deg_v - 1) as usize;
    rep.candidates = (f.q() as u128).checked_pow(deg_v as u32).unwrap_or(u128::MAX);
    check_budget("lower-bound enumeration", rep.candidates, SCAN_CAP)?;
    let xi = tb.xi.cf.clone().alpha(tb.prec + dmax as i64, f)?;
    let a = LaurentMatrix::scalar(xi);
    let forms = Forms::new(f, &a, Some(std::slice::from_ref(theta)), dmax)?;
    let zero_dist = forms.eval(&[Poly::zero()])?;
    let mut best: Option<(NormExp, Poly)> = zero_dist.map(|d| (d, Poly::zero()));
    let mut undetermined = zero_dist.is_none();
    for h in 0..=dmax {
        forms.scan_shell(h, |digits, dist| {
            match dist {
                None => undetermined = true,
                Some(d) if best.as_ref().is_none_or(|(b, _)| d < *b) => best = Some((d, forms.to_polys(digits).remove(0))),
                Some(_) => {}
            }
            ControlFlow::Continue(())
        })?;
    }
    if undetermined && Q::from_integer(forms.tiny_bound()) >= bound {
        return Err(Error::PrecisionExceeded { needed: forms.digits() as i64 + 1, available: forms.digits() as i64 });
    }
    let (min, arg) = best.expect("at least one determined candidate");
    rep.min_exp = Some(min);
    rep.argmin = Some(arg);
    rep.status = Check::of(match min {
        NormExp::NegInf => false,
        NormExp::Fin(e) => Q::from_integer(e) >= bound,
    });
    Ok(rep)
}

/// `|<x ξ - θ>| > 0` for every `x` with `deg x <= dmax`: a finite witness
/// that `θ` avoids `F_q[z] + ξ F_q[z]`. Since `x = V_n` comes within
/// `q^-n_{n+2}` of `θ`, only `dmax < deg V_{levels-1}` is decidable at the
/// materialized precision.
pub fn theta_avoids_lattice(tb: &ThetaBuild, dmax: usize, f: &Field) -> Result<Check> {
    let Some(theta) = &tb.theta else {
        return Ok(Check::Skipped("θ not materialized".into()));
    };
    let xi = tb.xi.cf.clone().alpha(tb.prec + dmax as i64, f)?;
    let forms = Forms::new(f, &LaurentMatrix::scalar(xi), Some(std::slice::from_ref(theta)), dmax)?;
    let short = || Error::PrecisionExceeded { needed: forms.digits() as i64 + 1, available: forms.digits() as i64 };
    let mut verdict = match forms.eval(&[Poly::zero()])? {
        None => return Err(short()),
        Some(d) => Some(d != NormExp::NegInf),
    };
    for h in 0..=dmax {
        if verdict != Some(true) {
            break;
        }
        forms.scan_shell(h, |_, dist| {
            verdict = dist.map(|d| d != NormExp::NegInf);
            if verdict == Some(true) {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(())
            }
        })?;
    }
    verdict.map(Check::of).ok_or_else(short)
}
