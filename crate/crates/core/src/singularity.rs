//! The counting statistic `Δ_{N,c}`: at how many dyadic scales `X = 2^l` the
//! inequality `‖{hα}‖ <= c / X` has a solution with `0 < ‖h‖ <= X`.
//!
//! Norms are powers of `q` while scales are powers of 2, so every comparison
//! is done on exact big integers.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::Zero;

use crate::contfrac::{CfEnd, CfExpansion};
use crate::error::{check_budget, Error, Result, SCAN_CAP};
use crate::field::Field;
use crate::kernel::{shell_minima, Forms};
use crate::laurent::{LaurentMatrix, NormExp};

/// A positive rational constant `c`.
pub type Constant = Ratio<u64>;

/// How solvability at a scale is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Window on the convergent denominators: the distance from `h α` to
    /// `F_q[z]` over `0 < ‖h‖ <= X` is minimized by `Q_k` with
    /// `‖Q_k‖ <= X < ‖Q_{k+1}‖`, and `‖{Q_k α}‖ = ‖Q_{k+1}‖^-1`.
    Criterion,
    /// Scan of every `h` with `‖h‖ <= X`.
    Exhaustive,
}

fn pow(base: u64, e: usize) -> BigUint {
    BigUint::from(base).pow(e as u32)
}

/// Largest `d` with `q^d <= x` (`x >= 1`).
fn floor_log(q: u32, x: &BigUint) -> usize {
    let mut d = 0;
    let mut p = BigUint::from(q);
    while &p <= x {
        p *= q;
        d += 1;
    }
    d
}

/// `q^-e <= c / X`, i.e. `den(c) X <= num(c) q^e`.
fn small_enough(e: usize, c: &Constant, x: &BigUint, q: u32) -> bool {
    BigUint::from(*c.denom()) * x <= BigUint::from(*c.numer()) * pow(q as u64, e)
}

fn cf_error(e: Error, needed: usize) -> Error {
    match e {
        Error::SpecExhausted { available } | Error::CfPrecision { safe_k: available } => Error::CfTooShort { needed, available },
        other => other,
    }
}

/// The index `k` with `‖Q_k‖ <= X < ‖Q_{k+1}‖`, or `None` when the expansion
/// terminates at some `Q_L` with `‖Q_L‖ <= X` (then `h = Q_L` gives zero).
pub fn window_index(cf: &mut CfExpansion, x: &BigUint, f: &Field) -> Result<Option<usize>> {
    let d = floor_log(f.q(), x);
    cf.ensure_deg(d, f).map_err(|e| cf_error(e, cf.len() + 1))?;
    let k = cf.index_for_deg(d)?;
    Ok(if k == cf.len() && cf.end() == CfEnd::Terminated { None } else { Some(k) })
}

/// Whether `‖{hα}‖ <= c X^-1` has a solution with `0 < ‖h‖ <= X`.
pub fn has_solution_at(cf: &mut CfExpansion, x: &BigUint, c: &Constant, mode: Mode, f: &Field) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::InvalidInput("X must be at least 1".into()));
    }
    if c.is_zero() {
        return Err(Error::InvalidInput("c must be positive".into()));
    }
    let q = f.q();
    match mode {
        Mode::Criterion => Ok(match window_index(cf, x, f)? {
            None => true,
            Some(k) => small_enough(cf.deg_q(k + 1), c, x, q),
        }),
        Mode::Exhaustive => {
            let d = floor_log(q, x);
            // any distance at most q^-(e_min + 1) certainly qualifies
            let mut e_min = 0;
            while !small_enough(e_min, c, x, q) {
                e_min += 1;
            }
            let total = (q as u128).checked_pow(d as u32 + 1).unwrap_or(u128::MAX);
            check_budget("exhaustive solvability scan", total, SCAN_CAP)?;
            let alpha = cf.alpha((d + e_min + 1) as i64, f)?;
            let forms = Forms::new(f, &LaurentMatrix::scalar(alpha), None, d)?;
            for s in shell_minima(&forms, d)? {
                let hit = match s.min {
                    None | Some(NormExp::NegInf) => true,
                    Some(NormExp::Fin(e)) => e < 0 && small_enough((-e) as usize, c, x, q),
                };
                if hit {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// The failures inside one window `‖Q_k‖ <= 2^l < ‖Q_{k+1}‖`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalCount {
    pub k: usize,
    pub scales: usize,
    pub failures: usize,
    /// `failures <= log_2(1/c) + 1`, decided exactly.
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularityReport {
    pub n: usize,
    pub c: Constant,
    pub delta: usize,
    /// `(l, k, solvable)` for `l = 1..=N`; `k` is the window index.
    pub verdicts: Vec<(usize, Option<usize>, bool)>,
    pub intervals: Vec<IntervalCount>,
}

impl SingularityReport {
    pub fn ratio(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.delta as f64 / self.n as f64
        }
    }
}

/// `Δ_{N,c}` with per-scale verdicts.
pub fn delta_nc(cf: &mut CfExpansion, n: usize, c: &Constant, mode: Mode, f: &Field) -> Result<SingularityReport> {
    let mut verdicts = Vec::with_capacity(n);
    for l in 1..=n {
        let x = pow(2, l);
        let k = window_index(cf, &x, f)?;
        let ok = has_solution_at(cf, &x, c, mode, f)?;
        verdicts.push((l, k, ok));
    }
    let delta = verdicts.iter().filter(|v| v.2).count();
    let mut intervals: Vec<IntervalCount> = Vec::new();
    for &(_, k, ok) in &verdicts {
        let Some(k) = k else { continue };
        match intervals.last_mut() {
            Some(iv) if iv.k == k => {
                iv.scales += 1;
                iv.failures += usize::from(!ok);
            }
            _ => intervals.push(IntervalCount { k, scales: 1, failures: usize::from(!ok), within_bound: true }),
        }
    }
    for iv in &mut intervals {
        // failures - 1 <= log_2(1/c)  <=>  num(c) 2^(failures-1) <= den(c)
        iv.within_bound = iv.failures == 0 || BigUint::from(*c.numer()) * pow(2, iv.failures - 1) <= BigUint::from(*c.denom());
    }
    Ok(SingularityReport { n, c: *c, delta, verdicts, intervals })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthTable {
    /// `(k, deg Q_k, deg Q_k / k)`.
    pub rows: Vec<(usize, usize, Ratio<u64>)>,
    /// `deg Q_k / k` strictly increasing over the second half of the range.
    pub diverging: bool,
}

pub fn growth_rate(cf: &mut CfExpansion, k_max: usize, f: &Field) -> Result<GrowthTable> {
    cf.ensure(k_max, f).map_err(|e| cf_error(e, k_max))?;
    let top = k_max.min(cf.len());
    let rows: Vec<_> = (1..=top).map(|k| (k, cf.deg_q(k), Ratio::new(cf.deg_q(k) as u64, k as u64))).collect();
    let half = &rows[rows.len() / 2..];
    let diverging = half.len() >= 2 && half.windows(2).all(|w| w[1].2 > w[0].2);
    Ok(GrowthTable { rows, diverging })
}

/// `log_2` of `X = q^d`, as a float for reporting.
fn log2_q(q: u32, d: usize) -> f64 {
    d as f64 * (q as f64).log2()
}

/// Certified bounds on the deficiency `(N - Δ_{N,c}) / N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeficiencyBounds {
    pub n: usize,
    /// The window index `k` with `log_2 ‖Q_k‖ <= N < log_2 ‖Q_{k+1}‖`.
    pub k: usize,
    /// `(log_2(1/c) + 1)(k + 1) / N`, valid for `0 < c < 1/q`.
    pub upper_over_n: f64,
    /// `(log_2(1/c) + 1)(k + 1) / log_2 ‖Q_k‖`, the coarser form.
    pub upper_over_qk: f64,
    /// `2j / N` with `log_2 ‖Q_{2j}‖ <= N`, valid for every `c <= q^-3`.
    pub lower: f64,
    pub lower_count: usize,
}

pub fn deficiency_bounds(cf: &mut CfExpansion, n: usize, c: &Constant, f: &Field) -> Result<DeficiencyBounds> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let q = f.q();
    let x = pow(2, n);
    let k = window_index(cf, &x, f)?.unwrap_or(cf.len());
    let log_inv_c = (*c.denom() as f64 / *c.numer() as f64).log2();
    let factor = (log_inv_c + 1.0) * (k + 1) as f64;
    let upper_over_n = factor / n as f64;
    let lq = log2_q(q, cf.deg_q(k));
    let upper_over_qk = if lq > 0.0 { factor / lq } else { f64::INFINITY };
    // largest j with ‖Q_{2j}‖ <= 2^N
    let mut j = 0;
    while 2 * (j + 1) <= cf.len() && pow(q as u64, cf.deg_q(2 * (j + 1))) <= x {
        j += 1;
    }
    Ok(DeficiencyBounds { n, k, upper_over_n, upper_over_qk, lower: (2 * j) as f64 / n as f64, lower_count: 2 * j })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanVerdict {
    ConsistentWithSingular,
    NotSingular,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanCell {
    pub n: usize,
    pub c: Constant,
    pub delta: usize,
    pub ratio: f64,
    pub bounds: DeficiencyBounds,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanTable {
    pub cells: Vec<ScanCell>,
    pub verdict: ScanVerdict,
}

/// Tabulates `Δ_{N,c} / N`. The verdict is only a finite-scale reading:
/// "singular" needs, for each `c`, a nondecreasing ratio over the three
/// largest `N` and a certified upper deficiency below `threshold`; "not
/// singular" needs the certified lower deficiency at the largest `N` to be at
/// least `threshold`.
pub fn singular_on_average_scan(cf: &mut CfExpansion, ns: &[usize], cs: &[Constant], threshold: f64, f: &Field) -> Result<ScanTable> {
    let mut ns: Vec<usize> = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut cells = Vec::new();
    for c in cs {
        for &n in &ns {
            let r = delta_nc(cf, n, c, Mode::Criterion, f)?;
            let bounds = if n == 0 {
                DeficiencyBounds { n, k: 0, upper_over_n: f64::INFINITY, upper_over_qk: f64::INFINITY, lower: 0.0, lower_count: 0 }
            } else {
                deficiency_bounds(cf, n, c, f)?
            };
            cells.push(ScanCell { n, c: *c, delta: r.delta, ratio: r.ratio(), bounds });
        }
    }
    let verdict = if cells.is_empty() {
        ScanVerdict::Inconclusive
    } else {
        let last = ns.last().copied().unwrap_or(0);
        let not_singular = cells.iter().any(|x| x.n == last && x.bounds.lower >= threshold);
        let singular = cs.iter().all(|c| {
            let col: Vec<&ScanCell> = cells.iter().filter(|x| x.c == *c).collect();
            let tail = &col[col.len().saturating_sub(3)..];
            tail.windows(2).all(|w| w[1].ratio >= w[0].ratio) && tail.last().is_some_and(|x| x.bounds.upper_over_n < threshold)
        });
        match (singular, not_singular) {
            (true, false) => ScanVerdict::ConsistentWithSingular,
            (false, true) => ScanVerdict::NotSingular,
            _ => ScanVerdict::Inconclusive,
        }
    };
    Ok(ScanTable { cells, verdict })
}

/// The constant `num / den`.
pub fn constant(num: u64, den: u64) -> Result<Constant> {
    if num == 0 || den == 0 {
        return Err(Error::InvalidInput("c must be a positive rational".into()));
    }
    Ok(Ratio::new(num, den))
}

/// `q^-k` as an exact constant.
pub fn q_power_constant(q: u32, k: u32) -> Result<Constant> {
    let den = (q as u64).checked_pow(k).ok_or_else(|| Error::InvalidInput("constant too small".into()))?;
    constant(1, den)
}
