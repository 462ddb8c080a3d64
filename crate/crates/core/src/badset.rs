//! Badly approximable targets: finite-height certificates, the subsequence
//! extraction feeding the Cantor constructions, the survivor trees
//! themselves, the covering argument for the upper bound, and the
//! dimension-bound formulas.

use num_rational::Ratio;

use crate::contfrac::CfExpansion;
use crate::error::{check_budget, Error, Result, SCAN_CAP};
use crate::field::{Field, Fq};
use crate::kernel::{shell_minima, Forms};
use crate::laurent::{Laurent, LaurentMatrix, NormExp, PolyVec};
use crate::ostrowski::recompose_poly;
use crate::poly::Poly;

/// Hard cap on the number of nodes a survivor tree may enumerate.
pub const SURVIVOR_CAP: u128 = 1 << 22;

type Q = Ratio<i64>;

/// A `q`-exponent that may only be known as an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    /// The statistic vanishes.
    NegInf,
    Exact(Q),
    /// Undetermined beyond `<= q^value` at the available precision.
    AtMost(Q),
}

impl Statistic {
    fn key(&self) -> Option<Q> {
        match self {
            Statistic::NegInf => None,
            Statistic::Exact(v) | Statistic::AtMost(v) => Some(*v),
        }
    }

    fn less(&self, other: &Statistic) -> bool {
        match (self.key(), other.key()) {
            (None, Some(_)) => true,
            (Some(a), Some(b)) => a < b,
            _ => false,
        }
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Statistic::NegInf => write!(f, "-inf"),
            Statistic::Exact(v) => write!(f, "{v}"),
            Statistic::AtMost(v) => write!(f, "<={v}"),
        }
    }
}

/// Minimum of `‖x‖^(m/n) |<A x - θ>|` over nonzero `x` with
/// `q^h0 <= ‖x‖ <= q^h1`, compared with `ε = q^-eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadCertificate {
    pub h0: usize,
    pub h1: usize,
    pub eps: Q,
    /// `(h, statistic exponent)` for each shell.
    pub shells: Vec<(usize, Statistic)>,
    pub min: Statistic,
    pub argmin: PolyVec,
    pub pass: bool,
}

pub fn bad_certify(a: &LaurentMatrix, theta: &[Laurent], eps: Q, h0: usize, h1: usize, f: &Field) -> Result<BadCertificate> {
    if h0 > h1 {
        return Err(Error::InvalidInput(format!("empty height window [q^{h0}, q^{h1}]")));
    }
    if theta.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!("target of length {} for {} rows", theta.len(), a.rows())));
    }
    let (n, m) = (a.rows() as i64, a.cols() as i64);
    let total = (f.q() as u128).checked_pow(((h1 + 1) * a.cols()) as u32).unwrap_or(u128::MAX);
    check_budget("certificate enumeration", total, SCAN_CAP)?;
    let forms = Forms::new(f, a, Some(theta), h1)?;
    let tiny = forms.tiny_bound();
    let mut shells = Vec::new();
    let mut min = None::<(Statistic, PolyVec)>;
    for s in shell_minima(&forms, h1)?.into_iter().filter(|s| s.shell >= h0) {
        let scale = Q::new(m * s.shell as i64, n);
        let st = match s.min {
            Some(NormExp::NegInf) => Statistic::NegInf,
            Some(NormExp::Fin(e)) => Statistic::Exact(scale + e),
            None => Statistic::AtMost(scale + tiny),
        };
        if min.as_ref().is_none_or(|(b, _)| st.less(b)) {
            min = Some((st, s.argmin));
        }
        shells.push((s.shell, st));
    }
    let (min, argmin) = min.expect("nonempty window");
    let threshold = -eps;
    let fails = shells.iter().any(|(_, st)| match st {
        Statistic::NegInf => true,
        Statistic::Exact(v) | Statistic::AtMost(v) => *v < threshold,
    });
    let undecided = shells.iter().any(|(_, st)| matches!(st, Statistic::AtMost(v) if *v >= threshold));
    if !fails && undecided {
        return Err(Error::PrecisionExceeded { needed: forms.digits() as i64 + 1, available: forms.digits() as i64 });
    }
    Ok(BadCertificate { h0, h1, eps, shells, min, argmin, pass: !fails })
}

/// An extracted index sequence `φ(1) = 1 < φ(2) < ...` (1-based indices into
/// `Y`) with the two spacing inequalities checked at each consecutive pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiExtraction {
    pub indices: Vec<usize>,
    /// Indices `j` with `Y_{j+1} >= q^gap Y_j` inside the prefix.
    pub jumps: Vec<usize>,
    /// `(φ(i-1), φ(i), Y_φ(i) >= q^gap Y_φ(i-1), Y_{φ(i-1)+1} >= q^-slack Y_φ(i))`.
    pub pairs: Vec<(usize, usize, bool, bool)>,
}

impl PhiExtraction {
    pub fn all_ok(&self) -> bool {
        self.pairs.iter().all(|p| p.2 && p.3)
    }
}

/// The extraction with `gap = l`, `slack = 2l`.
pub fn phi_extract(y: &[i64], l: u32) -> Result<PhiExtraction> {
    phi_extract_with(y, l as i64, 2 * l as i64)
}

/// Extraction for exponents `y_j = log_q Y_j`: each jump index (and a
/// backward chain of `gap`-spaced indices below it) is taken while jumps are
/// available in the prefix; after the last jump picks are made greedily.
///
/// A backward chain may stop at an index within `gap` of the previous pick;
/// that index is dropped so the first inequality holds by construction.
pub fn phi_extract_with(y: &[i64], gap: i64, slack: i64) -> Result<PhiExtraction> {
    if y.is_empty() {
        return Err(Error::PrefixTooShort { at: 1 });
    }
    if y[0] != 0 || y.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("heights must start at 1 and increase strictly".into()));
    }
    if gap < 1 {
        return Err(Error::InvalidInput("gap must be positive".into()));
    }
    let len = y.len();
    let yy = |j: usize| y[j - 1];
    let jumps: Vec<usize> = (1..len).filter(|&j| yy(j + 1) - yy(j) >= gap).collect();
    let mut phi = vec![1usize];
    for &g in &jumps {
        let p = *phi.last().unwrap();
        if g <= p {
            continue;
        }
        let mut chain = vec![g];
        let mut connected = false;
        loop {
            let cur = *chain.last().unwrap();
            match (p..cur).rev().find(|&t| yy(cur) >= yy(t) + gap) {
                None => break,
                Some(t) if t == p => {
                    connected = true;
                    break;
                }
                Some(t) => chain.push(t),
            }
        }
        if !connected {
            chain.pop();
        }
        phi.extend(chain.into_iter().rev());
    }
    loop {
        let p = *phi.last().unwrap();
        match (p + 1..=len).find(|&t| yy(t) >= yy(p) + gap) {
            Some(t) => phi.push(t),
            None => break,
        }
    }
    let pairs = phi
        .windows(2)
        .map(|w| {
            let first = yy(w[1]) >= yy(w[0]) + gap;
            let second = yy(w[0] + 1) >= yy(w[1]) - slack;
            (w[0], w[1], first, second)
        })
        .collect();
    Ok(PhiExtraction { indices: phi, jumps, pairs })
}

/// One level of a survivor tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivorLevel {
    pub level: usize,
    /// `log_q ‖h_level‖` (`-s` for the root).
    pub d: i64,
    /// Centers carry this many fractional digits per coordinate.
    pub digits: usize,
    /// Digits of each center, coordinate-major (`digits` entries per coordinate).
    pub centers: Vec<Vec<Fq>>,
    pub parents: Vec<usize>,
    pub min_children: Option<u128>,
    /// `(1 - q^-s) q^((d_level - d_{level-1}) n)`.
    pub child_bound: Option<u128>,
    /// `|<h_j c>| >= q^-s` for every `j <= level` at every center, by direct evaluation.
    pub sound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivorTree {
    pub n: usize,
    /// Threshold `δ = q^-s`.
    pub s: u32,
    /// Level 0 is the full grid of the first level; level `i >= 1` keeps
    /// the balls on which `|<h_j θ>| >= δ` for all `j <= i`.
    pub levels: Vec<SurvivorLevel>,
    pub grid_size: u128,
}

impl SurvivorTree {
    pub fn counts_ok(&self) -> bool {
        self.levels.iter().all(|l| match (l.min_children, l.child_bound) {
            (Some(m), Some(b)) => m >= b,
            _ => true,
        })
    }

    pub fn sound(&self) -> bool {
        self.levels.iter().all(|l| l.sound)
    }

    /// The center of node `idx` at `level` as an exact vector.
    pub fn center(&self, level: usize, idx: usize) -> Vec<Laurent> {
        let l = &self.levels[level];
        l.centers[idx].chunks(l.digits.max(1)).take(self.n).map(|c| digits_to_laurent(c, l.digits)).collect()
    }
}

fn digits_to_laurent(c: &[Fq], digits: usize) -> Laurent {
    if digits == 0 {
        return Laurent::zero();
    }
    Laurent::from_parts(-1, c[..digits].to_vec(), 0, true)
}

/// Coefficient of `z^-t` in `Σ_j h_j c_j`, for centers given by digits.
fn frac_digit(h: &[Poly], c: &[Fq], digits: usize, t: usize, f: &Field) -> Fq {
    let mut acc = Fq::ZERO;
    for (j, hj) in h.iter().enumerate() {
        let cj = &c[j * digits..(j + 1) * digits];
        for (k, &a) in hj.coeffs().iter().enumerate() {
            // z^k * z^-(k+t)
            if let Some(&b) = cj.get(k + t - 1) {
                acc = f.add(acc, f.mul(a, b));
            }
        }
    }
    acc
}

fn passes(h: &[Poly], c: &[Fq], digits: usize, s: u32, f: &Field) -> bool {
    (1..=s as usize).any(|t| !frac_digit(h, c, digits, t, f).is_zero())
}

fn exact_pow(q: u32, e: i64) -> Option<u128> {
    u32::try_from(e).ok().and_then(|e| (q as u128).checked_pow(e))
}

/// The nested construction for rows `h_1, ..., h_depth` (each of length `n`)
/// with threshold `δ = q^-s`: grid balls carry `d_i + s` digits, and a ball
/// survives iff the first `s` fractional digits of `h_i c` are not all zero,
/// which is exactly the complement of the balls meeting the resonant sets.
pub fn survivor_tree(h: &[PolyVec], s: u32, depth: usize, f: &Field) -> Result<SurvivorTree> {
    let n = h.first().map(|r| r.len()).ok_or_else(|| Error::InvalidInput("no rows given".into()))?;
    if n == 0 || n > 2 {
        return Err(Error::InvalidInput(format!("survivor trees support n = 1 or 2, got {n}")));
    }
    if s == 0 {
        return Err(Error::InvalidInput("threshold exponent must be positive".into()));
    }
    if depth > h.len() {
        return Err(Error::InvalidInput(format!("depth {depth} exceeds the {} rows", h.len())));
    }
    if h.iter().any(|r| r.len() != n || r.iter().all(|p| p.is_zero())) {
        return Err(Error::InvalidInput("rows must be nonzero and of equal length".into()));
    }
    let q = f.q();
    let d: Vec<i64> = h.iter().map(|r| r.iter().map(|p| p.deg_or_neg()).max().unwrap()).collect();
    if d.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("row norms must be nondecreasing".into()));
    }
    let digits_at = |i: usize| (d[i] + s as i64) as usize;
    let grid_size = exact_pow(q, digits_at(0) as i64 * n as i64).unwrap_or(u128::MAX);
    check_budget("survivor grid", grid_size, SURVIVOR_CAP)?;

    // level 0: all balls of the first grid
    let g0 = digits_at(0);
    let mut root_centers = vec![Vec::new()];
    for _ in 0..g0 * n {
        root_centers = root_centers
            .into_iter()
            .flat_map(|c: Vec<Fq>| {
                f.elements().map(move |a| {
                    let mut v = c.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    // reorder pushes (digit-major) into coordinate-major layout
    let root_centers: Vec<Vec<Fq>> = root_centers
        .into_iter()
        .map(|v| (0..n).flat_map(|j| (0..g0).map(move |k| (j, k))).map(|(j, k)| v[k * n + j]).collect())
        .collect();
    let mut levels = vec![SurvivorLevel {
        level: 0,
        d: -(s as i64),
        digits: g0,
        parents: vec![usize::MAX; root_centers.len()],
        centers: root_centers,
        min_children: None,
        child_bound: None,
        sound: true,
    }];
    let mut visited = grid_size;
    for i in 0..depth {
        let prev = levels.last().unwrap();
        let dig = digits_at(i);
        let extra = dig - prev.digits;
        let children_per = exact_pow(q, (extra * n) as i64).unwrap_or(u128::MAX);
        visited = visited.saturating_add(children_per.saturating_mul(prev.centers.len() as u128));
        check_budget("survivor tree", visited, SURVIVOR_CAP)?;
        let mut centers = Vec::new();
        let mut parents = Vec::new();
        let mut min_children: Option<u128> = None;
        for (pi, pc) in prev.centers.iter().enumerate() {
            let mut count = 0u128;
            for tail in 0..children_per {
                // spread the tail digits over the coordinates
                let mut t = tail;
                let mut c = Vec::with_capacity(dig * n);
                for j in 0..n {
                    c.extend_from_slice(&pc[j * prev.digits..(j + 1) * prev.digits]);
                    for _ in 0..extra {
                        c.push(Fq((t % q as u128) as u32));
                        t /= q as u128;
                    }
                }
                if passes(&h[i], &c, dig, s, f) {
                    count += 1;
                    centers.push(c);
                    parents.push(pi);
                }
            }
            min_children = Some(min_children.map_or(count, |m| m.min(count)));
        }
        if i == 0 {
            // the first level is counted against the whole unit ball
            min_children = Some(centers.len() as u128);
        }
        let dprev = if i == 0 { -(s as i64) } else { d[i - 1] };
        let span = (d[i] - dprev) * n as i64;
        let child_bound = exact_pow(q, span).and_then(|full| exact_pow(q, span - s as i64).map(|r| full - r));
        let sound = centers.iter().all(|c| (0..=i).all(|j| passes(&h[j], c, dig, s, f)));
        levels.push(SurvivorLevel { level: i + 1, d: d[i], digits: dig, centers, parents, min_children, child_bound, sound });
        if levels.last().unwrap().centers.is_empty() {
            break;
        }
    }
    Ok(SurvivorTree { n, s, levels, grid_size })
}

/// The finite-`k` value of the mass-distribution lower bound.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionBound {
    pub k: usize,
    pub value: f64,
    /// `n - 1/l` when a spacing `l` is given, else `n`.
    pub limit: f64,
}

/// With `m_i = (1 - q^-1) q^((d_i - d_{i-1}) n)`, `ε_k = q^(-d_k - 1)` and
/// `d_0 = -1`, evaluates `n log(m_1...m_{k-1}) / -log(m_k ε_k^n)`, which equals
/// `n [(k-1)L + n(d_{k-1}+1)] / [n(d_{k-1}+1) - L]` for `L = log_q(1 - 1/q)`.
pub fn dimension_lower_bound(d: &[i64], n: u32, q: u32, l: Option<u32>) -> Result<DimensionBound> {
    if d.is_empty() {
        return Err(Error::InvalidInput("at least one level is required".into()));
    }
    if d.windows(2).any(|w| w[1] <= w[0]) || d[0] < 0 {
        return Err(Error::InvalidInput("levels must be non-negative and increasing".into()));
    }
    let k = d.len();
    let nf = n as f64;
    let big_l = (1.0 - 1.0 / q as f64).ln() / (q as f64).ln();
    let dk1 = if k >= 2 { d[k - 2] } else { -1 } as f64;
    let num = (k as f64 - 1.0) * big_l + nf * (dk1 + 1.0);
    let den = nf * (dk1 + 1.0) - big_l;
    let value = nf * num / den;
    let limit = l.map_or(nf, |l| nf - 1.0 / l as f64);
    Ok(DimensionBound { k, value, limit })
}

/// One covering level between `k_i` and `k_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverLevel {
    pub i: usize,
    pub k_i: usize,
    pub k_next: usize,
    pub n_i: usize,
    pub n_next: usize,
    /// Cylinders of order `k_{i+1}` inside one cylinder of order `k_i`.
    pub children: u128,
    pub removed: u128,
    pub survivors: u128,
    /// `(1 - q^-t) q^(n_{k_{i+1}} - n_{k_i})`.
    pub bound: u128,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverReport {
    pub t: usize,
    pub k: Vec<usize>,
    pub levels: Vec<CoverLevel>,
    /// Running minimum of `ln ‖Q_{k_i}‖ / i`.
    pub lambda: f64,
    /// `1 + ln(1 - q^-t) / ln M` when `M` is supplied with `ln M > λ`.
    pub s_bound: Option<f64>,
}

/// The covering construction from cylinder index `k_0 = K`: `k_{i+1}` is the
/// least `k` with `n_k - n_{k_i} > t + 4`, and a child cylinder of order
/// `k_{i+1}` is discarded when it contains some `{Qα}` with
/// `n_{k_i} <= deg Q <= n_{k_{i+1}} - t`.
pub fn ostro_cover(cf: &mut CfExpansion, k0: usize, t: usize, levels: usize, m: Option<f64>, f: &Field) -> Result<CoverReport> {
    if t == 0 {
        return Err(Error::InvalidInput("t must be positive".into()));
    }
    let q = f.q();
    let mut ks = vec![k0];
    for _ in 0..levels {
        let ki = *ks.last().unwrap();
        cf.ensure(ki + 1, f)?;
        let target = cf.deg_q(ki) + t + 4;
        cf.ensure_deg(target, f)?;
        let mut k = ki + 1;
        while cf.deg_q(k) <= target {
            k += 1;
            cf.ensure(k, f)?;
        }
        ks.push(k);
    }
    let mut out = Vec::new();
    for i in 0..levels {
        let (ki, kn) = (ks[i], ks[i + 1]);
        let (ni, nn) = (cf.deg_q(ki), cf.deg_q(kn));
        let children = exact_pow(q, (nn - ni) as i64).unwrap_or(u128::MAX);
        check_budget("cover enumeration", children, SCAN_CAP)?;
        // Only the new digits matter: the earlier ones contribute degree < n_{k_i}.
        let choices: Vec<Vec<Poly>> = (ki + 1..=kn).map(|j| Poly::all_below(f, cf.a(j).deg().unwrap()).collect()).collect();
        let mut removed = 0u128;
        let mut idx = vec![0usize; choices.len()];
        loop {
            let mut digits = vec![Poly::zero(); ki];
            digits.extend(idx.iter().zip(&choices).map(|(&x, c)| c[x].clone()));
            let qd = recompose_poly(&digits, cf, f).deg_or_neg();
            if qd >= ni as i64 && qd <= nn as i64 - t as i64 {
                removed += 1;
            }
            // odometer over the digit choices
            let mut p = 0;
            while p < idx.len() {
                idx[p] += 1;
                if idx[p] < choices[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == idx.len() {
                break;
            }
        }
        let survivors = children - removed;
        let bound = children - exact_pow(q, nn as i64 - ni as i64 - t as i64).unwrap_or(0);
        out.push(CoverLevel { i, k_i: ki, k_next: kn, n_i: ni, n_next: nn, children, removed, survivors, bound, ok: survivors <= bound });
    }
    let lnq = (q as f64).ln();
    let lambda = (1..ks.len()).map(|i| cf.deg_q(ks[i]) as f64 * lnq / i as f64).fold(f64::INFINITY, f64::min);
    let s_bound = match m {
        None => None,
        Some(m) if m.ln() > lambda => Some(1.0 + (1.0 - (q as f64).powi(-(t as i32))).ln() / m.ln()),
        Some(m) => return Err(Error::InvalidInput(format!("need ln M > λ = {lambda:.6}, got M = {m}"))),
    };
    Ok(CoverReport { t, k: ks, levels: out, lambda, s_bound })
}

/// `‖{Qα} - {Q'α}‖ >= q^-N` for all distinct `Q, Q'` of degree below `N`.
pub fn separation_check(cf: &mut CfExpansion, big_n: usize, f: &Field) -> Result<bool> {
    let count = exact_pow(f.q(), big_n as i64).unwrap_or(u128::MAX);
    check_budget("separation check", count.saturating_mul(count), SCAN_CAP)?;
    let prec = 2 * big_n as i64 + 2;
    let alpha = cf.alpha(prec + big_n as i64, f)?;
    let fracs: Vec<Laurent> = Poly::all_below(f, big_n).map(|p| alpha.mul_poly(&p, f).frac()).collect();
    for i in 0..fracs.len() {
        for j in i + 1..fracs.len() {
            let d = fracs[i].sub(&fracs[j], f);
            match d.norm() {
                Ok(NormExp::Fin(e)) if e >= -(big_n as i64) => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}
