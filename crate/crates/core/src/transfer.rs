//! Kronecker-type solvability, transference and rank computations
//! over the polynomial ring.

use std::ops::ControlFlow;

use crate::contfrac::rational_laurent;
use crate::error::{check_budget, Error, Result, SCAN_CAP};
use crate::field::Field;
use crate::kernel::{shell_minima, Dist, Forms};
use crate::laurent::{bracket_dist, Laurent, LaurentMatrix, NormExp, PolyVec};
use crate::poly::Poly;

/// A dense row-major matrix over `F_q[z]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(PolyMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        PolyMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Poly::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &PolyMatrix, f: &Field) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = PolyMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j), f), f);
                }
                out.entries[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// `row[dst] -= s * row[src]`
    fn sub_row(&mut self, dst: usize, src: usize, s: &Poly, f: &Field) {
        for j in 0..self.cols {
            let t = self.get(src, j).mul(s, f);
            let e = &mut self.entries[dst * self.cols + j];
            *e = e.sub(&t, f);
        }
    }

    fn scale_row(&mut self, i: usize, c: crate::Fq, f: &Field) {
        for j in 0..self.cols {
            let e = &mut self.entries[i * self.cols + j];
            *e = e.scale(c, f);
        }
    }
}

/// Hermite normal form `transform * input = form`.
///
/// `form` is in row echelon shape: each nonzero row starts with a monic pivot
/// further right than the row above, and entries above a pivot have smaller
/// degree than the pivot. Rows `rank..` of `transform` span the left kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub form: PolyMatrix,
    pub transform: PolyMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn poly_matrix_hnf(m: &PolyMatrix, f: &Field) -> Hnf {
    let mut h = m.clone();
    let mut u = PolyMatrix::identity(m.rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        // Euclid on column c among rows r.., always dividing by the smallest degree
        loop {
            let best = (r..m.rows).filter(|&i| !h.get(i, c).is_zero()).min_by_key(|&i| h.get(i, c).deg());
            let Some(best) = best else { break };
            h.swap_rows(r, best);
            u.swap_rows(r, best);
            let mut cleared = true;
            for i in r + 1..m.rows {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let (s, rem) = h.get(i, c).divmod(h.get(r, c), f).expect("nonzero pivot");
                h.sub_row(i, r, &s, f);
                u.sub_row(i, r, &s, f);
                cleared &= rem.is_zero();
            }
            if cleared {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        let inv = f.inv(h.get(r, c).lead());
        h.scale_row(r, inv, f);
        u.scale_row(r, inv, f);
        for i in 0..r {
            let (s, _) = h.get(i, c).divmod(h.get(r, c), f).expect("nonzero pivot");
            if !s.is_zero() {
                h.sub_row(i, r, &s, f);
                u.sub_row(i, r, &s, f);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Hnf { form: h, transform: u, rank: r, pivots }
}

/// A matrix of reduced rational functions `num / den` with monic `den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(Poly, Poly)>,
}

fn reduce(num: &Poly, den: &Poly, f: &Field) -> Result<(Poly, Poly)> {
    if den.is_zero() {
        return Err(Error::DivideByZero);
    }
    if num.is_zero() {
        return Ok((Poly::zero(), Poly::one()));
    }
    let g = num.gcd(den, f);
    let (n, _) = num.divmod(&g, f)?;
    let (d, _) = den.divmod(&g, f)?;
    let c = f.inv(d.lead());
    Ok((n.scale(c, f), d.scale(c, f)))
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<(Poly, Poly)>, f: &Field) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        let entries = entries.iter().map(|(n, d)| reduce(n, d, f)).collect::<Result<_>>()?;
        Ok(RationalMatrix { rows, cols, entries })
    }

    /// Reads an exact Laurent matrix (every entry a Laurent polynomial).
    pub fn from_laurent(a: &LaurentMatrix, f: &Field) -> Result<Self> {
        if !a.all_exact() {
            return Err(Error::NotExact);
        }
        let entries = a
            .entries()
            .iter()
            .map(|x| {
                let Some(top) = x.top() else { return (Poly::zero(), Poly::one()) };
                let run = x.coeff_run();
                let low = top - run.len() as i64 + 1;
                let num = Poly::from_coeffs(run.iter().rev().copied().collect()).shift(low.max(0) as usize);
                let den = Poly::monomial(crate::Fq::ONE, (-low).max(0) as usize);
                (num, den)
            })
            .collect();
        RationalMatrix::new(a.rows(), a.cols(), entries, f)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &(Poly, Poly) {
        &self.entries[i * self.cols + j]
    }

    /// Expansion in `F_q((z^-1))` to precision `prec`.
    pub fn to_laurent(&self, prec: i64, f: &Field) -> Result<LaurentMatrix> {
        let entries = self.entries.iter().map(|(n, d)| rational_laurent(n, d, prec, f)).collect::<Result<_>>()?;
        LaurentMatrix::new(self.rows, self.cols, entries)
    }

    /// Is `(A^T u)_j` a polynomial for every column `j`?
    pub fn transposed_is_polynomial(&self, u: &[Poly], f: &Field) -> Result<bool> {
        if u.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} rows", u.len(), self.rows)));
        }
        for j in 0..self.cols {
            let (mut num, mut den) = (Poly::zero(), Poly::one());
            for (i, ui) in u.iter().enumerate() {
                let (a, b) = self.get(i, j);
                let (n2, d2) = reduce(&num.mul(b, f).add(&ui.mul(a, f).mul(&den, f), f), &den.mul(b, f), f)?;
                num = n2;
                den = d2;
            }
            if den.deg() != Some(0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Rank of `G_A = A^T F_q[z]^n + F_q[z]^m` and a basis of the lattice of
/// `u` with `A^T u` polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRank {
    pub rank: usize,
    /// `m + n`; the matrix is nondegenerate iff `rank == full`.
    pub full: usize,
    pub lattice_basis: Vec<PolyVec>,
}

impl GroupRank {
    pub fn degenerate(&self) -> bool {
        self.rank < self.full
    }
}

/// For exact entries the generators are rational, so `G_A` spans at most an
/// `m`-dimensional `F_q(z)`-space and the lattice of polynomial relations has
/// rank `n`.
pub fn group_rank(a: &RationalMatrix, f: &Field) -> Result<GroupRank> {
    let (n, m) = (a.rows, a.cols);
    let mut den = Poly::one();
    for (_, d) in &a.entries {
        let g = den.gcd(d, f);
        den = den.mul(&d.divmod(&g, f)?.0, f);
    }
    // generators scaled by the common denominator: rows D A_i, then D e_j
    let mut rows = Vec::with_capacity(n + m);
    for i in 0..n {
        let row = (0..m)
            .map(|j| {
                let (nu, d) = a.get(i, j);
                Ok(nu.mul(&den.divmod(d, f)?.0, f))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    for j in 0..m {
        rows.push((0..m).map(|k| if k == j { den.clone() } else { Poly::zero() }).collect());
    }
    let gen = PolyMatrix::from_rows(rows)?;
    let hnf = poly_matrix_hnf(&gen, f);
    let lattice_basis = (hnf.rank..n + m).map(|r| hnf.transform.row(r)[..n].to_vec()).collect();
    Ok(GroupRank { rank: hnf.rank, full: n + m, lattice_basis })
}

/// Outcome of checking "A^T u polynomial implies u . θ polynomial".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KroneckerReport {
    pub deg_bound: usize,
    /// Nonzero `u` with `deg u <= deg_bound` and `A^T u` polynomial (to precision).
    pub relations: Vec<PolyVec>,
    /// Relations with `|<u . θ>| > 0`, with that distance.
    pub failures: Vec<(PolyVec, NormExp)>,
    /// For exact `A`: the verdict on a lattice basis, which decides the condition
    /// completely (up to the precision of θ).
    pub basis_verdict: Option<bool>,
}

impl KroneckerReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.basis_verdict != Some(false)
    }
}

fn dot_bracket(u: &[Poly], theta: &[Laurent], f: &Field) -> Result<Option<NormExp>> {
    let mut acc = Laurent::zero();
    for (ui, ti) in u.iter().zip(theta) {
        acc = acc.add(&ti.mul_poly(ui, f), f);
    }
    acc.frac_norm()
}

/// Checks the Kronecker compatibility condition on all `u` with
/// `deg u <= deg_bound`. With `exact` supplied, relations are confirmed by
/// exact arithmetic and a lattice basis is checked as well.
pub fn kronecker_condition2(
    a: &LaurentMatrix,
    exact: Option<&RationalMatrix>,
    theta: &[Laurent],
    deg_bound: usize,
    f: &Field,
) -> Result<KroneckerReport> {
    if theta.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!("target of length {} for {} rows", theta.len(), a.rows())));
    }
    let at = a.transpose();
    let forms = Forms::new(f, &at, None, deg_bound)?;
    let mut relations = Vec::new();
    for h in 0..=deg_bound {
        let mut err = None;
        forms.scan_shell(h, |digits, dist| {
            if matches!(dist, None | Some(NormExp::NegInf)) {
                let u = forms.to_polys(digits);
                match exact.map(|r| r.transposed_is_polynomial(&u, f)).transpose() {
                    Ok(Some(false)) => {}
                    Ok(_) => relations.push(u),
                    Err(e) => {
                        err = Some(e);
                        return ControlFlow::Break(());
                    }
                }
            }
            ControlFlow::Continue(())
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    }
    let mut failures = Vec::new();
    for u in &relations {
        if let Some(v) = dot_bracket(u, theta, f)? {
            if v != NormExp::NegInf {
                failures.push((u.clone(), v));
            }
        }
    }
    let basis_verdict = match exact {
        None => None,
        Some(r) => {
            let g = group_rank(r, f)?;
            let mut ok = true;
            for u in &g.lattice_basis {
                if let Some(v) = dot_bracket(u, theta, f)? {
                    ok &= v == NormExp::NegInf;
                }
            }
            Some(ok)
        }
    };
    Ok(KroneckerReport { deg_bound, relations, failures, basis_verdict })
}

/// A vector `x` found by search, with its distance `|<A x - θ>|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub x: PolyVec,
    pub dist: Dist,
}

/// First `x` in canonical order (zero first, then shells by degree) with
/// `deg x <= max_deg` and `|<A x - θ>| <= q^-eps`.
fn search_within(a: &LaurentMatrix, theta: &[Laurent], eps: i64, max_deg: usize, f: &Field) -> Result<Option<Solution>> {
    if theta.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!("target of length {} for {} rows", theta.len(), a.rows())));
    }
    let forms = Forms::new(f, a, Some(theta), max_deg)?;
    let tiny = forms.tiny_bound();
    let short = || Error::PrecisionExceeded { needed: forms.digits() as i64 + 1, available: forms.digits() as i64 };
    let pass = |d: Dist| -> Option<bool> {
        match d {
            Some(v) => Some(v <= NormExp::Fin(-eps)),
            None => (tiny <= -eps).then_some(true),
        }
    };
    let zero = vec![Poly::zero(); a.cols()];
    match pass(forms.eval(&zero)?) {
        Some(true) => return Ok(Some(Solution { dist: forms.eval(&zero)?, x: zero })),
        Some(false) => {}
        None => return Err(short()),
    }
    for h in 0..=max_deg {
        let mut found: Option<Result<Solution>> = None;
        forms.scan_shell(h, |digits, dist| match pass(dist) {
            Some(true) => {
                found = Some(Ok(Solution { x: forms.to_polys(digits), dist }));
                ControlFlow::Break(())
            }
            Some(false) => ControlFlow::Continue(()),
            None => {
                found = Some(Err(short()));
                ControlFlow::Break(())
            }
        })?;
        if let Some(r) = found {
            return r.map(Some);
        }
    }
    Ok(None)
}

/// Finds `x` with `|<A x - θ>| <= q^-eps`, raising the degree up to `max_deg`.
pub fn kronecker_solve(a: &LaurentMatrix, theta: &[Laurent], eps: i64, max_deg: usize, f: &Field) -> Result<Solution> {
    search_within(a, theta, eps, max_deg, f)?.ok_or(Error::NotFoundAtBound { bound: max_deg as i64 })
}

/// Whether `M(y) >= q^-t` for every nonzero `y` with `‖y‖ <= q^s`.
pub fn hypothesis_holds(a: &LaurentMatrix, s: usize, t: i64, f: &Field) -> Result<bool> {
    let at = a.transpose();
    let forms = Forms::new(f, &at, None, s)?;
    let tiny = forms.tiny_bound();
    for sh in shell_minima(&forms, s)? {
        match sh.min {
            Some(v) if v < NormExp::Fin(-t) => return Ok(false),
            Some(_) => {}
            None if tiny < -t => return Ok(false),
            None => return Err(Error::PrecisionExceeded { needed: forms.digits() as i64 + 1, available: forms.digits() as i64 }),
        }
    }
    Ok(true)
}

/// Under the hypothesis of [`hypothesis_holds`], finds `x` with `‖x‖ <= q^t`
/// and `|<A x - θ>| <= q^-s`. Existence is guaranteed, so failure is a defect.
pub fn transference_solve(a: &LaurentMatrix, theta: &[Laurent], s: usize, t: usize, f: &Field) -> Result<Solution> {
    if s == 0 || t == 0 {
        return Err(Error::InvalidInput("s and t must be positive".into()));
    }
    if !hypothesis_holds(a, s, t as i64, f)? {
        return Err(Error::HypothesisFails);
    }
    let total = (f.q() as u128).checked_pow(((t + 1) * a.cols()) as u32).unwrap_or(u128::MAX);
    check_budget("transference search", total, SCAN_CAP)?;
    search_within(a, theta, s as i64, t, f)?
        .ok_or_else(|| Error::Defect(format!("no solution of norm <= q^{t} although the hypothesis holds (s = {s})")))
}

/// `|<A x - θ>|` through the Laurent route, for reporting; `None` when the
/// residual vanishes to the available precision.
pub fn residual(a: &LaurentMatrix, x: &[Poly], theta: &[Laurent], f: &Field) -> Result<Dist> {
    let v = a.apply(x, f)?;
    let r: Vec<Laurent> = v.iter().zip(theta).map(|(vi, ti)| vi.sub(ti, f)).collect();
    if r.iter().any(|x| !x.is_exact() && x.prec() < 1) {
        return Err(Error::PrecisionExceeded { needed: 1, available: r.iter().map(|x| x.prec()).min().unwrap_or(0) });
    }
    match bracket_dist(&r) {
        Ok(v) => Ok(Some(v)),
        Err(Error::PrecisionExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}
