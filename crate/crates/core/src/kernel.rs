//! Enumeration kernel for bracket distances of linear forms.
//!
//! For a matrix `A` (n x m) and an optional target `θ`, the fractional part of
//! `A x - θ` is linear in the coefficients of `x`, so the first `K` fractional
//! digits of `{z^d a_ij}` are tabulated once and every candidate `x` is then
//! evaluated by incremental table updates while an odometer walks the
//! coefficient tuples. No Laurent arithmetic happens inside the scan.
//!
//! Candidates of a fixed max-degree shell are visited in lexicographic order
//! of the concatenated coefficient strings `x_1[h..0] x_2[h..0] ...`.

use std::ops::ControlFlow;

use crate::error::{check_budget, Error, Result, SCAN_CAP};
use crate::field::{Field, Fq};
use crate::laurent::{LaurentMatrix, NormExp};
use crate::poly::Poly;

/// Result of evaluating `|<A x - θ>|` inside the kernel.
///
/// `None` means every tabulated digit vanished while the entries are only
/// known to finite precision: the distance is at most `q^tiny_bound()` but
/// otherwise undetermined.
pub type Dist = Option<NormExp>;

/// Tabulated linear forms `x -> {A x - θ}` for `deg x_j <= dmax`.
pub struct Forms<'f> {
    f: &'f Field,
    n_forms: usize,
    n_vars: usize,
    dmax: usize,
    k: usize,
    contrib: Vec<Fq>,
    offset: Vec<Fq>,
    exact_cover: bool,
}

impl<'f> Forms<'f> {
    /// Builds the table for `A x - θ` with `x in F_q[z]^cols`, `deg x_j <= dmax`.
    pub fn new(f: &'f Field, a: &LaurentMatrix, theta: Option<&[crate::Laurent]>, dmax: usize) -> Result<Self> {
        let n_forms = a.rows();
        let n_vars = a.cols();
        if let Some(t) = theta {
            if t.len() != n_forms {
                return Err(Error::DimensionMismatch(format!("target of length {} for {n_forms} forms", t.len())));
            }
        }
        let entries_exact = a.all_exact() && theta.is_none_or(|t| t.iter().all(|x| x.is_exact()));
        let k = if entries_exact {
            // every nonzero fractional digit of z^d a_ij sits above the lowest stored term
            let low = |x: &crate::Laurent| x.top().map_or(0, |t| (-(t - x.coeff_run().len() as i64 + 1)).max(0));
            let ka = a.entries().iter().map(low).max().unwrap_or(0);
            let kt = theta.map_or(0, |t| t.iter().map(low).max().unwrap_or(0));
            ka.max(kt).max(1) as usize
        } else {
            let pa = a.min_prec().saturating_sub(dmax as i64);
            let pt = theta.map_or(i64::MAX, |t| t.iter().map(|x| x.prec()).min().unwrap_or(i64::MAX));
            let p = pa.min(pt);
            if p < 1 {
                return Err(Error::PrecisionExceeded { needed: dmax as i64 + 1, available: a.min_prec().min(pt) });
            }
            p as usize
        };
        let mut contrib = vec![Fq::ZERO; n_vars * (dmax + 1) * n_forms * k];
        for j in 0..n_vars {
            for d in 0..=dmax {
                for i in 0..n_forms {
                    let entry = a.get(i, j);
                    let base = ((j * (dmax + 1) + d) * n_forms + i) * k;
                    for kk in 0..k {
                        // digit kk+1 of {z^d a} is the coefficient of z^-(kk+1+d) in a
                        contrib[base + kk] = entry.coeff(-((kk + 1 + d) as i64))?;
                    }
                }
            }
        }
        let mut offset = vec![Fq::ZERO; n_forms * k];
        if let Some(t) = theta {
            for (i, ti) in t.iter().enumerate() {
                for kk in 0..k {
                    offset[i * k + kk] = f.neg(ti.coeff(-((kk + 1) as i64))?);
                }
            }
        }
        Ok(Forms { f, n_forms, n_vars, dmax, k, contrib, offset, exact_cover: entries_exact })
    }

    pub fn digits(&self) -> usize {
        self.k
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn dmax(&self) -> usize {
        self.dmax
    }

    /// Upper bound (as a q-exponent) for a distance reported as `None`.
    pub fn tiny_bound(&self) -> i64 {
        -(self.k as i64) - 1
    }

    fn dist_of(&self, acc: &[Fq]) -> Dist {
        let mut first = usize::MAX;
        for i in 0..self.n_forms {
            let row = &acc[i * self.k..(i + 1) * self.k];
            if let Some(pos) = row.iter().position(|c| !c.is_zero()) {
                first = first.min(pos);
                if first == 0 {
                    break;
                }
            }
        }
        if first == usize::MAX {
            if self.exact_cover {
                Some(NormExp::NegInf)
            } else {
                None
            }
        } else {
            Some(NormExp::Fin(-(first as i64) - 1))
        }
    }

    /// Direct evaluation for a given vector (degrees must not exceed `dmax`).
    pub fn eval(&self, x: &[Poly]) -> Result<Dist> {
        if x.len() != self.n_vars {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} variables", x.len(), self.n_vars)));
        }
        let mut acc = self.offset.clone();
        for (j, xj) in x.iter().enumerate() {
            if xj.deg_or_neg() > self.dmax as i64 {
                return Err(Error::InvalidInput(format!("degree {} exceeds the table bound {}", xj.deg_or_neg(), self.dmax)));
            }
            for (d, &c) in xj.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    self.axpy(&mut acc, j, d, c);
                }
            }
        }
        Ok(self.dist_of(&acc))
    }

    fn axpy(&self, acc: &mut [Fq], var: usize, d: usize, c: Fq) {
        let f = self.f;
        let stride = self.n_forms * self.k;
        let base = (var * (self.dmax + 1) + d) * stride;
        let col = &self.contrib[base..base + stride];
        if c == Fq::ONE {
            for (a, &b) in acc.iter_mut().zip(col) {
                *a = f.add(*a, b);
            }
        } else {
            for (a, &b) in acc.iter_mut().zip(col) {
                *a = f.add(*a, f.mul(c, b));
            }
        }
    }

    /// Number of candidates in shell `h` (vectors with max degree exactly `h`).
    pub fn shell_size(&self, h: usize) -> u128 {
        let q = self.f.q() as u128;
        let m = self.n_vars as u32;
        let below = q.checked_pow(m * h as u32).unwrap_or(u128::MAX);
        let all = q.checked_pow(m * (h as u32 + 1)).unwrap_or(u128::MAX);
        all.saturating_sub(below)
    }

    /// Visits every `x` with max degree exactly `h` (nonzero) in canonical
    /// order. The callback receives the coefficient tuple (variable-major,
    /// highest degree first) and the distance. Returns `true` when the
    /// callback stopped the scan early.
    pub fn scan_shell<F>(&self, h: usize, mut visit: F) -> Result<bool>
    where
        F: FnMut(&[Fq], Dist) -> ControlFlow<()>,
    {
        if h > self.dmax {
            return Err(Error::InvalidInput(format!("shell {h} exceeds the table bound {}", self.dmax)));
        }
        check_budget("shell scan", self.shell_size(h), SCAN_CAP)?;
        let f = self.f;
        let q = f.q();
        let width = h + 1;
        let len = self.n_vars * width;
        let mut digits = vec![Fq::ZERO; len];
        let mut acc = self.offset.clone();
        // position p holds the coefficient of z^(h - p % width) in variable p / width
        let slot = |p: usize| (p / width, h - p % width);
        loop {
            let in_shell = (0..self.n_vars).any(|j| !digits[j * width].is_zero());
            if in_shell && visit(&digits, self.dist_of(&acc)).is_break() {
                return Ok(true);
            }
            // odometer increment, last position fastest
            let mut p = len;
            loop {
                if p == 0 {
                    return Ok(false);
                }
                p -= 1;
                let old = digits[p];
                let new = Fq((old.0 + 1) % q);
                digits[p] = new;
                let (var, d) = slot(p);
                self.axpy(&mut acc, var, d, f.sub(new, old));
                if !new.is_zero() {
                    break;
                }
            }
        }
    }

    /// Converts a coefficient tuple from [`Self::scan_shell`] to polynomials.
    pub fn to_polys(&self, digits: &[Fq]) -> Vec<Poly> {
        let width = digits.len() / self.n_vars;
        (0..self.n_vars)
            .map(|j| Poly::from_coeffs(digits[j * width..(j + 1) * width].iter().rev().copied().collect()))
            .collect()
    }
}

/// Shell-by-shell minimum of a distance, with the first strict minimizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellMin {
    pub shell: usize,
    pub min: Dist,
    pub argmin: Vec<Poly>,
}

/// For each shell `0..=h`, the smallest distance and the first vector
/// attaining it. If some distance in a shell is undetermined the minimum is
/// reported as `None` (at most `q^tiny_bound()`) with the first such vector.
pub fn shell_minima(forms: &Forms, h: usize) -> Result<Vec<ShellMin>> {
    let mut out = Vec::with_capacity(h + 1);
    for s in 0..=h {
        let mut best: Option<(NormExp, Vec<Fq>)> = None;
        let mut undecided: Option<Vec<Fq>> = None;
        forms.scan_shell(s, |d, dist| {
            match dist {
                None => {
                    if undecided.is_none() {
                        undecided = Some(d.to_vec());
                    }
                }
                Some(v) => {
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, d.to_vec()));
                    }
                }
            }
            ControlFlow::Continue(())
        })?;
        let (min, digits) = match (undecided, best) {
            (Some(u), _) => (None, u),
            (None, Some((v, d))) => (Some(v), d),
            (None, None) => unreachable!("every shell is nonempty"),
        };
        out.push(ShellMin { shell: s, min, argmin: forms.to_polys(&digits) });
    }
    Ok(out)
}
