//! Precision-tracked Laurent series in `z^-1` and the non-archimedean norm.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::poly::Poly;

/// Exponent of a norm: `Fin(v)` means `‖x‖ = q^v`, `NegInf` means `x = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormExp {
    NegInf,
    Fin(i64),
}

impl Ord for NormExp {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NormExp::NegInf, NormExp::NegInf) => Ordering::Equal,
            (NormExp::NegInf, _) => Ordering::Less,
            (_, NormExp::NegInf) => Ordering::Greater,
            (NormExp::Fin(a), NormExp::Fin(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for NormExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exponent of a product.
impl std::ops::Add for NormExp {
    type Output = NormExp;

    fn add(self, other: NormExp) -> NormExp {
        match (self, other) {
            (NormExp::Fin(a), NormExp::Fin(b)) => NormExp::Fin(a + b),
            _ => NormExp::NegInf,
        }
    }
}

impl NormExp {
    pub fn fin(self) -> Option<i64> {
        match self {
            NormExp::Fin(v) => Some(v),
            NormExp::NegInf => None,
        }
    }

    pub fn is_neg_inf(self) -> bool {
        self == NormExp::NegInf
    }
}

impl fmt::Display for NormExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormExp::NegInf => write!(f, "-inf"),
            NormExp::Fin(v) => write!(f, "{v}"),
        }
    }
}

/// An element of F_q((z^-1)) known down to the coefficient of `z^-prec`.
///
/// `coeffs[i]` is the coefficient of `z^(hi - i)`. When the value is nonzero
/// to the known precision, `coeffs[0]` is nonzero and `hi` is the degree. An
/// `exact` value is a Laurent polynomial whose unlisted coefficients are all
/// zero; those are trimmed so that the last stored coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent {
    hi: i64,
    coeffs: Vec<Fq>,
    prec: i64,
    exact: bool,
}

impl Laurent {
    /// Known-zero.
    pub fn zero() -> Self {
        Laurent { hi: 0, coeffs: Vec::new(), prec: 0, exact: true }
    }

    /// Zero to precision `prec`, with nothing known below.
    pub fn zero_to(prec: i64) -> Self {
        Laurent { hi: -prec - 1, coeffs: Vec::new(), prec, exact: false }
    }

    pub fn one() -> Self {
        Laurent::monomial(Fq::ONE, 0)
    }

    /// Exact `c * z^k`.
    pub fn monomial(c: Fq, k: i64) -> Self {
        Laurent::from_parts(k, vec![c], 0, true)
    }

    /// Builds a value from its coefficient run starting at `z^hi`.
    ///
    /// For inexact values the run is padded or truncated to end at `z^-prec`;
    /// for exact values `prec` is ignored.
    pub fn from_parts(hi: i64, coeffs: Vec<Fq>, prec: i64, exact: bool) -> Self {
        let mut x = Laurent { hi, coeffs, prec, exact };
        x.normalize();
        x
    }

    pub fn from_poly(p: &Poly) -> Self {
        let coeffs: Vec<Fq> = p.coeffs().iter().rev().copied().collect();
        Laurent::from_parts(p.deg_or_neg(), coeffs, 0, true)
    }

    /// `num / den` expanded to precision `prec`; exact when `den` divides `num`.
    pub fn from_rational(num: &Poly, den: &Poly, prec: i64, f: &Field) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivideByZero);
        }
        let (s, r) = num.divmod(den, f)?;
        if r.is_zero() {
            return Ok(Laurent::from_poly(&s));
        }
        let dn = num.deg_or_neg();
        let inv = Laurent::from_poly(den).inv_to(prec + dn, f)?;
        let x = Laurent::from_poly(num).mul(&inv, f);
        Ok(x.truncate(prec))
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                if self.exact {
                    *self = Laurent { hi: 0, coeffs: Vec::new(), prec: 0, exact: true };
                } else {
                    self.coeffs.clear();
                    self.hi = -self.prec - 1;
                }
            }
            Some(i) => {
                self.coeffs.drain(..i);
                self.hi -= i as i64;
                if self.exact {
                    while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                        self.coeffs.pop();
                    }
                    let low = self.hi - self.coeffs.len() as i64 + 1;
                    self.prec = (-low).max(0);
                } else {
                    let want = self.hi + self.prec + 1;
                    if want <= 0 {
                        self.coeffs.clear();
                        self.hi = -self.prec - 1;
                    } else {
                        self.coeffs.resize(want as usize, Fq::ZERO);
                        if let Some(j) = self.coeffs.iter().position(|c| !c.is_zero()) {
                            if j > 0 {
                                self.coeffs.drain(..j);
                                self.hi -= j as i64;
                            }
                        } else {
                            self.coeffs.clear();
                            self.hi = -self.prec - 1;
                        }
                    }
                }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Coefficients of `z^-i` are known for every `i <= prec`.
    pub fn prec(&self) -> i64 {
        if self.exact {
            i64::MAX
        } else {
            self.prec
        }
    }

    /// Stored precision (meaningful for serialization of exact values too).
    pub fn stored_prec(&self) -> i64 {
        self.prec
    }

    /// Stored coefficient run, beginning at `z^top`.
    pub fn coeff_run(&self) -> &[Fq] {
        &self.coeffs
    }

    /// Degree of the leading known nonzero coefficient, if any.
    pub fn top(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.hi)
        }
    }

    /// An upper bound for the degree: the degree itself when nonzero is known,
    /// `-prec - 1` for a value that is zero to its precision.
    pub fn top_bound(&self) -> NormExp {
        match self.top() {
            Some(t) => NormExp::Fin(t),
            None if self.exact => NormExp::NegInf,
            None => NormExp::Fin(-self.prec - 1),
        }
    }

    pub fn is_known_zero(&self) -> bool {
        self.exact && self.coeffs.is_empty()
    }

    /// Coefficient of `z^i`.
    pub fn coeff(&self, i: i64) -> Result<Fq> {
        if !self.exact && i < -self.prec {
            return Err(Error::PrecisionExceeded { needed: -i, available: self.prec });
        }
        Ok(self.coeff_unchecked(i))
    }

    fn coeff_unchecked(&self, i: i64) -> Fq {
        if self.coeffs.is_empty() || i > self.hi {
            return Fq::ZERO;
        }
        let idx = (self.hi - i) as usize;
        self.coeffs.get(idx).copied().unwrap_or(Fq::ZERO)
    }

    /// The norm exponent.
    pub fn norm(&self) -> Result<NormExp> {
        match self.top() {
            Some(t) => Ok(NormExp::Fin(t)),
            None if self.exact => Ok(NormExp::NegInf),
            None => Err(Error::IndeterminateZero { prec: self.prec }),
        }
    }

    /// Forget everything below `z^-prec`.
    pub fn truncate(&self, prec: i64) -> Laurent {
        let prec = prec.min(self.prec());
        let mut coeffs = Vec::new();
        if let Some(t) = self.top() {
            let mut i = t;
            while i >= -prec {
                coeffs.push(self.coeff_unchecked(i));
                i -= 1;
            }
        }
        Laurent::from_parts(self.top().unwrap_or(0), coeffs, prec, false)
    }

    fn combine_prec(&self, other: &Laurent) -> (i64, bool) {
        match (self.exact, other.exact) {
            (true, true) => (0, true),
            (true, false) => (other.prec, false),
            (false, true) => (self.prec, false),
            (false, false) => (self.prec.min(other.prec), false),
        }
    }

    pub fn add(&self, other: &Laurent, f: &Field) -> Laurent {
        self.add_scaled(other, Fq::ONE, f)
    }

    pub fn sub(&self, other: &Laurent, f: &Field) -> Laurent {
        self.add_scaled(other, f.neg(Fq::ONE), f)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Laurent, c: Fq, f: &Field) -> Laurent {
        let (prec, exact) = self.combine_prec(other);
        let hi = match (self.top(), other.top()) {
            (Some(a), Some(b)) => a.max(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return Laurent::from_parts(0, Vec::new(), prec, exact),
        };
        let lo = if exact {
            let low = |x: &Laurent| x.top().map_or(i64::MAX, |t| t - x.coeffs.len() as i64 + 1);
            low(self).min(low(other))
        } else {
            -prec
        };
        let mut coeffs = Vec::with_capacity((hi - lo + 1).max(0) as usize);
        let mut i = hi;
        while i >= lo {
            coeffs.push(f.add(self.coeff_unchecked(i), f.mul(c, other.coeff_unchecked(i))));
            i -= 1;
        }
        Laurent::from_parts(hi, coeffs, prec, exact)
    }

    pub fn neg(&self, f: &Field) -> Laurent {
        self.scale(f.neg(Fq::ONE), f)
    }

    pub fn scale(&self, c: Fq, f: &Field) -> Laurent {
        if c.is_zero() {
            return Laurent::zero();
        }
        let coeffs = self.coeffs.iter().map(|&a| f.mul(a, c)).collect();
        Laurent::from_parts(self.hi, coeffs, self.prec, self.exact)
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Laurent {
        let mut x = self.clone();
        x.hi += k;
        if !x.exact {
            x.prec -= k;
        } else {
            let low = x.hi - x.coeffs.len() as i64 + 1;
            x.prec = (-low).max(0);
            if x.coeffs.is_empty() {
                x.hi = 0;
                x.prec = 0;
            }
        }
        x
    }

    pub fn mul(&self, other: &Laurent, f: &Field) -> Laurent {
        if self.is_known_zero() || other.is_known_zero() {
            return Laurent::zero();
        }
        let exact = self.exact && other.exact;
        let prec = if exact {
            0
        } else {
            let mut p = i64::MAX;
            let tb = |x: &Laurent| x.top_bound().fin().unwrap();
            if !self.exact {
                p = p.min(self.prec - tb(other));
            }
            if !other.exact {
                p = p.min(other.prec - tb(self));
            }
            p
        };
        let (Some(ta), Some(tb)) = (self.top(), other.top()) else {
            return Laurent::from_parts(0, Vec::new(), prec, false);
        };
        let hi = ta + tb;
        let len = if exact {
            self.coeffs.len() + other.coeffs.len() - 1
        } else {
            (hi + prec + 1).max(0) as usize
        };
        let mut out = vec![Fq::ZERO; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Laurent::from_parts(hi, out, prec, exact)
    }

    pub fn mul_poly(&self, p: &Poly, f: &Field) -> Laurent {
        self.mul(&Laurent::from_poly(p), f)
    }

    /// Inverse to the precision the input supports. Exact monomials invert
    /// exactly; other exact values need an explicit target, see [`Self::inv_to`].
    pub fn inv(&self, f: &Field) -> Result<Laurent> {
        if self.exact && self.coeffs.len() > 1 {
            return Err(Error::InvalidInput("inverse of an exact non-monomial needs a target precision".into()));
        }
        self.inv_to(i64::MAX, f)
    }

    /// Inverse known down to `z^-min(prec, natural)`, where the natural
    /// precision of an inexact input of degree `t` and precision `K` is `K + 2t`.
    pub fn inv_to(&self, prec: i64, f: &Field) -> Result<Laurent> {
        let t = match self.top() {
            Some(t) => t,
            None if self.exact => return Err(Error::DivideByZero),
            None => return Err(Error::IndeterminateZero { prec: self.prec }),
        };
        let lead_inv = f.inv(self.coeffs[0]);
        if self.exact && self.coeffs.len() == 1 {
            return Ok(Laurent::monomial(lead_inv, -t));
        }
        let natural = if self.exact { i64::MAX } else { self.prec + 2 * t };
        let target = prec.min(natural);
        // 1/x = lead^-1 z^-t * b(z^-1) with b = 1 / (1 + a_1 z^-1 + ...)
        let nterms = target - t + 1;
        if nterms <= 0 {
            return Ok(Laurent::zero_to(target));
        }
        let nterms = nterms as usize;
        let a: Vec<Fq> = (0..nterms).map(|i| f.mul(self.coeff_unchecked(t - i as i64), lead_inv)).collect();
        let mut b = vec![Fq::ZERO; nterms];
        b[0] = Fq::ONE;
        for j in 1..nterms {
            let mut s = Fq::ZERO;
            for i in 1..=j {
                if !a[i].is_zero() {
                    s = f.add(s, f.mul(a[i], b[j - i]));
                }
            }
            b[j] = f.neg(s);
        }
        let coeffs: Vec<Fq> = b.into_iter().map(|c| f.mul(c, lead_inv)).collect();
        Ok(Laurent::from_parts(-t, coeffs, target, false))
    }

    /// `self / other` known down to `z^-prec` (or less if the inputs do not
    /// support it).
    pub fn div_to(&self, other: &Laurent, prec: i64, f: &Field) -> Result<Laurent> {
        let top = self.top_bound().fin().unwrap_or(0);
        let inv = other.inv_to(prec.saturating_add(top.max(0)), f)?;
        let q = self.mul(&inv, f);
        Ok(if q.is_exact() { q } else { q.truncate(prec) })
    }

    /// Integral part `[x]` and fractional part `{x}`.
    pub fn int_frac(&self) -> Result<(Poly, Laurent)> {
        if !self.exact && self.prec < 0 {
            return Err(Error::PrecisionExceeded { needed: 0, available: self.prec });
        }
        let mut ip = Vec::new();
        if let Some(t) = self.top() {
            if t >= 0 {
                ip = (0..=t).map(|i| self.coeff_unchecked(i)).collect();
            }
        }
        Ok((Poly::from_coeffs(ip), self.frac()))
    }

    pub fn int_part(&self) -> Result<Poly> {
        Ok(self.int_frac()?.0)
    }

    /// Fractional part `{x}`: the coefficients of `z^-1, z^-2, ...`.
    pub fn frac(&self) -> Laurent {
        let lo = if self.exact {
            self.top().map_or(0, |t| t - self.coeffs.len() as i64 + 1)
        } else {
            -self.prec
        };
        let coeffs: Vec<Fq> = if lo <= -1 {
            (lo..=-1).rev().map(|i| self.coeff_unchecked(i)).collect()
        } else {
            Vec::new()
        };
        Laurent::from_parts(-1, coeffs, self.prec.max(0), self.exact)
    }

    /// Norm exponent of the fractional part, i.e. the distance `|<x>|` to F_q[z].
    /// `Ok(None)` means the fractional part vanishes to the known precision
    /// without being known to be zero.
    pub fn frac_norm(&self) -> Result<Option<NormExp>> {
        if !self.exact && self.prec < 1 {
            return Err(Error::PrecisionExceeded { needed: 1, available: self.prec });
        }
        let fr = self.frac();
        Ok(fr.norm().ok())
    }

    /// The first `k` fractional digits, coefficients of `z^-1 .. z^-k`.
    pub fn frac_digits(&self, k: usize) -> Result<Vec<Fq>> {
        (1..=k as i64).map(|i| self.coeff(-i)).collect()
    }

    /// Coefficients from `z^hi` down to `z^lo` (inclusive).
    pub fn window(&self, hi: i64, lo: i64) -> Result<Vec<Fq>> {
        (lo..=hi).rev().map(|i| self.coeff(i)).collect()
    }
}

/// `|<x>|` for a vector: the largest fractional-part norm.
pub fn bracket_dist(x: &[Laurent]) -> Result<NormExp> {
    let mut best = NormExp::NegInf;
    let mut unknown_bound: Option<(i64, i64)> = None;
    for xi in x {
        match xi.frac_norm()? {
            Some(v) => best = best.max(v),
            None => {
                let p = xi.prec;
                let bound = -p - 1;
                if unknown_bound.is_none_or(|(b, _)| bound > b) {
                    unknown_bound = Some((bound, p));
                }
            }
        }
    }
    if let Some((bound, p)) = unknown_bound {
        if NormExp::Fin(bound) >= best {
            return Err(Error::PrecisionExceeded { needed: p + 1, available: p });
        }
    }
    Ok(best)
}

/// A vector of polynomials.
pub type PolyVec = Vec<Poly>;
/// A vector of Laurent series.
pub type LaurentVec = Vec<Laurent>;

/// Max-norm exponent of a polynomial vector.
pub fn polyvec_norm(v: &[Poly]) -> NormExp {
    v.iter().map(|p| p.norm()).max().unwrap_or(NormExp::NegInf)
}

/// Max-norm exponent of a Laurent vector.
pub fn laurentvec_norm(v: &[Laurent]) -> Result<NormExp> {
    let mut best = NormExp::NegInf;
    for x in v {
        best = best.max(x.norm()?);
    }
    Ok(best)
}

/// A dense `rows x cols` matrix of Laurent series, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Laurent>,
}

impl LaurentMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Laurent>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(LaurentMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Laurent>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        LaurentMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    /// A 1x1 matrix.
    pub fn scalar(x: Laurent) -> Self {
        LaurentMatrix { rows: 1, cols: 1, entries: vec![x] }
    }

    /// The number of rows, `n` in `A in M_{n,m}`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// The number of columns, `m`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Laurent {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Laurent] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Laurent] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> LaurentMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        LaurentMatrix { rows: self.cols, cols: self.rows, entries }
    }

    /// Smallest precision over the entries (`i64::MAX` if all exact).
    pub fn min_prec(&self) -> i64 {
        self.entries.iter().map(|x| x.prec()).min().unwrap_or(i64::MAX)
    }

    pub fn all_exact(&self) -> bool {
        self.entries.iter().all(|x| x.is_exact())
    }

    /// `A x` for a polynomial vector `x` of length `cols`.
    pub fn apply(&self, x: &[Poly], f: &Field) -> Result<LaurentVec> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Laurent::zero();
                for (j, xj) in x.iter().enumerate() {
                    if !xj.is_zero() {
                        acc = acc.add(&self.get(i, j).mul_poly(xj, f), f);
                    }
                }
                acc
            })
            .collect())
    }

    /// `A^T y` for a polynomial vector `y` of length `rows`.
    pub fn apply_t(&self, y: &[Poly], f: &Field) -> Result<LaurentVec> {
        self.transpose().apply(y, f)
    }
}
