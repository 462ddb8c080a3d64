//! Continued fractions over F_q((z^-1)).
//!
//! An expansion is built from one of three sources: an exact rational
//! function (Euclid's algorithm, terminating), a partial-quotient
//! specification (exact and unbounded), or a truncated series (precision
//! guarded: a digit is only produced when the known coefficients determine it).
//! Convergents follow the recurrences `P_{k+1} = A_{k+1} P_k + P_{k-1}` and
//! `Q_{k+1} = A_{k+1} Q_k + Q_{k-1}` from `P_{-1} = 1, P_0 = 0, Q_{-1} = 0, Q_0 = 1`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::laurent::{Laurent, NormExp};
use crate::poly::Poly;

/// Degree of the `k`-th partial quotient (k >= 1) as an integer expression in `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegExpr {
    Num(i64),
    K,
    Add(Box<DegExpr>, Box<DegExpr>),
    Sub(Box<DegExpr>, Box<DegExpr>),
    Mul(Box<DegExpr>, Box<DegExpr>),
    Div(Box<DegExpr>, Box<DegExpr>),
    Rem(Box<DegExpr>, Box<DegExpr>),
    Pow(Box<DegExpr>, Box<DegExpr>),
}

impl DegExpr {
    pub fn parse(s: &str) -> Result<DegExpr> {
        let toks: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let e = Self::sum(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::Parse(format!("unexpected '{}' in degree rule '{s}'", toks[pos])));
        }
        Ok(e)
    }

    fn sum(t: &[char], pos: &mut usize) -> Result<DegExpr> {
        let mut lhs = Self::product(t, pos)?;
        while *pos < t.len() && (t[*pos] == '+' || t[*pos] == '-') {
            let op = t[*pos];
            *pos += 1;
            let rhs = Self::product(t, pos)?;
            lhs = if op == '+' { DegExpr::Add(lhs.into(), rhs.into()) } else { DegExpr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn product(t: &[char], pos: &mut usize) -> Result<DegExpr> {
        let mut lhs = Self::power(t, pos)?;
        loop {
            match t.get(*pos) {
                Some('*') | Some('/') | Some('%') => {
                    let op = t[*pos];
                    *pos += 1;
                    let rhs = Self::power(t, pos)?;
                    lhs = match op {
                        '*' => DegExpr::Mul(lhs.into(), rhs.into()),
                        '/' => DegExpr::Div(lhs.into(), rhs.into()),
                        _ => DegExpr::Rem(lhs.into(), rhs.into()),
                    };
                }
                // implicit multiplication as in `2k` or `3(k+1)`
                Some(c) if *c == 'k' || *c == '(' || c.is_ascii_digit() => {
                    let rhs = Self::power(t, pos)?;
                    lhs = DegExpr::Mul(lhs.into(), rhs.into());
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn power(t: &[char], pos: &mut usize) -> Result<DegExpr> {
        let base = Self::atom(t, pos)?;
        if t.get(*pos) == Some(&'^') {
            *pos += 1;
            let exp = Self::power(t, pos)?;
            return Ok(DegExpr::Pow(base.into(), exp.into()));
        }
        Ok(base)
    }

    fn atom(t: &[char], pos: &mut usize) -> Result<DegExpr> {
        match t.get(*pos) {
            Some('k') => {
                *pos += 1;
                Ok(DegExpr::K)
            }
            Some('(') => {
                *pos += 1;
                let e = Self::sum(t, pos)?;
                if t.get(*pos) != Some(&')') {
                    return Err(Error::Parse("unbalanced parenthesis in degree rule".into()));
                }
                *pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = *pos;
                while *pos < t.len() && t[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                let s: String = t[start..*pos].iter().collect();
                s.parse().map(DegExpr::Num).map_err(|_| Error::Parse(format!("bad number '{s}'")))
            }
            Some(c) => Err(Error::Parse(format!("unexpected '{c}' in degree rule"))),
            None => Err(Error::Parse("truncated degree rule".into())),
        }
    }

    pub fn eval(&self, k: i64) -> Result<i64> {
        use DegExpr::*;
        let bin = |a: &DegExpr, b: &DegExpr| -> Result<(i64, i64)> { Ok((a.eval(k)?, b.eval(k)?)) };
        let overflow = || Error::InvalidInput("degree rule overflow".into());
        Ok(match self {
            Num(n) => *n,
            K => k,
            Add(a, b) => {
                let (x, y) = bin(a, b)?;
                x.checked_add(y).ok_or_else(overflow)?
            }
            Sub(a, b) => {
                let (x, y) = bin(a, b)?;
                x.checked_sub(y).ok_or_else(overflow)?
            }
            Mul(a, b) => {
                let (x, y) = bin(a, b)?;
                x.checked_mul(y).ok_or_else(overflow)?
            }
            Div(a, b) | Rem(a, b) => {
                let (x, y) = bin(a, b)?;
                if y == 0 {
                    return Err(Error::InvalidInput("division by zero in degree rule".into()));
                }
                if matches!(self, Div(..)) {
                    x.div_euclid(y)
                } else {
                    x.rem_euclid(y)
                }
            }
            Pow(a, b) => {
                let (x, y) = bin(a, b)?;
                let y = u32::try_from(y).map_err(|_| Error::InvalidInput("negative power in degree rule".into()))?;
                x.checked_pow(y).ok_or_else(overflow)?
            }
        })
    }
}

impl fmt::Display for DegExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DegExpr::*;
        match self {
            Num(n) => write!(f, "{n}"),
            K => write!(f, "k"),
            Add(a, b) => write!(f, "({a}+{b})"),
            Sub(a, b) => write!(f, "({a}-{b})"),
            Mul(a, b) => write!(f, "({a}*{b})"),
            Div(a, b) => write!(f, "({a}/{b})"),
            Rem(a, b) => write!(f, "({a}%{b})"),
            Pow(a, b) => write!(f, "({a}^{b})"),
        }
    }
}

/// Rule giving `deg A_k` for `k >= 1`.
#[derive(Clone)]
pub enum DegRule {
    Expr(DegExpr),
    Table(Vec<usize>),
    Func(Arc<dyn Fn(usize) -> usize + Send + Sync>),
}

impl fmt::Debug for DegRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegRule::Expr(e) => write!(f, "Expr({e})"),
            DegRule::Table(t) => write!(f, "Table({t:?})"),
            DegRule::Func(_) => write!(f, "Func(..)"),
        }
    }
}

impl DegRule {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(DegRule::Expr(DegExpr::parse(s)?))
    }

    pub fn func(g: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        DegRule::Func(Arc::new(g))
    }

    /// `deg A_k`, or `None` past the end of a table.
    pub fn degree(&self, k: usize) -> Result<Option<usize>> {
        let d = match self {
            DegRule::Expr(e) => {
                let v = e.eval(k as i64)?;
                usize::try_from(v).map_err(|_| Error::InvalidInput(format!("degree rule gives {v} at k={k}")))?
            }
            DegRule::Table(t) => match t.get(k - 1) {
                Some(&d) => d,
                None => return Ok(None),
            },
            DegRule::Func(g) => g(k),
        };
        if d == 0 {
            return Err(Error::InvalidInput(format!("partial quotient A_{k} would have degree 0")));
        }
        Ok(Some(d))
    }
}

/// A description of the sequence of partial quotients `A_1, A_2, ...`.
#[derive(Clone, Debug)]
pub enum QuotientSpec {
    /// The complete (finite) list: the number is rational.
    Finite(Vec<Poly>),
    /// The known beginning of an irrational expansion.
    Prefix(Vec<Poly>),
    /// A repeating block, e.g. `[z]` for `[0; z, z, z, ...]`.
    Periodic(Vec<Poly>),
    /// `deg A_k` from a rule; coefficients drawn from a seeded stream
    /// (`monomial = true` gives pure powers `z^deg`).
    Generated { rule: DegRule, seed: u64, monomial: bool },
}

impl QuotientSpec {
    pub fn all(a: Poly) -> Self {
        QuotientSpec::Periodic(vec![a])
    }

    pub fn all_z() -> Self {
        QuotientSpec::all(Poly::z())
    }

    pub fn monomials(rule: DegRule) -> Self {
        QuotientSpec::Generated { rule, seed: 0, monomial: true }
    }

    /// `A_k` for `k >= 1`; `None` when a finite list has ended.
    pub fn quotient(&self, k: usize, f: &Field) -> Result<Option<Poly>> {
        let a = match self {
            QuotientSpec::Finite(v) => match v.get(k - 1) {
                Some(a) => a.clone(),
                None => return Ok(None),
            },
            QuotientSpec::Prefix(v) => match v.get(k - 1) {
                Some(a) => a.clone(),
                None => return Err(Error::SpecExhausted { available: v.len() }),
            },
            QuotientSpec::Periodic(v) => {
                if v.is_empty() {
                    return Err(Error::InvalidInput("empty periodic block".into()));
                }
                v[(k - 1) % v.len()].clone()
            }
            QuotientSpec::Generated { rule, seed, monomial } => {
                let Some(d) = rule.degree(k)? else {
                    return Ok(None);
                };
                if *monomial {
                    Poly::monomial(Fq::ONE, d)
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(k as u64);
                    let q = f.q();
                    let mut c: Vec<Fq> = (0..d).map(|_| Fq(rng.random_range(0..q))).collect();
                    c.push(Fq(rng.random_range(1..q)));
                    Poly::from_coeffs(c)
                }
            }
        };
        if a.deg().unwrap_or(0) < 1 {
            return Err(Error::InvalidInput(format!("partial quotient A_{k} must have degree >= 1")));
        }
        Ok(Some(a))
    }
}

/// Where an irrational or rational number comes from.
#[derive(Clone, Debug)]
pub enum CfSource {
    Rational { num: Poly, den: Poly },
    Quotients(QuotientSpec),
    Series(Laurent),
}

/// Continuation state of the expansion.
#[derive(Clone, Debug)]
enum Tail {
    /// Remaining value `a / b` with `deg a < deg b`.
    Rational(Poly, Poly),
    Series(Laurent),
    Spec,
    Done,
}

/// A value below one, for [`cf_step`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfValue {
    Rational(Poly, Poly),
    Series(Laurent),
}

/// One step of the continued fraction map: `A = [1/x]`, `next = {1/x}`.
pub fn cf_step(x: &CfValue, f: &Field) -> Result<(Poly, CfValue)> {
    match x {
        CfValue::Rational(a, b) => {
            if a.is_zero() {
                return Err(Error::DivideByZero);
            }
            if a.deg_or_neg() >= b.deg_or_neg() {
                return Err(Error::OutsideUnitBall);
            }
            let (s, r) = b.divmod(a, f)?;
            Ok((s, CfValue::Rational(r, a.clone())))
        }
        CfValue::Series(x) => {
            match x.norm()? {
                NormExp::NegInf => return Err(Error::DivideByZero),
                NormExp::Fin(t) if t >= 0 => return Err(Error::OutsideUnitBall),
                _ => {}
            }
            if x.is_exact() && x.coeff_run().len() > 1 {
                // an exact Laurent polynomial c(z) / z^s is rational
                let t = x.top().unwrap();
                let len = x.coeff_run().len() as i64;
                let s = -(t - len + 1);
                let num = Poly::from_coeffs(x.coeff_run().iter().rev().copied().collect());
                return cf_step(&CfValue::Rational(num, Poly::monomial(Fq::ONE, s as usize)), f);
            }
            let inv = x.inv(f)?;
            let (a, next) = inv.int_frac()?;
            Ok((a, CfValue::Series(next)))
        }
    }
}

/// Why an expansion stopped growing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfEnd {
    /// More quotients can be produced on demand.
    Open,
    /// Rational number: the expansion is complete.
    Terminated,
    /// A prefix specification has no further quotients.
    Exhausted,
    /// A truncated series does not determine the next quotient.
    PrecisionLimit,
}

/// Partial quotients and convergents of a number in the open unit ball.
#[derive(Clone, Debug)]
pub struct CfExpansion {
    source: CfSource,
    quotients: Vec<Poly>,
    // pq[i] holds (P_{i-1}, Q_{i-1})
    p: Vec<Poly>,
    q: Vec<Poly>,
    tail: Tail,
    end: CfEnd,
}

impl CfExpansion {
    pub fn new(source: CfSource, f: &Field) -> Result<Self> {
        let tail = match &source {
            CfSource::Rational { num, den } => {
                if den.is_zero() {
                    return Err(Error::DivideByZero);
                }
                if num.deg_or_neg() >= den.deg_or_neg() {
                    return Err(Error::OutsideUnitBall);
                }
                let g = num.gcd(den, f);
                let (a, b) = if g.is_zero() || g.is_one() {
                    (num.clone(), den.clone())
                } else {
                    (num.divmod(&g, f)?.0, den.divmod(&g, f)?.0)
                };
                if a.is_zero() {
                    Tail::Done
                } else {
                    Tail::Rational(a, b)
                }
            }
            CfSource::Quotients(_) => Tail::Spec,
            CfSource::Series(x) => {
                match x.norm() {
                    Ok(NormExp::Fin(t)) if t >= 0 => return Err(Error::OutsideUnitBall),
                    Ok(NormExp::NegInf) => Tail::Done,
                    _ => Tail::Series(x.clone()),
                }
            }
        };
        let end = if matches!(tail, Tail::Done) { CfEnd::Terminated } else { CfEnd::Open };
        Ok(CfExpansion {
            source,
            quotients: Vec::new(),
            p: vec![Poly::one(), Poly::zero()],
            q: vec![Poly::zero(), Poly::one()],
            tail,
            end,
        })
    }

    /// Expansion with at least `max_k` quotients (fewer only for rational numbers).
    pub fn expand(source: CfSource, max_k: usize, f: &Field) -> Result<Self> {
        let mut cf = CfExpansion::new(source, f)?;
        cf.ensure(max_k, f)?;
        Ok(cf)
    }

    pub fn from_quotients(spec: QuotientSpec, max_k: usize, f: &Field) -> Result<Self> {
        CfExpansion::expand(CfSource::Quotients(spec), max_k, f)
    }

    pub fn source(&self) -> &CfSource {
        &self.source
    }

    pub fn end(&self) -> CfEnd {
        self.end
    }

    pub fn is_rational(&self) -> bool {
        match &self.source {
            CfSource::Rational { .. } => true,
            CfSource::Quotients(QuotientSpec::Finite(_)) => true,
            CfSource::Quotients(_) => false,
            CfSource::Series(_) => self.end == CfEnd::Terminated,
        }
    }

    /// Number of computed partial quotients.
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `A_k`, `k >= 1`.
    pub fn a(&self, k: usize) -> &Poly {
        &self.quotients[k - 1]
    }

    pub fn quotients(&self) -> &[Poly] {
        &self.quotients
    }

    /// `P_k` for `k >= 0`.
    pub fn p(&self, k: usize) -> &Poly {
        &self.p[k + 1]
    }

    /// `Q_k` for `k >= 0`.
    pub fn q(&self, k: usize) -> &Poly {
        &self.q[k + 1]
    }

    pub fn deg_q(&self, k: usize) -> usize {
        self.q(k).deg().expect("Q_k is nonzero")
    }

    fn push(&mut self, a: Poly, f: &Field) {
        let n = self.p.len();
        let pn = a.mul(&self.p[n - 1], f).add(&self.p[n - 2], f);
        let qn = a.mul(&self.q[n - 1], f).add(&self.q[n - 2], f);
        self.p.push(pn);
        self.q.push(qn);
        self.quotients.push(a);
    }

    /// Computes one more quotient. Returns `false` if the expansion cannot grow.
    pub fn step(&mut self, f: &Field) -> Result<bool> {
        if self.end != CfEnd::Open {
            return Ok(false);
        }
        let k = self.quotients.len() + 1;
        match std::mem::replace(&mut self.tail, Tail::Done) {
            Tail::Done => {
                self.end = CfEnd::Terminated;
                Ok(false)
            }
            Tail::Rational(a, b) => {
                let (s, r) = b.divmod(&a, f)?;
                self.push(s, f);
                if r.is_zero() {
                    self.end = CfEnd::Terminated;
                } else {
                    self.tail = Tail::Rational(r, a);
                }
                Ok(true)
            }
            Tail::Spec => {
                let CfSource::Quotients(spec) = &self.source else { unreachable!() };
                match spec.quotient(k, f) {
                    Ok(Some(a)) => {
                        self.push(a, f);
                        self.tail = Tail::Spec;
                        Ok(true)
                    }
                    Ok(None) => {
                        self.end = CfEnd::Terminated;
                        Ok(false)
                    }
                    Err(Error::SpecExhausted { .. }) => {
                        self.tail = Tail::Spec;
                        self.end = CfEnd::Exhausted;
                        Ok(false)
                    }
                    Err(e) => {
                        self.tail = Tail::Spec;
                        Err(e)
                    }
                }
            }
            Tail::Series(x) => {
                let certified = cf_step(&CfValue::Series(x.clone()), f);
                match certified {
                    Ok((a, CfValue::Series(next))) if a.deg().unwrap_or(0) >= 1 => {
                        self.push(a, f);
                        self.tail = match next.norm() {
                            Ok(NormExp::NegInf) => {
                                self.end = CfEnd::Terminated;
                                Tail::Done
                            }
                            _ => Tail::Series(next),
                        };
                        Ok(true)
                    }
                    Ok((a, CfValue::Rational(r, d))) => {
                        self.push(a, f);
                        if r.is_zero() {
                            self.end = CfEnd::Terminated;
                        } else {
                            self.tail = Tail::Rational(r, d);
                        }
                        Ok(true)
                    }
                    Ok(_) | Err(Error::PrecisionExceeded { .. }) | Err(Error::IndeterminateZero { .. }) => {
                        self.tail = Tail::Series(x);
                        self.end = CfEnd::PrecisionLimit;
                        Ok(false)
                    }
                    Err(e) => {
                        self.tail = Tail::Series(x);
                        Err(e)
                    }
                }
            }
        }
    }

    /// Makes at least `k` quotients available, unless the number is rational
    /// and its expansion is shorter.
    pub fn ensure(&mut self, k: usize, f: &Field) -> Result<()> {
        while self.quotients.len() < k {
            if !self.step(f)? {
                return match self.end {
                    CfEnd::Terminated => Ok(()),
                    CfEnd::Exhausted => Err(Error::SpecExhausted { available: self.quotients.len() }),
                    CfEnd::PrecisionLimit => Err(Error::CfPrecision { safe_k: self.quotients.len() }),
                    CfEnd::Open => unreachable!(),
                };
            }
        }
        Ok(())
    }

    /// Grows the expansion until `deg Q_k > d` for the last index (or it terminates).
    pub fn ensure_deg(&mut self, d: usize, f: &Field) -> Result<()> {
        while self.deg_q(self.len()) <= d {
            if !self.step(f)? {
                return match self.end {
                    CfEnd::Terminated => Ok(()),
                    CfEnd::Exhausted => Err(Error::SpecExhausted { available: self.quotients.len() }),
                    CfEnd::PrecisionLimit => Err(Error::CfPrecision { safe_k: self.quotients.len() }),
                    CfEnd::Open => unreachable!(),
                };
            }
        }
        Ok(())
    }

    /// The largest `k` with `deg Q_k <= d` among computed indices, requiring
    /// the next index to be computed (or the expansion to be complete).
    pub fn index_for_deg(&self, d: usize) -> Result<usize> {
        let mut k = 0;
        while k < self.len() && self.deg_q(k + 1) <= d {
            k += 1;
        }
        if k == self.len() && self.end != CfEnd::Terminated {
            return Err(Error::CfTooShort { needed: k + 1, available: self.len() });
        }
        Ok(k)
    }

    /// `α` known down to `z^-prec`.
    pub fn alpha(&mut self, prec: i64, f: &Field) -> Result<Laurent> {
        match &self.source {
            CfSource::Rational { num, den } => rational_laurent(num, den, prec, f),
            CfSource::Series(x) => {
                if prec > x.prec() {
                    return Err(Error::PrecisionExceeded { needed: prec, available: x.prec() });
                }
                Ok(x.truncate(prec))
            }
            CfSource::Quotients(_) => {
                // ‖α - P_k/Q_k‖ = q^-(deg Q_k + deg Q_{k+1}): stop once the sum exceeds prec
                let mut k = 0;
                loop {
                    if self.len() < k + 1 {
                        self.ensure(k + 1, f)?;
                    }
                    if self.len() < k + 1 {
                        // rational and complete: α = P_k / Q_k
                        return rational_laurent(self.p(k), self.q(k), prec, f);
                    }
                    if (self.deg_q(k) + self.deg_q(k + 1)) as i64 > prec {
                        return Ok(rational_laurent(self.p(k), self.q(k), prec, f)?.truncate(prec));
                    }
                    k += 1;
                }
            }
        }
    }

    /// `D_k = Q_k α - P_k` known down to `z^-prec` (exact zero at the end of a
    /// rational expansion).
    pub fn d(&mut self, k: usize, prec: i64, f: &Field) -> Result<Laurent> {
        self.ensure(k, f)?;
        if k > self.len() {
            return Err(Error::CfTooShort { needed: k, available: self.len() });
        }
        if let Some((num, den)) = self.rational_value() {
            let n = self.q(k).mul(&num, f).sub(&self.p(k).mul(&den, f), f);
            return rational_laurent(&n, &den, prec, f);
        }
        let dq = self.deg_q(k) as i64;
        let alpha = self.alpha(prec + dq, f)?;
        let d = alpha.mul_poly(&self.q(k).clone(), f).sub(&Laurent::from_poly(self.p(k)), f);
        Ok(d.truncate(prec))
    }

    /// `D_{-1} = -1`.
    pub fn d_minus1(f: &Field) -> Laurent {
        Laurent::monomial(f.neg(Fq::ONE), 0)
    }

    /// The exact value `num / den` if the number is known to be rational.
    pub fn rational_value(&self) -> Option<(Poly, Poly)> {
        match &self.source {
            CfSource::Rational { num, den } => Some((num.clone(), den.clone())),
            _ if self.end == CfEnd::Terminated => {
                let k = self.len();
                Some((self.p(k).clone(), self.q(k).clone()))
            }
            _ => None,
        }
    }
}

/// `num / den` as a Laurent series: exact when the reduced denominator is `c z^s`.
pub fn rational_laurent(num: &Poly, den: &Poly, prec: i64, f: &Field) -> Result<Laurent> {
    if den.is_zero() {
        return Err(Error::DivideByZero);
    }
    if num.is_zero() {
        return Ok(Laurent::zero());
    }
    let g = num.gcd(den, f);
    let (n, d) = (num.divmod(&g, f)?.0, den.divmod(&g, f)?.0);
    let dd = d.deg().unwrap();
    if d.coeffs()[..dd].iter().all(|c| c.is_zero()) {
        let c = f.inv(d.lead());
        return Ok(Laurent::from_poly(&n.scale(c, f)).shift(-(dd as i64)));
    }
    Laurent::from_rational(&n, &d, prec, f)
}

/// `α = [0; A_1, A_2, ...]` to precision `prec`.
pub fn cf_from_partial_quotients(spec: QuotientSpec, prec: i64, f: &Field) -> Result<Laurent> {
    let mut cf = CfExpansion::new(CfSource::Quotients(spec), f)?;
    cf.alpha(prec, f)
}

/// Outcome of the classical identity checks at one index. `None` marks an
/// item that needs a later convergent than the expansion provides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub k: usize,
    pub coprime: bool,
    pub monotone: bool,
    pub degree_product: bool,
    pub determinant: bool,
    pub d_recurrence: Option<bool>,
    pub d_norm: Option<bool>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.coprime
            && self.monotone
            && self.degree_product
            && self.determinant
            && self.d_recurrence != Some(false)
            && self.d_norm != Some(false)
    }
}

/// Checks gcd(P_k, Q_k) = 1, `‖Q_{k-1}‖ < ‖Q_k‖`, `‖Q_k‖ = Π ‖A_i‖`,
/// `P_{k-1} Q_k - P_k Q_{k-1} = (-1)^k`, `D_{k+1} = A_{k+1} D_k + D_{k-1}`
/// and `‖D_k‖ = 1 / ‖Q_{k+1}‖`, for `1 <= k <= len`.
pub fn verify_identities(cf: &mut CfExpansion, k: usize, f: &Field) -> Result<IdentityReport> {
    if k == 0 || k > cf.len() {
        return Err(Error::CfTooShort { needed: k, available: cf.len() });
    }
    let (pk, qk) = (cf.p(k).clone(), cf.q(k).clone());
    let (pk1, qk1) = (cf.p(k - 1).clone(), cf.q(k - 1).clone());
    let coprime = pk.gcd(&qk, f).is_one();
    let monotone = cf.q(0).is_one() && (1..=k).all(|i| cf.deg_q(i) > cf.deg_q(i - 1));
    let degree_product = cf.deg_q(k) == (1..=k).map(|i| cf.a(i).deg().unwrap()).sum::<usize>();
    let det = pk1.mul(&qk, f).sub(&pk.mul(&qk1, f), f);
    let determinant = det == Poly::constant(f.sign(k));

    let has_next = k < cf.len();
    let (mut d_recurrence, mut d_norm) = (None, None);
    // D values are checked to a precision well below the smallest relevant norm
    let deg_next = if has_next { cf.deg_q(k + 1) } else { cf.deg_q(k) } as i64;
    let prec = deg_next + 8;
    let dk = cf.d(k, prec + deg_next, f)?;
    let dkm1 = if k >= 1 { cf.d(k - 1, prec + deg_next, f)? } else { CfExpansion::d_minus1(f) };
    if has_next {
        let dk1 = cf.d(k + 1, prec, f)?;
        let rhs = dk.mul_poly(&cf.a(k + 1).clone(), f).add(&dkm1, f).truncate(prec);
        let lhs = dk1.truncate(prec);
        d_recurrence = Some(same_to(&lhs, &rhs, prec));
        d_norm = Some(dk.norm() == Ok(NormExp::Fin(-(cf.deg_q(k + 1) as i64))));
    } else if cf.end() == CfEnd::Terminated {
        d_norm = Some(dk.is_known_zero() || dk.norm() == Ok(NormExp::NegInf));
    }
    Ok(IdentityReport { k, coprime, monotone, degree_product, determinant, d_recurrence, d_norm })
}

fn same_to(a: &Laurent, b: &Laurent, prec: i64) -> bool {
    let hi = a.top_bound().fin().unwrap_or(-prec).max(b.top_bound().fin().unwrap_or(-prec)).max(-prec);
    match (a.window(hi, -prec), b.window(hi, -prec)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}
