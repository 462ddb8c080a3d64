//! Parsing of the textual command-line inputs: α sources, matrices,
//! thresholds and exponents.

use std::fs;

use ffda::contfrac::{CfExpansion, CfSource, DegRule, QuotientSpec};
use ffda::construct::{Nu, Omega};
use ffda::singularity::{self, Constant};
use ffda::text::{parse_laurent, parse_laurent_vec, parse_matrix, parse_poly, parse_rational_expr};
use ffda::{Error, Field, LaurentMatrix, Result};
use num_rational::Ratio;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// `@path` reads the argument from a file; anything else is taken literally.
pub fn inline_or_file(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map(|s| s.trim().to_string()).map_err(|e| perr(format!("cannot read '{path}': {e}"))),
        None => Ok(arg.to_string()),
    }
}

/// Splits at commas that are not nested inside brackets or parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' | '(' | '{' => depth += 1,
            ']' | ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn poly_list(s: &str, f: &Field) -> Result<Vec<ffda::Poly>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top(s).into_iter().map(|p| parse_poly(p, f)).collect()
}

/// α specifications:
///
/// * `pqspec:A1,A2,...` the rational number with exactly these partial quotients
/// * `prefix:A1,A2,...` the known beginning of an irrational expansion
/// * `all:A` (or a repeating block `all:A,B`) periodic partial quotients
/// * `deg:<f(k)>` degrees from a rule, coefficients drawn from the seed
/// * `mono:<f(k)>` the monomials `z^f(k)`
/// * `rational:N/D` and `series:<laurent>`
/// * aliases `pqspec-allz` (`all:z`) and `pqspec-growing` (`mono:k`)
pub fn parse_alpha(spec: &str, seed: u64, f: &Field) -> Result<CfSource> {
    let spec = inline_or_file(spec)?;
    let spec = spec.trim();
    let spec = match spec {
        "pqspec-allz" | "allz" => "all:z",
        "pqspec-growing" | "growing" => "mono:k",
        s => s,
    };
    let (kind, body) = spec.split_once(':').ok_or_else(|| perr(format!("α spec '{spec}' needs a 'kind:' prefix")))?;
    Ok(match kind {
        "pqspec" => CfSource::Quotients(QuotientSpec::Finite(poly_list(body, f)?)),
        "prefix" => CfSource::Quotients(QuotientSpec::Prefix(poly_list(body, f)?)),
        "all" => CfSource::Quotients(QuotientSpec::Periodic(poly_list(body, f)?)),
        "deg" => CfSource::Quotients(QuotientSpec::Generated { rule: DegRule::parse(body)?, seed, monomial: false }),
        "mono" => CfSource::Quotients(QuotientSpec::Generated { rule: DegRule::parse(body)?, seed, monomial: true }),
        "rational" => {
            let (num, den) = parse_rational_expr(body, f)?;
            CfSource::Rational { num, den }
        }
        "series" => CfSource::Series(parse_laurent(body, f)?),
        other => return Err(perr(format!("unknown α kind '{other}'"))),
    })
}

pub fn expansion(spec: &str, seed: u64, f: &Field) -> Result<CfExpansion> {
    CfExpansion::new(parse_alpha(spec, seed, f)?, f)
}

/// A matrix given inline / by file, or the `1 x 1` matrix of an α spec.
pub fn matrix(matrix: Option<&str>, alpha: Option<&str>, seed: u64, prec: i64, f: &Field) -> Result<LaurentMatrix> {
    match (matrix, alpha) {
        (Some(m), None) => parse_matrix(&inline_or_file(m)?, f),
        (None, Some(a)) => Ok(LaurentMatrix::scalar(expansion(a, seed, f)?.alpha(prec, f)?)),
        _ => Err(Error::InvalidInput("give exactly one of --matrix and --alpha".into())),
    }
}

pub fn theta(arg: &str, f: &Field) -> Result<Vec<ffda::Laurent>> {
    let s = inline_or_file(arg)?;
    if s.trim_start().starts_with('[') {
        parse_laurent_vec(&s, f)
    } else {
        Ok(vec![parse_laurent(&s, f)?])
    }
}

/// `5` or `q^5`.
pub fn height(s: &str) -> Result<usize> {
    let t = s.trim().strip_prefix("q^").unwrap_or(s.trim());
    t.parse().map_err(|_| perr(format!("bad height '{s}', expected q^h")))
}

fn ratio(s: &str) -> Result<Ratio<i64>> {
    let bad = || perr(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(a, b))
        }
        None => Ok(Ratio::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// `q^-a/b` (or `q^-a`) as the exponent `a/b`.
pub fn epsilon(s: &str) -> Result<Ratio<i64>> {
    let t = s.trim();
    let body = t.strip_prefix("q^-").or_else(|| t.strip_prefix("q^")).ok_or_else(|| perr(format!("bad threshold '{s}', expected q^-a/b")))?;
    let r = ratio(body)?;
    Ok(if t.starts_with("q^-") { r } else { -r })
}

pub fn omega(s: &str) -> Result<Omega> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Ok(Omega::Infinite),
        t => Ok(Omega::Finite(ratio(t)?)),
    }
}

pub fn nu(s: &str) -> Result<Nu> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Ok(Nu::Infinite),
        t => Ok(Nu::Finite(ratio(t)?)),
    }
}

/// `a/b` or `2^-k` (as `1/2^k`).
pub fn constant(s: &str) -> Result<Constant> {
    let t = s.trim();
    if let Some(k) = t.strip_prefix("2^-") {
        let k: u32 = k.parse().map_err(|_| perr(format!("bad constant '{s}'")))?;
        return singularity::q_power_constant(2, k);
    }
    let r = ratio(t)?;
    if *r.numer() <= 0 {
        return Err(Error::InvalidInput(format!("constant must be positive, got {s}")));
    }
    singularity::constant(*r.numer() as u64, *r.denom() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_kinds() {
        let f = Field::prime(2).unwrap();
        for s in ["pqspec:z,z", "prefix:[0,1],z^2", "all:z", "deg:k", "mono:2*k", "rational:1/(z^2+1)", "series:z^-1+z^-3", "pqspec-growing"] {
            assert!(parse_alpha(s, 0, &f).is_ok(), "{s}");
        }
        assert!(parse_alpha("nope:z", 0, &f).is_err());
        assert!(parse_alpha("z,z", 0, &f).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(epsilon("q^-7").unwrap(), Ratio::from_integer(7));
        assert_eq!(epsilon("q^-3/2").unwrap(), Ratio::new(3, 2));
        assert_eq!(height("q^5").unwrap(), 5);
        assert!(matches!(omega("inf").unwrap(), Omega::Infinite));
        assert_eq!(constant("1/8").unwrap(), constant("2^-3").unwrap());
        assert!(constant("-1/8").is_err());
    }
}
