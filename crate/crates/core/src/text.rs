//! Text formats for fields, polynomials, Laurent series and matrices.
//!
//! * field: `q=p` or `q=p^e;mod=[c0,...,ce]`
//! * element: an integer for prime fields, a base-p digit list `[d0,...]` otherwise
//! * polynomial: `[c0,c1,...]` low to high, or an expression such as `z^3+2z+1`
//! * Laurent: `{top:n, coeffs:[...], prec:K}` with an optional `exact:true`;
//!   the zero series is written with `top:-inf`
//! * matrix: row-major nested lists of Laurent entries
//!
//! The structured forms are a superset of JSON (keys may be bare words), so
//! JSON produced elsewhere parses back unchanged. Serialization is canonical:
//! `format_*(parse_*(s))` is a fixed point.

use crate::error::{Error, Result};
use crate::field::{is_prime, Field, FieldSpec, Fq};
use crate::laurent::{Laurent, LaurentMatrix};
use crate::poly::Poly;

/// A parsed structured value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Word(String),
    List(Vec<Value>),
    Map(Vec<(String, Value)>),
}

impl Value {
    pub fn get(&self, key: &str) -> Option<&Value> {
        match self {
            Value::Map(kv) => kv.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }

    fn as_int(&self) -> Result<i64> {
        match self {
            Value::Int(n) => Ok(*n),
            other => Err(perr(format!("expected an integer, found {other:?}"))),
        }
    }

    fn as_list(&self) -> Result<&[Value]> {
        match self {
            Value::List(v) => Ok(v),
            other => Err(perr(format!("expected a list, found {other:?}"))),
        }
    }
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { s: s.as_bytes(), pos: 0 }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(perr(format!("expected '{}' at offset {}", c as char, self.pos)))
        }
    }

    fn value(&mut self) -> Result<Value> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.peek() == Some(b']') {
                    self.pos += 1;
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(Value::List(items));
                        }
                        _ => return Err(perr(format!("unterminated list at offset {}", self.pos))),
                    }
                }
            }
            Some(b'{') => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.peek() == Some(b'}') {
                    self.pos += 1;
                    return Ok(Value::Map(items));
                }
                loop {
                    let key = match self.value()? {
                        Value::Word(w) => w,
                        other => return Err(perr(format!("bad map key {other:?}"))),
                    };
                    self.expect(b':')?;
                    items.push((key, self.value()?));
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            return Ok(Value::Map(items));
                        }
                        _ => return Err(perr(format!("unterminated map at offset {}", self.pos))),
                    }
                }
            }
            Some(b'"') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos] != b'"' {
                    self.pos += 1;
                }
                if self.pos >= self.s.len() {
                    return Err(perr("unterminated string"));
                }
                let w = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
                self.pos += 1;
                Ok(Value::Word(w))
            }
            Some(c) if c == b'-' || c == b'(' || c.is_ascii_alphanumeric() => {
                // a bare token runs to the next delimiter, so expressions such
                // as `z^-1+1` need no quoting inside lists
                let start = self.pos;
                while self.pos < self.s.len() && !matches!(self.s[self.pos], b',' | b']' | b'}' | b':') {
                    self.pos += 1;
                }
                let txt = String::from_utf8_lossy(&self.s[start..self.pos]).trim().to_string();
                Ok(txt.parse::<i64>().map(Value::Int).unwrap_or(Value::Word(txt)))
            }
            Some(c) => Err(perr(format!("unexpected '{}' at offset {}", c as char, self.pos))),
            None => Err(perr("unexpected end of input")),
        }
    }
}

/// Parses a structured value; trailing input is an error.
pub fn parse_value(s: &str) -> Result<Value> {
    let mut c = Cursor::new(s);
    let v = c.value()?;
    if c.peek().is_some() {
        return Err(perr(format!("trailing input at offset {}", c.pos)));
    }
    Ok(v)
}

/// Parses `q=p`, `q=p^e;mod=[...]` or `q=N;mod=[...]` (prime power `N`).
pub fn parse_field(s: &str) -> Result<Field> {
    let mut q_part = None;
    let mut mod_part = None;
    for piece in s.split(';') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (k, v) = piece.split_once('=').ok_or_else(|| perr(format!("expected key=value in '{piece}'")))?;
        match k.trim() {
            "q" => q_part = Some(v.trim().to_string()),
            "mod" => mod_part = Some(v.trim().to_string()),
            other => return Err(perr(format!("unknown field key '{other}'"))),
        }
    }
    let q_txt = q_part.ok_or_else(|| perr("field spec needs q="))?;
    let (p, e) = match q_txt.split_once('^') {
        Some((p, e)) => (
            p.trim().parse::<u32>().map_err(|_| perr(format!("bad prime '{p}'")))?,
            e.trim().parse::<u32>().map_err(|_| perr(format!("bad exponent '{e}'")))?,
        ),
        None => {
            let n = q_txt.parse::<u32>().map_err(|_| perr(format!("bad field order '{q_txt}'")))?;
            prime_power(n).ok_or_else(|| Error::InvalidField(format!("{n} is not a prime power")))?
        }
    };
    let spec = if e == 1 {
        FieldSpec::prime(p)
    } else {
        let m = mod_part.ok_or_else(|| Error::InvalidField(format!("q={p}^{e} needs an irreducible modulus mod=[...]")))?;
        let coeffs = parse_value(&m)?
            .as_list()?
            .iter()
            .map(|v| v.as_int().and_then(|n| u32::try_from(n).map_err(|_| perr("negative modulus coefficient"))))
            .collect::<Result<Vec<u32>>>()?;
        if coeffs.len() != e as usize + 1 {
            return Err(Error::InvalidField(format!("modulus for e={e} needs {} coefficients", e + 1)));
        }
        FieldSpec::extension(p, coeffs)
    };
    Field::new(spec)
}

fn prime_power(n: u32) -> Option<(u32, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    if !is_prime(p) {
        return None;
    }
    let (mut m, mut e) = (n, 0);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

pub fn format_field(f: &Field) -> String {
    let s = f.spec();
    if s.e == 1 {
        format!("q={}", s.p)
    } else {
        let m: Vec<String> = s.modulus.iter().map(|c| c.to_string()).collect();
        format!("q={}^{};mod=[{}]", s.p, s.e, m.join(","))
    }
}

pub fn elem_from_value(v: &Value, f: &Field) -> Result<Fq> {
    match v {
        Value::Int(n) => {
            if f.e() == 1 {
                Ok(f.from_int(*n))
            } else if *n >= 0 && (*n as u64) < f.p() as u64 {
                Ok(Fq(*n as u32))
            } else {
                Err(perr(format!("integer {n} is not in the prime subfield; use a digit list")))
            }
        }
        Value::List(items) => {
            let digits = items
                .iter()
                .map(|d| d.as_int().and_then(|n| u32::try_from(n).map_err(|_| perr("negative digit"))))
                .collect::<Result<Vec<u32>>>()?;
            f.from_digits(&digits)
        }
        other => Err(perr(format!("expected a field element, found {other:?}"))),
    }
}

pub fn format_elem(a: Fq, f: &Field) -> String {
    if f.e() == 1 {
        a.0.to_string()
    } else {
        let d: Vec<String> = f.digits(a).iter().map(|x| x.to_string()).collect();
        format!("[{}]", d.join(","))
    }
}

fn format_elems(v: &[Fq], f: &Field) -> String {
    let parts: Vec<String> = v.iter().map(|&a| format_elem(a, f)).collect();
    format!("[{}]", parts.join(","))
}

pub fn poly_from_value(v: &Value, f: &Field) -> Result<Poly> {
    match v {
        Value::List(items) => Ok(Poly::from_coeffs(items.iter().map(|x| elem_from_value(x, f)).collect::<Result<_>>()?)),
        Value::Word(w) => parse_poly_expr(w, f),
        Value::Int(_) => Ok(Poly::constant(elem_from_value(v, f)?)),
        other => Err(perr(format!("expected a polynomial, found {other:?}"))),
    }
}

/// Parses a polynomial in list form or as an expression.
pub fn parse_poly(s: &str, f: &Field) -> Result<Poly> {
    let t = s.trim();
    if t.starts_with('[') {
        poly_from_value(&parse_value(t)?, f)
    } else {
        parse_poly_expr(t, f)
    }
}

/// Canonical list form `[c0,c1,...]`.
pub fn format_poly(p: &Poly, f: &Field) -> String {
    format_elems(p.coeffs(), f)
}

/// Terms `(coefficient, exponent)` of an expression like `2z^3 - z + z^-2`.
fn parse_terms(s: &str, f: &Field) -> Result<Vec<(Fq, i64)>> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(perr("empty expression"));
    }
    let b = t.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let mut negative = false;
        while i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            if b[i] == b'-' {
                negative = !negative;
            }
            i += 1;
        }
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        let coef: Option<i64> = if i > start {
            Some(t[start..i].parse().map_err(|_| perr(format!("bad coefficient in '{s}'")))?)
        } else {
            None
        };
        if i < b.len() && b[i] == b'*' {
            i += 1;
        }
        let mut exp = 0i64;
        if i < b.len() && b[i] == b'z' {
            i += 1;
            exp = 1;
            if i < b.len() && b[i] == b'^' {
                i += 1;
                let es = i;
                if i < b.len() && b[i] == b'-' {
                    i += 1;
                }
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                exp = t[es..i].parse().map_err(|_| perr(format!("bad exponent in '{s}'")))?;
            }
        } else if coef.is_none() {
            return Err(perr(format!("cannot parse term at offset {i} of '{s}'")));
        }
        let mut c = f.from_int(coef.unwrap_or(1));
        if negative {
            c = f.neg(c);
        }
        out.push((c, exp));
        if i < b.len() && b[i] != b'+' && b[i] != b'-' {
            return Err(perr(format!("unexpected '{}' in '{s}'", b[i] as char)));
        }
    }
    Ok(out)
}

/// Parses an expression in `z` with integer coefficients (reduced into the
/// prime subfield) and nonnegative exponents.
pub fn parse_poly_expr(s: &str, f: &Field) -> Result<Poly> {
    let mut p = Poly::zero();
    for (c, e) in parse_terms(s, f)? {
        if e < 0 {
            return Err(perr(format!("negative exponent in polynomial '{s}'")));
        }
        p = p.add(&Poly::monomial(c, e as usize), f);
    }
    Ok(p)
}

/// Parses an exact Laurent polynomial expression such as `z + z^-3`.
pub fn parse_laurent_expr(s: &str, f: &Field) -> Result<Laurent> {
    let mut x = Laurent::zero();
    for (c, e) in parse_terms(s, f)? {
        x = x.add(&Laurent::monomial(c, e), f);
    }
    Ok(x)
}

/// Human-readable expression; only available for prime fields.
pub fn format_poly_expr(p: &Poly, f: &Field) -> Option<String> {
    if f.e() != 1 {
        return None;
    }
    if p.is_zero() {
        return Some("0".into());
    }
    let mut terms = Vec::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let coef = if c.0 == 1 && i > 0 { String::new() } else { c.0.to_string() };
        terms.push(match i {
            0 => coef,
            1 => format!("{coef}z"),
            _ => format!("{coef}z^{i}"),
        });
    }
    Some(terms.join("+"))
}

/// Splits `num/den` at the top-level slash, stripping outer parentheses.
pub fn parse_rational_expr(s: &str, f: &Field) -> Result<(Poly, Poly)> {
    let strip = |t: &str| -> String {
        let t = t.trim();
        if t.starts_with('(') && t.ends_with(')') {
            t[1..t.len() - 1].to_string()
        } else {
            t.to_string()
        }
    };
    let (mut depth, mut split) = (0i32, None);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => split = Some(i),
            _ => {}
        }
    }
    match split {
        Some(i) => Ok((parse_poly(&strip(&s[..i]), f)?, parse_poly(&strip(&s[i + 1..]), f)?)),
        None => Ok((parse_poly(&strip(s), f)?, Poly::one())),
    }
}

pub fn laurent_from_value(v: &Value, f: &Field) -> Result<Laurent> {
    match v {
        Value::Map(_) => {
            let prec = v.get("prec").ok_or_else(|| perr("Laurent needs prec"))?.as_int()?;
            let exact = match v.get("exact") {
                None => false,
                Some(Value::Word(w)) if w == "true" => true,
                Some(Value::Word(w)) if w == "false" => false,
                Some(other) => return Err(perr(format!("bad exact flag {other:?}"))),
            };
            let coeffs = v
                .get("coeffs")
                .ok_or_else(|| perr("Laurent needs coeffs"))?
                .as_list()?
                .iter()
                .map(|x| elem_from_value(x, f))
                .collect::<Result<Vec<Fq>>>()?;
            let top = match v.get("top").ok_or_else(|| perr("Laurent needs top"))? {
                Value::Word(w) if w == "-inf" => {
                    if coeffs.iter().any(|c| !c.is_zero()) {
                        return Err(perr("top:-inf with nonzero coefficients"));
                    }
                    0
                }
                other => other.as_int()?,
            };
            if !coeffs.is_empty() && coeffs[0].is_zero() {
                return Err(perr("leading coefficient must be nonzero"));
            }
            if !exact && !coeffs.is_empty() && top - (coeffs.len() as i64) + 1 < -prec {
                return Err(perr("more coefficients than the stated precision"));
            }
            Ok(Laurent::from_parts(top, coeffs, prec, exact))
        }
        Value::Word(w) => parse_laurent_expr(w, f),
        Value::List(_) | Value::Int(_) => Ok(Laurent::from_poly(&poly_from_value(v, f)?)),
    }
}

pub fn parse_laurent(s: &str, f: &Field) -> Result<Laurent> {
    let t = s.trim();
    if t.starts_with('{') || t.starts_with('[') {
        laurent_from_value(&parse_value(t)?, f)
    } else {
        parse_laurent_expr(t, f)
    }
}

/// Canonical `{top:n,coeffs:[...],prec:K}` form.
pub fn format_laurent(x: &Laurent, f: &Field) -> String {
    let top = match x.top() {
        Some(t) => t.to_string(),
        None => "-inf".into(),
    };
    let mut s = format!("{{top:{top},coeffs:{},prec:{}", format_elems(x.coeff_run(), f), x.stored_prec());
    if x.is_exact() {
        s.push_str(",exact:true");
    }
    s.push('}');
    s
}

pub fn matrix_from_value(v: &Value, f: &Field) -> Result<LaurentMatrix> {
    let rows = v
        .as_list()?
        .iter()
        .map(|r| r.as_list()?.iter().map(|x| laurent_from_value(x, f)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    LaurentMatrix::from_rows(rows)
}

pub fn parse_matrix(s: &str, f: &Field) -> Result<LaurentMatrix> {
    matrix_from_value(&parse_value(s)?, f)
}

pub fn format_matrix(a: &LaurentMatrix, f: &Field) -> String {
    let rows: Vec<String> = (0..a.rows())
        .map(|i| {
            let r: Vec<String> = a.row(i).iter().map(|x| format_laurent(x, f)).collect();
            format!("[{}]", r.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

pub fn parse_laurent_vec(s: &str, f: &Field) -> Result<Vec<Laurent>> {
    parse_value(s)?.as_list()?.iter().map(|x| laurent_from_value(x, f)).collect()
}

pub fn format_laurent_vec(v: &[Laurent], f: &Field) -> String {
    let parts: Vec<String> = v.iter().map(|x| format_laurent(x, f)).collect();
    format!("[{}]", parts.join(","))
}

pub fn parse_poly_vec(s: &str, f: &Field) -> Result<Vec<Poly>> {
    parse_value(s)?.as_list()?.iter().map(|x| poly_from_value(x, f)).collect()
}

pub fn format_poly_vec(v: &[Poly], f: &Field) -> String {
    let parts: Vec<String> = v.iter().map(|p| format_poly(p, f)).collect();
    format!("[{}]", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn field_specs() {
        let f = parse_field("q=2").unwrap();
        assert_eq!(f.q(), 2);
        let g = parse_field("q=2^2;mod=[1,1,1]").unwrap();
        assert_eq!(g.q(), 4);
        assert_eq!(format_field(&g), "q=2^2;mod=[1,1,1]");
        assert_eq!(parse_field("q=4; mod=[1,1,1]").unwrap(), g);
        assert!(parse_field("q=4").is_err());
        assert!(parse_field("q=6").is_err());
        assert!(parse_field("q=2^2;mod=[1,0,1]").is_err());
        assert_eq!(format_field(&parse_field(" q = 3 ").unwrap()), "q=3");
    }

    #[test]
    fn poly_forms() {
        let f = parse_field("q=2").unwrap();
        let p = parse_poly("z^4+z^2+1", &f).unwrap();
        assert_eq!(format_poly(&p, &f), "[1,0,1,0,1]");
        assert_eq!(parse_poly("[1,0,1,0,1]", &f).unwrap(), p);
        assert_eq!(format_poly_expr(&p, &f).unwrap(), "z^4+z^2+1");
        let f3 = parse_field("q=3").unwrap();
        assert_eq!(format_poly(&parse_poly("2z^2 - z + 4", &f3).unwrap(), &f3), "[1,2,2]");
        let g = parse_field("q=2^2;mod=[1,1,1]").unwrap();
        let p = parse_poly("[[1,0],[0,1]]", &g).unwrap();
        assert_eq!(format_poly(&p, &g), "[[1,0],[0,1]]");
        assert!(parse_poly("z^", &f).is_err());
        assert!(parse_poly("z^-1", &f).is_err());
    }

    #[test]
    fn rational_expressions() {
        let f = parse_field("q=2").unwrap();
        let (n, d) = parse_rational_expr("1/(z+1)", &f).unwrap();
        assert!(n.is_one());
        assert_eq!(format_poly(&d, &f), "[1,1]");
        let (n, d) = parse_rational_expr("(z^2+1)/z^3", &f).unwrap();
        assert_eq!(format_poly(&n, &f), "[1,0,1]");
        assert_eq!(format_poly(&d, &f), "[0,0,0,1]");
    }

    #[test]
    fn laurent_forms() {
        let f = parse_field("q=2").unwrap();
        let x = parse_laurent("{top:-1, coeffs:[1,0,1], prec:5}", &f).unwrap();
        assert_eq!(format_laurent(&x, &f), "{top:-1,coeffs:[1,0,1,0,0],prec:5}");
        let z = parse_laurent("{top:-inf,coeffs:[],prec:7}", &f).unwrap();
        assert!(z.norm().is_err());
        let e = parse_laurent("z+z^-3", &f).unwrap();
        assert_eq!(format_laurent(&e, &f), "{top:1,coeffs:[1,0,0,0,1],prec:3,exact:true}");
        let json = r#"{"top":-1,"coeffs":[1,0,1,0,0],"prec":5}"#;
        assert_eq!(parse_laurent(json, &f).unwrap(), x);
        let m = parse_matrix("[[{top:-1,coeffs:[1],prec:3}],[\"z^-2\"]]", &f).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(parse_matrix(&format_matrix(&m, &f), &f).unwrap(), m);
        // bare expressions inside lists, with and without spaces
        let m = parse_matrix("[[z^-1, z^-1 + z^-3], [1, -z^-2]]", &f).unwrap();
        assert_eq!(m.get(0, 1), &parse_laurent("z^-1+z^-3", &f).unwrap());
        assert_eq!(m.get(1, 1), &parse_laurent("z^-2", &f).unwrap());
        assert_eq!(parse_poly_vec("[z^2+1, 1]", &f).unwrap()[0], parse_poly("[1,0,1]", &f).unwrap());
    }

    proptest! {
        #[test]
        fn laurent_roundtrip(hi in -6i64..6, c in proptest::collection::vec(0u32..3, 0..10), prec in -2i64..10, exact in any::<bool>()) {
            let f = parse_field("q=3").unwrap();
            let x = Laurent::from_parts(hi, c.into_iter().map(Fq).collect(), prec, exact);
            let s = format_laurent(&x, &f);
            let y = parse_laurent(&s, &f).unwrap();
            prop_assert_eq!(&y, &x);
            prop_assert_eq!(format_laurent(&y, &f), s);
        }

        #[test]
        fn poly_roundtrip(c in proptest::collection::vec(0u32..4, 0..10)) {
            let f = parse_field("q=2^2;mod=[1,1,1]").unwrap();
            let p = Poly::from_coeffs(c.into_iter().map(Fq).collect());
            prop_assert_eq!(parse_poly(&format_poly(&p, &f), &f).unwrap(), p);
        }
    }
}
