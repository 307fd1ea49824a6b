//! Minimal s-expression reader for SMT-LIB solver responses.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SexpError {
    #[error("unbalanced parenthesis at byte {0}")]
    Unbalanced(usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("trailing garbage at byte {0}")]
    Trailing(usize),
    #[error("`{0}` is not a rational value")]
    NotRational(String),
    #[error("`{0}` is not a boolean value")]
    NotBoolean(String),
    #[error("`{0}` is not an integer value")]
    NotInteger(String),
}

fn skip_ws(bytes: &[u8], mut i: usize) -> usize {
    loop {
        while i < bytes.len() && (bytes[i] as char).is_whitespace() {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b';' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        return i;
    }
}

fn parse_at(bytes: &[u8], text: &str, i: usize) -> Result<(Sexp, usize), SexpError> {
    let i = skip_ws(bytes, i);
    if i >= bytes.len() {
        return Err(SexpError::UnexpectedEnd);
    }
    if bytes[i] == b'(' {
        let mut items = Vec::new();
        let mut j = skip_ws(bytes, i + 1);
        loop {
            if j >= bytes.len() {
                return Err(SexpError::Unbalanced(i));
            }
            if bytes[j] == b')' {
                return Ok((Sexp::List(items), j + 1));
            }
            let (item, next) = parse_at(bytes, text, j)?;
            items.push(item);
            j = skip_ws(bytes, next);
        }
    }
    if bytes[i] == b')' {
        return Err(SexpError::Unbalanced(i));
    }
    let mut j = i;
    while j < bytes.len()
        && bytes[j] != b'('
        && bytes[j] != b')'
        && !(bytes[j] as char).is_whitespace()
    {
        j += 1;
    }
    Ok((Sexp::Atom(text[i..j].to_string()), j))
}

/// Parse a single s-expression, ignoring trailing whitespace/comments.
pub fn parse(text: &str) -> Result<Sexp, SexpError> {
    let bytes = text.as_bytes();
    let (sexp, next) = parse_at(bytes, text, 0)?;
    let next = skip_ws(bytes, next);
    if next != bytes.len() {
        return Err(SexpError::Trailing(next));
    }
    Ok(sexp)
}

/// Render, for diagnostics.
pub fn to_string(s: &Sexp) -> String {
    match s {
        Sexp::Atom(a) => a.clone(),
        Sexp::List(items) => {
            let inner: Vec<String> = items.iter().map(to_string).collect();
            format!("({})", inner.join(" "))
        }
    }
}

fn decimal_to_rational(s: &str) -> Option<BigRational> {
    let (int_part, frac_part) = s.split_once('.')?;
    let digits: BigInt = format!("{}{}", int_part, frac_part).parse().ok()?;
    Some(BigRational::new(
        digits,
        BigInt::from(10u32).pow(frac_part.len() as u32),
    ))
}

/// Interpret a solver value term as an exact rational. Accepts `k`,
/// `(- k)`, `(/ a b)`, `(- (/ a b))`, and exact decimals `a.b` (solvers
/// print Reals in any of these shapes).
pub fn as_rational(s: &Sexp) -> Result<BigRational, SexpError> {
    match s {
        Sexp::Atom(a) => {
            if let Ok(n) = a.parse::<BigInt>() {
                return Ok(BigRational::from_integer(n));
            }
            decimal_to_rational(a).ok_or_else(|| SexpError::NotRational(a.clone()))
        }
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), inner] if op == "-" => Ok(-as_rational(inner)?),
            [Sexp::Atom(op), num, den] if op == "/" => {
                let n = as_rational(num)?;
                let d = as_rational(den)?;
                Ok(n / d)
            }
            _ => Err(SexpError::NotRational(to_string(s))),
        },
    }
}

pub fn as_bool(s: &Sexp) -> Result<bool, SexpError> {
    match s {
        Sexp::Atom(a) if a == "true" => Ok(true),
        Sexp::Atom(a) if a == "false" => Ok(false),
        _ => Err(SexpError::NotBoolean(to_string(s))),
    }
}

pub fn as_integer(s: &Sexp) -> Result<BigInt, SexpError> {
    let r = as_rational(s).map_err(|_| SexpError::NotInteger(to_string(s)))?;
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(SexpError::NotInteger(to_string(s)))
    }
}
