//! PCTL formulas: AST, parser, pretty-printer, normalization, closure.
//!
//! Surface grammar (ASCII, modeled on common probabilistic model checker
//! input languages):
//!
//! ```text
//! state := "true" | "false" | IDENT | "!" state | state "&" state
//!        | state "|" state | state "->" state
//!        | "P" CMP PROB "[" path "]" | "(" state ")"
//! path  := "X" state | state "U" state | state "U<=" NAT state
//!        | "F" state | "G" state | "F<=" NAT state | "G<=" NAT state
//! CMP   := ">=" | ">" | "<=" | "<" | "="
//! PROB  := decimal | NAT "/" NAT
//! ```
//!
//! Precedence `!` > `&` > `|` > `->`; `&` and `|` are left-associative,
//! `->` is right-associative. `//` comments run to end of line.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

/// Comparison relation of the probability operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
}

impl Comparison {
    /// Order dual, used when rewriting `G` to `U` over the complement:
    /// >= <-> <=, > <-> <, = is self-dual.
    pub fn dual(self) -> Comparison {
        match self {
            Comparison::Ge => Comparison::Le,
            Comparison::Gt => Comparison::Lt,
            Comparison::Le => Comparison::Ge,
            Comparison::Lt => Comparison::Gt,
            Comparison::Eq => Comparison::Eq,
        }
    }

    /// Evaluate `lhs cmp rhs` with exact rational comparison.
    pub fn holds(self, lhs: &BigRational, rhs: &BigRational) -> bool {
        match self {
            Comparison::Ge => lhs >= rhs,
            Comparison::Gt => lhs > rhs,
            Comparison::Le => lhs <= rhs,
            Comparison::Lt => lhs < rhs,
            Comparison::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
            Comparison::Le => "<=",
            Comparison::Lt => "<",
            Comparison::Eq => "=",
        }
    }
}

/// A PCTL state formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Prob {
        cmp: Comparison,
        threshold: BigRational,
        path: Box<PathFormula>,
    },
}

/// A PCTL path formula. `Finally` and `Globally` (with optional step bound)
/// are surface sugar; [`Formula::normalize`] removes them, leaving only
/// `Next`, `Until` and `BoundedUntil`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathFormula {
    Next(Formula),
    Until(Formula, Formula),
    BoundedUntil(Formula, Formula, u64),
    Finally(Formula, Option<u64>),
    Globally(Formula, Option<u64>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_owned())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn prob(cmp: Comparison, threshold: BigRational, path: PathFormula) -> Formula {
        Formula::Prob {
            cmp,
            threshold,
            path: Box::new(path),
        }
    }

    /// Atomic propositions occurring in the formula, in first-use order.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                if !out.iter().any(|x| x == a) {
                    out.push(a.clone());
                }
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            Formula::Prob { path, .. } => match path.as_ref() {
                PathFormula::Next(f) | PathFormula::Finally(f, _) | PathFormula::Globally(f, _) => {
                    f.collect_atoms(out)
                }
                PathFormula::Until(l, r) | PathFormula::BoundedUntil(l, r, _) => {
                    l.collect_atoms(out);
                    r.collect_atoms(out);
                }
            },
        }
    }

    /// Rewrite away `F`/`G` sugar. Output contains only `Next`, `Until`,
    /// `BoundedUntil` path operators:
    ///
    /// - `F psi  ->  true U psi` (likewise for the bounded form);
    /// - `P cmp l [G psi]  ->  P cmp' (1-l) [true U !psi]` with `cmp'` the
    ///   order dual of `cmp` (likewise for the bounded form).
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(f) => Formula::not(f.normalize()),
            Formula::And(l, r) => Formula::and(l.normalize(), r.normalize()),
            Formula::Or(l, r) => Formula::or(l.normalize(), r.normalize()),
            Formula::Implies(l, r) => Formula::implies(l.normalize(), r.normalize()),
            Formula::Prob {
                cmp,
                threshold,
                path,
            } => match path.as_ref() {
                PathFormula::Next(f) => Formula::prob(
                    *cmp,
                    threshold.clone(),
                    PathFormula::Next(f.normalize()),
                ),
                PathFormula::Until(l, r) => Formula::prob(
                    *cmp,
                    threshold.clone(),
                    PathFormula::Until(l.normalize(), r.normalize()),
                ),
                PathFormula::BoundedUntil(l, r, k) => Formula::prob(
                    *cmp,
                    threshold.clone(),
                    PathFormula::BoundedUntil(l.normalize(), r.normalize(), *k),
                ),
                PathFormula::Finally(f, None) => Formula::prob(
                    *cmp,
                    threshold.clone(),
                    PathFormula::Until(Formula::True, f.normalize()),
                ),
                PathFormula::Finally(f, Some(k)) => Formula::prob(
                    *cmp,
                    threshold.clone(),
                    PathFormula::BoundedUntil(Formula::True, f.normalize(), *k),
                ),
                PathFormula::Globally(f, bound) => {
                    let neg = Formula::not(f.normalize());
                    let lambda = BigRational::one() - threshold;
                    let path = match bound {
                        None => PathFormula::Until(Formula::True, neg),
                        Some(k) => PathFormula::BoundedUntil(Formula::True, neg, *k),
                    };
                    Formula::prob(cmp.dual(), lambda, path)
                }
            },
        }
    }

    /// All state subformulas of a normalized formula, deduplicated
    /// structurally, atoms first, otherwise bottom-up: every subformula
    /// precedes any formula containing it.
    pub fn closure(&self) -> Vec<Formula> {
        let mut post = Vec::new();
        self.collect_closure(&mut post);
        let (atoms, rest): (Vec<_>, Vec<_>) =
            post.into_iter().partition(|f| matches!(f, Formula::Atom(_)));
        atoms.into_iter().chain(rest).collect()
    }

    fn collect_closure(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(f) => f.collect_closure(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_closure(out);
                r.collect_closure(out);
            }
            Formula::Prob { path, .. } => match path.as_ref() {
                PathFormula::Next(f) | PathFormula::Finally(f, _) | PathFormula::Globally(f, _) => {
                    f.collect_closure(out)
                }
                PathFormula::Until(l, r) | PathFormula::BoundedUntil(l, r, _) => {
                    l.collect_closure(out);
                    r.collect_closure(out);
                }
            },
        }
        if !out.contains(self) {
            out.push(self.clone());
        }
    }

    /// Number of AST nodes (state and path nodes).
    pub fn node_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) => 1 + f.node_count(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                1 + l.node_count() + r.node_count()
            }
            Formula::Prob { path, .. } => {
                1 + match path.as_ref() {
                    PathFormula::Next(f)
                    | PathFormula::Finally(f, _)
                    | PathFormula::Globally(f, _) => f.node_count(),
                    PathFormula::Until(l, r) | PathFormula::BoundedUntil(l, r, _) => {
                        l.node_count() + r.node_count()
                    }
                }
            }
        }
    }
}

/// Print a rational as `n/d`, or as a bare integer when the denominator is 1.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// Precedence levels for printing: -> is 1, | is 2, & is 3, ! is 4, atoms 5.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) => 4,
        _ => 5,
    }
}

fn fmt_formula(f: &Formula, min_prec: u8, out: &mut String) {
    let p = prec(f);
    if p < min_prec {
        out.push('(');
        fmt_formula(f, 0, out);
        out.push(')');
        return;
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(a) => out.push_str(a),
        Formula::Not(g) => {
            out.push('!');
            fmt_formula(g, 4, out);
        }
        Formula::And(l, r) => {
            fmt_formula(l, 3, out);
            out.push_str(" & ");
            fmt_formula(r, 4, out);
        }
        Formula::Or(l, r) => {
            fmt_formula(l, 2, out);
            out.push_str(" | ");
            fmt_formula(r, 3, out);
        }
        Formula::Implies(l, r) => {
            fmt_formula(l, 2, out);
            out.push_str(" -> ");
            fmt_formula(r, 1, out);
        }
        Formula::Prob {
            cmp,
            threshold,
            path,
        } => {
            out.push('P');
            out.push_str(cmp.symbol());
            out.push_str(&fmt_rational(threshold));
            out.push('[');
            match path.as_ref() {
                PathFormula::Next(g) => {
                    out.push_str("X ");
                    fmt_formula(g, 5, out);
                }
                PathFormula::Until(l, r) => {
                    fmt_formula(l, 5, out);
                    out.push_str(" U ");
                    fmt_formula(r, 5, out);
                }
                PathFormula::BoundedUntil(l, r, k) => {
                    fmt_formula(l, 5, out);
                    out.push_str(&format!(" U<={} ", k));
                    fmt_formula(r, 5, out);
                }
                PathFormula::Finally(g, k) => {
                    match k {
                        None => out.push_str("F "),
                        Some(k) => out.push_str(&format!("F<={} ", k)),
                    }
                    fmt_formula(g, 5, out);
                }
                PathFormula::Globally(g, k) => {
                    match k {
                        None => out.push_str("G "),
                        Some(k) => out.push_str(&format!("G<={} ", k)),
                    }
                    fmt_formula(g, 5, out);
                }
            }
            out.push(']');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        fmt_formula(self, 0, &mut s);
        f.write_str(&s)
    }
}

/// Pretty-print a formula; `parse` maps the result back to an identical AST.
pub fn pretty(f: &Formula) -> String {
    f.to_string()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {}", expected.join(", "))]
    Syntax {
        position: usize,
        expected: Vec<String>,
    },
    #[error("probability threshold {value} at byte {position} is outside [0,1]")]
    Threshold { position: usize, value: String },
    #[error("step bound `{token}` at byte {position} is not a nonnegative integer")]
    Bound { position: usize, token: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    P,
    KwX,
    KwU,
    KwF,
    KwG,
    Nat(BigInt),
    // digits "." digits, kept split for exact conversion
    Decimal(String, String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    Cmp(Comparison),
    Slash,
    LBracket,
    RBracket,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{}`", s),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::P => "`P`".into(),
            Tok::KwX => "`X`".into(),
            Tok::KwU => "`U`".into(),
            Tok::KwF => "`F`".into(),
            Tok::KwG => "`G`".into(),
            Tok::Nat(n) => format!("`{}`", n),
            Tok::Decimal(a, b) => format!("`{}.{}`", a, b),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Cmp(c) => format!("`{}`", c.symbol()),
            Tok::Slash => "`/`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && i + 1 < bytes.len() && bytes[i + 1] == b'/' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = match c {
            '!' => {
                i += 1;
                Tok::Bang
            }
            '&' => {
                i += 1;
                Tok::Amp
            }
            '|' => {
                i += 1;
                Tok::Pipe
            }
            '[' => {
                i += 1;
                Tok::LBracket
            }
            ']' => {
                i += 1;
                Tok::RBracket
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '/' => {
                i += 1;
                Tok::Slash
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    i += 2;
                    Tok::Arrow
                } else {
                    return Err(ParseError::Syntax {
                        position: start,
                        expected: vec!["`->`".into()],
                    });
                }
            }
            '>' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'=' {
                    i += 2;
                    Tok::Cmp(Comparison::Ge)
                } else {
                    i += 1;
                    Tok::Cmp(Comparison::Gt)
                }
            }
            '<' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'=' {
                    i += 2;
                    Tok::Cmp(Comparison::Le)
                } else {
                    i += 1;
                    Tok::Cmp(Comparison::Lt)
                }
            }
            '=' => {
                i += 1;
                Tok::Cmp(Comparison::Eq)
            }
            '0'..='9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    let int_part = text[i..j].to_owned();
                    let mut k = j + 1;
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    if k == j + 1 {
                        return Err(ParseError::Syntax {
                            position: j + 1,
                            expected: vec!["digit".into()],
                        });
                    }
                    let frac_part = text[j + 1..k].to_owned();
                    i = k;
                    Tok::Decimal(int_part, frac_part)
                } else {
                    let n: BigInt = text[i..j].parse().expect("digit run");
                    i = j;
                    Tok::Nat(n)
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let word = &text[i..j];
                i = j;
                match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "P" => Tok::P,
                    "X" => Tok::KwX,
                    "U" => Tok::KwU,
                    "F" => Tok::KwF,
                    "G" => Tok::KwG,
                    _ => Tok::Ident(word.to_owned()),
                }
            }
            _ => {
                return Err(ParseError::Syntax {
                    position: start,
                    expected: vec!["formula token".into()],
                })
            }
        };
        toks.push((start, tok));
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, desc: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(&[desc])),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            position: self.position(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    // state := implies-chain, right associative, lowest precedence
    fn state(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_chain()?;
        if let Some(Tok::Arrow) = self.peek() {
            self.bump();
            let rhs = self.state()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_chain(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and_chain()?;
        while let Some(Tok::Pipe) = self.peek() {
            self.bump();
            let rhs = self.and_chain()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_chain(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Amp) = self.peek() {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.bump();
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Formula::False)
            }
            Some(Tok::Ident(a)) => {
                self.bump();
                Ok(Formula::Atom(a))
            }
            Some(Tok::LParen) => {
                self.bump();
                let f = self.state()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::P) => {
                self.bump();
                let cmp = match self.bump() {
                    Some(Tok::Cmp(c)) => c,
                    _ => {
                        self.pos = self.pos.saturating_sub(1);
                        return Err(self.unexpected(&["comparison operator"]));
                    }
                };
                let threshold = self.probability()?;
                self.expect(&Tok::LBracket, "`[`")?;
                let path = self.path()?;
                self.expect(&Tok::RBracket, "`]`")?;
                Ok(Formula::prob(cmp, threshold, path))
            }
            _ => Err(self.unexpected(&[
                "`true`",
                "`false`",
                "identifier",
                "`!`",
                "`P`",
                "`(`",
            ])),
        }
    }

    fn probability(&mut self) -> Result<BigRational, ParseError> {
        let at = self.position();
        let value = match self.bump() {
            Some(Tok::Nat(n)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    match self.bump() {
                        Some(Tok::Nat(d)) if !d.is_zero() => BigRational::new(n, d),
                        _ => {
                            self.pos = self.pos.saturating_sub(1);
                            return Err(self.unexpected(&["nonzero denominator"]));
                        }
                    }
                } else {
                    BigRational::from_integer(n)
                }
            }
            Some(Tok::Decimal(int_part, frac_part)) => {
                let digits: BigInt = format!("{}{}", int_part, frac_part)
                    .parse()
                    .expect("digit run");
                let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
                BigRational::new(digits, denom)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.unexpected(&["probability literal"]));
            }
        };
        if value < BigRational::zero() || value > BigRational::one() {
            return Err(ParseError::Threshold {
                position: at,
                value: fmt_rational(&value),
            });
        }
        Ok(value)
    }

    // optional "<=" NAT suffix after U/F/G
    fn step_bound(&mut self) -> Result<Option<u64>, ParseError> {
        match self.peek() {
            Some(Tok::Cmp(Comparison::Le)) => {
                self.bump();
                let at = self.position();
                match self.bump() {
                    Some(Tok::Nat(n)) => {
                        use num_traits::ToPrimitive;
                        n.to_u64().map(Some).ok_or(ParseError::Bound {
                            position: at,
                            token: n.to_string(),
                        })
                    }
                    Some(t) => Err(ParseError::Bound {
                        position: at,
                        token: t.describe(),
                    }),
                    None => Err(ParseError::Bound {
                        position: at,
                        token: "end of input".into(),
                    }),
                }
            }
            _ => Ok(None),
        }
    }

    fn path(&mut self) -> Result<PathFormula, ParseError> {
        match self.peek() {
            Some(Tok::KwX) => {
                self.bump();
                Ok(PathFormula::Next(self.state()?))
            }
            Some(Tok::KwF) => {
                self.bump();
                let k = self.step_bound()?;
                Ok(PathFormula::Finally(self.state()?, k))
            }
            Some(Tok::KwG) => {
                self.bump();
                let k = self.step_bound()?;
                Ok(PathFormula::Globally(self.state()?, k))
            }
            _ => {
                let left = self.state()?;
                self.expect(&Tok::KwU, "`U`")?;
                match self.step_bound()? {
                    Some(k) => Ok(PathFormula::BoundedUntil(left, self.state()?, k)),
                    None => Ok(PathFormula::Until(left, self.state()?)),
                }
            }
        }
    }
}

/// Parse a PCTL state formula from text.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.state()?;
    if p.pos != p.toks.len() {
        return Err(p.unexpected(&["end of input"]));
    }
    Ok(f)
}
