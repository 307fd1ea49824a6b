//! Exact-rational discrete-time Markov chains: validation, simplicity
//! checks, and PRISM explicit-state / DOT export.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

use crate::syntax::fmt_rational;

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DtmcError {
    #[error("row {row} sums to {sum}, not 1")]
    Stochasticity { row: usize, sum: String },
    #[error("transition ({row},{col}) has probability {value} outside [0,1]")]
    Range {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("transition matrix is {rows}x{cols}, expected {expected}x{expected}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("import error at line {line}: {message}")]
    Import { line: usize, message: String },
}

/// A finite DTMC with exact rational transition probabilities and
/// atomic-proposition labeling. The initial state is always index 0.
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dtmc {
    state_count: usize,
    transitions: Vec<Vec<Rational>>,
    labels: Vec<BTreeSet<String>>,
}

impl Dtmc {
    /// Validate and construct. Every row must sum to exactly 1 and every
    /// entry must lie in [0,1].
    pub fn new(
        state_count: usize,
        transitions: Vec<Vec<Rational>>,
        labels: Vec<BTreeSet<String>>,
    ) -> Result<Dtmc, DtmcError> {
        assert!(state_count > 0, "state count must be positive");
        if transitions.len() != state_count {
            return Err(DtmcError::Shape {
                rows: transitions.len(),
                cols: transitions.first().map(|r| r.len()).unwrap_or(0),
                expected: state_count,
            });
        }
        for (i, row) in transitions.iter().enumerate() {
            if row.len() != state_count {
                return Err(DtmcError::Shape {
                    rows: transitions.len(),
                    cols: row.len(),
                    expected: state_count,
                });
            }
            for (j, p) in row.iter().enumerate() {
                if p < &Rational::zero() || p > &Rational::one() {
                    return Err(DtmcError::Range {
                        row: i,
                        col: j,
                        value: fmt_rational(p),
                    });
                }
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(DtmcError::Stochasticity {
                    row: i,
                    sum: fmt_rational(&sum),
                });
            }
        }
        let mut labels = labels;
        labels.resize(state_count, BTreeSet::new());
        Ok(Dtmc {
            state_count,
            transitions,
            labels,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    /// The initial state, fixed at index 0.
    pub fn initial(&self) -> usize {
        0
    }

    pub fn prob(&self, src: usize, dst: usize) -> &Rational {
        &self.transitions[src][dst]
    }

    pub fn row(&self, src: usize) -> &[Rational] {
        &self.transitions[src]
    }

    pub fn labels(&self, state: usize) -> &BTreeSet<String> {
        &self.labels[state]
    }

    pub fn has_label(&self, state: usize, atom: &str) -> bool {
        self.labels[state].contains(atom)
    }

    /// Successors with nonzero probability.
    pub fn successors(&self, src: usize) -> impl Iterator<Item = usize> + '_ {
        self.transitions[src]
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, _)| j)
    }

    /// True iff every transition probability's lowest-terms denominator
    /// divides 2^tosses, i.e. the chain can be driven by that many fair
    /// coin flips per step.
    pub fn is_coin_simulable(&self, tosses: u32) -> bool {
        let modulus = BigInt::one() << tosses;
        self.transitions
            .iter()
            .flatten()
            .all(|p| (&modulus % p.denom()).is_zero())
    }

    /// Atomic propositions used anywhere in the chain, in first-use order
    /// by ascending state index.
    pub fn all_atoms(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for set in &self.labels {
            for a in set {
                if !out.iter().any(|x| x == a) {
                    out.push(a.clone());
                }
            }
        }
        out
    }

    /// PRISM explicit-state export: (`.tra` text, `.lab` text).
    ///
    /// `.tra`: header `<numStates> <numTransitions>`, then one
    /// `<src> <dst> <prob>` line per nonzero transition, src then dst
    /// ascending, probabilities as lowest-terms fractions.
    ///
    /// `.lab`: header declaring `0="init"` plus one id per proposition in
    /// first-use order; then `<state>: <id>...` lines.
    pub fn export_prism(&self) -> (String, String) {
        let mut entries = Vec::new();
        for i in 0..self.state_count {
            for j in 0..self.state_count {
                if !self.transitions[i][j].is_zero() {
                    entries.push((i, j));
                }
            }
        }
        let mut tra = format!("{} {}\n", self.state_count, entries.len());
        for (i, j) in entries {
            tra.push_str(&format!("{} {} {}\n", i, j, fmt_rational(&self.transitions[i][j])));
        }

        let atoms = self.all_atoms();
        let mut lab = String::from("0=\"init\"");
        for (k, a) in atoms.iter().enumerate() {
            lab.push_str(&format!(" {}=\"{}\"", k + 1, a));
        }
        lab.push('\n');
        for i in 0..self.state_count {
            let mut ids: Vec<usize> = Vec::new();
            if i == 0 {
                ids.push(0);
            }
            for (k, a) in atoms.iter().enumerate() {
                if self.labels[i].contains(a) {
                    ids.push(k + 1);
                }
            }
            lab.push_str(&format!("{}:", i));
            for id in ids {
                lab.push_str(&format!(" {}", id));
            }
            lab.push('\n');
        }
        (tra, lab)
    }

    /// GraphViz DOT export: one node per state annotated with its label
    /// set, one edge per nonzero transition annotated with its probability.
    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph dtmc {\n");
        for i in 0..self.state_count {
            let labels: Vec<&str> = self.labels[i].iter().map(|s| s.as_str()).collect();
            out.push_str(&format!(
                "  s{} [label=\"s{}\\n{{{}}}\"];\n",
                i,
                i,
                labels.join(",")
            ));
        }
        for i in 0..self.state_count {
            for j in 0..self.state_count {
                let p = &self.transitions[i][j];
                if !p.is_zero() {
                    out.push_str(&format!(
                        "  s{} -> s{} [label=\"{}\"];\n",
                        i,
                        j,
                        fmt_rational(p)
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn parse_rational_text(s: &str, line: usize) -> Result<Rational, DtmcError> {
    let bad = |m: &str| DtmcError::Import {
        line,
        message: m.to_string(),
    };
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = d.parse().map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        Ok(BigRational::new(n, d))
    } else if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits: BigInt = format!("{}{}", int_part, frac_part)
            .parse()
            .map_err(|_| bad("bad decimal"))?;
        Ok(BigRational::new(digits, BigInt::from(10u32).pow(frac_part.len() as u32)))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad("bad probability"))?;
        Ok(BigRational::from_integer(n))
    }
}

/// Rebuild a [`Dtmc`] from PRISM explicit-state `.tra`/`.lab` text, the
/// inverse of [`Dtmc::export_prism`]. Accepts fractional, integer, and
/// exact decimal probabilities.
pub fn import_prism(tra: &str, lab: &str) -> Result<Dtmc, DtmcError> {
    let bad = |line: usize, m: &str| DtmcError::Import {
        line,
        message: m.to_string(),
    };
    let mut tra_lines = tra.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = tra_lines.next().ok_or_else(|| bad(1, "empty .tra file"))?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad(hline + 1, "bad state count"))?;
    let _decl_count: Option<usize> = parts.next().and_then(|s| s.parse().ok());
    if n == 0 {
        return Err(bad(hline + 1, "state count must be positive"));
    }
    let mut transitions = vec![vec![Rational::zero(); n]; n];
    for (idx, line) in tra_lines {
        let mut parts = line.split_whitespace();
        let src: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(idx + 1, "bad source state"))?;
        let dst: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(idx + 1, "bad target state"))?;
        let p = parse_rational_text(
            parts.next().ok_or_else(|| bad(idx + 1, "missing probability"))?,
            idx + 1,
        )?;
        if src >= n || dst >= n {
            return Err(bad(idx + 1, "state index out of range"));
        }
        transitions[src][dst] = p;
    }

    let mut lab_lines = lab.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (dline, decl) = lab_lines.next().ok_or_else(|| bad(1, "empty .lab file"))?;
    let mut names: Vec<String> = Vec::new();
    for item in decl.split_whitespace() {
        let (id, name) = item
            .split_once('=')
            .ok_or_else(|| bad(dline + 1, "bad label declaration"))?;
        let id: usize = id.parse().map_err(|_| bad(dline + 1, "bad label id"))?;
        if id != names.len() {
            return Err(bad(dline + 1, "label ids must be consecutive from 0"));
        }
        names.push(name.trim_matches('"').to_string());
    }
    if names.first().map(|s| s.as_str()) != Some("init") {
        return Err(bad(dline + 1, "label id 0 must be \"init\""));
    }
    let mut labels = vec![BTreeSet::new(); n];
    for (idx, line) in lab_lines {
        let (state, ids) = line
            .split_once(':')
            .ok_or_else(|| bad(idx + 1, "bad label line"))?;
        let state: usize = state
            .trim()
            .parse()
            .map_err(|_| bad(idx + 1, "bad state index"))?;
        if state >= n {
            return Err(bad(idx + 1, "state index out of range"));
        }
        for id in ids.split_whitespace() {
            let id: usize = id.parse().map_err(|_| bad(idx + 1, "bad label id"))?;
            if id == 0 {
                if state != 0 {
                    return Err(bad(idx + 1, "\"init\" may only label state 0"));
                }
                continue;
            }
            let name = names
                .get(id)
                .ok_or_else(|| bad(idx + 1, "undeclared label id"))?;
            labels[state].insert(name.clone());
        }
    }
    Dtmc::new(n, transitions, labels)
}

/// Convenience constructor used throughout the tests: label sets from
/// string slices.
pub fn labels_of(sets: &[&[&str]]) -> Vec<BTreeSet<String>> {
    sets.iter()
        .map(|set| set.iter().map(|s| s.to_string()).collect())
        .collect()
}
