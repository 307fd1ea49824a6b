//! Explicit-state PCTL model checking over exact-rational DTMCs.
//!
//! This is the verification oracle for every synthesized model: it shares
//! no code with the SMT encoding. Unbounded until goes through
//! probability-0 / probability-1 graph precomputation followed by exact
//! Gaussian elimination, so strict thresholds are decided without any
//! numeric tolerance.

use num_traits::{One, Zero};

use crate::dtmc::{Dtmc, Rational};
use crate::syntax::{Formula, PathFormula};

/// A set of states of a fixed DTMC, represented as a bitset whose universe
/// is the chain's state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    bits: Vec<bool>,
}

impl StateSet {
    pub fn empty(universe: usize) -> StateSet {
        StateSet {
            bits: vec![false; universe],
        }
    }

    pub fn full(universe: usize) -> StateSet {
        StateSet {
            bits: vec![true; universe],
        }
    }

    pub fn from_indices(universe: usize, indices: &[usize]) -> StateSet {
        let mut s = StateSet::empty(universe);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, i: usize) {
        self.bits[i] = true;
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn complement(&self) -> StateSet {
        StateSet {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }
}

/// One exact probability per state.
pub type ProbVector = Vec<Rational>;

/// Entry s = sum over target states t of P(s,t).
pub fn prob_next(m: &Dtmc, target: &StateSet) -> ProbVector {
    (0..m.state_count())
        .map(|s| target.iter().map(|t| m.prob(s, t).clone()).sum())
        .collect()
}

/// Step-bounded until probabilities: x^0 is the indicator of `s2`, and
/// x^{m+1}_s is 1 on `s2`, the one-step average of x^m on `s1`, and 0
/// elsewhere. Returns x^k.
pub fn prob_bounded_until(m: &Dtmc, s1: &StateSet, s2: &StateSet, k: u64) -> ProbVector {
    let n = m.state_count();
    let mut x: ProbVector = (0..n)
        .map(|s| {
            if s2.contains(s) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    for _ in 0..k {
        x = (0..n)
            .map(|s| {
                if s2.contains(s) {
                    Rational::one()
                } else if s1.contains(s) {
                    (0..n).map(|t| m.prob(s, t) * &x[t]).sum()
                } else {
                    Rational::zero()
                }
            })
            .collect();
    }
    x
}

// States from which `target` is reachable through `via` states (target
// states themselves always count as reaching).
fn backward_reach(m: &Dtmc, target: &StateSet, via: &StateSet) -> StateSet {
    let mut reach = target.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..m.state_count() {
            if !reach.contains(s) && via.contains(s) && m.successors(s).any(|t| reach.contains(t)) {
                reach.insert(s);
                changed = true;
            }
        }
    }
    reach
}

/// States where `s1 U s2` holds with probability exactly 0: no path to
/// `s2` through `s1` states.
pub fn prob0(m: &Dtmc, s1: &StateSet, s2: &StateSet) -> StateSet {
    backward_reach(m, s2, s1).complement()
}

/// States where `s1 U s2` holds with probability exactly 1, computed
/// graph-theoretically: the states that cannot reach the probability-0
/// region while staying in `s1` and outside `s2`.
pub fn prob1(m: &Dtmc, s1: &StateSet, s2: &StateSet) -> StateSet {
    let zero = prob0(m, s1, s2);
    let via = StateSet {
        bits: (0..m.state_count())
            .map(|s| s1.contains(s) && !s2.contains(s))
            .collect(),
    };
    backward_reach(m, &zero, &via).complement()
}

// Exact Gaussian elimination for (I - A) x = c; the caller guarantees
// nonsingularity via the prob0/prob1 precomputation. Pivot choice favors
// small numerator/denominator representations to limit blow-up.
fn solve_linear(mut a: Vec<Vec<Rational>>, mut c: Vec<Rational>) -> Vec<Rational> {
    let n = c.len();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].numer().bits() + a[r][col].denom().bits())
            .unwrap_or_else(|| panic!("internal error: singular until-probability system"));
        a.swap(col, pivot);
        c.swap(col, pivot);
        let inv = a[col][col].clone();
        for j in col..n {
            a[col][j] = &a[col][j] / &inv;
        }
        c[col] = &c[col] / &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in col..n {
                    a[r][j] = &a[r][j] - &factor * &a[col][j];
                }
                c[r] = &c[r] - &factor * &c[col];
            }
        }
    }
    c
}

/// Unbounded until probabilities (the least fixed point), exact.
///
/// Probability-0 and probability-1 states are identified graph-only;
/// the remaining states are solved by exact Gaussian elimination on
/// `x_s = sum_t P(s,t) x_t` with the precomputed boundary values.
pub fn prob_until(m: &Dtmc, s1: &StateSet, s2: &StateSet) -> ProbVector {
    let n = m.state_count();
    let zero = prob0(m, s1, s2);
    let one = prob1(m, s1, s2);
    let unknown: Vec<usize> = (0..n)
        .filter(|&s| !zero.contains(s) && !one.contains(s))
        .collect();

    let mut x: ProbVector = (0..n)
        .map(|s| {
            if one.contains(s) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    if unknown.is_empty() {
        return x;
    }

    // (I - A) restricted to the unknown block; constants absorb the
    // one-step mass flowing into probability-1 states.
    let k = unknown.len();
    let mut a = vec![vec![Rational::zero(); k]; k];
    let mut c = vec![Rational::zero(); k];
    for (r, &s) in unknown.iter().enumerate() {
        for (cidx, &t) in unknown.iter().enumerate() {
            let coeff = if r == cidx {
                Rational::one() - m.prob(s, t)
            } else {
                -m.prob(s, t)
            };
            a[r][cidx] = coeff;
        }
        c[r] = one.iter().map(|t| m.prob(s, t).clone()).sum();
    }
    let sol = solve_linear(a, c);
    for (r, &s) in unknown.iter().enumerate() {
        x[s] = sol[r].clone();
    }
    x
}

fn path_probabilities(m: &Dtmc, path: &PathFormula, sat: impl Fn(&Formula) -> StateSet) -> ProbVector {
    match path {
        PathFormula::Next(g) => prob_next(m, &sat(g)),
        PathFormula::Until(l, r) => prob_until(m, &sat(l), &sat(r)),
        PathFormula::BoundedUntil(l, r, k) => prob_bounded_until(m, &sat(l), &sat(r), *k),
        PathFormula::Finally(..) | PathFormula::Globally(..) => {
            panic!("checker requires normalized formulas (no F/G sugar)")
        }
    }
}

/// The exact satisfaction set of a normalized state formula. Atoms absent
/// from every label are simply false everywhere, not an error.
pub fn sat_set(m: &Dtmc, f: &Formula) -> StateSet {
    let n = m.state_count();
    match f {
        Formula::True => StateSet::full(n),
        Formula::False => StateSet::empty(n),
        Formula::Atom(a) => StateSet {
            bits: (0..n).map(|s| m.has_label(s, a)).collect(),
        },
        Formula::Not(g) => sat_set(m, g).complement(),
        Formula::And(l, r) => {
            let (sl, sr) = (sat_set(m, l), sat_set(m, r));
            StateSet {
                bits: (0..n).map(|s| sl.contains(s) && sr.contains(s)).collect(),
            }
        }
        Formula::Or(l, r) => {
            let (sl, sr) = (sat_set(m, l), sat_set(m, r));
            StateSet {
                bits: (0..n).map(|s| sl.contains(s) || sr.contains(s)).collect(),
            }
        }
        Formula::Implies(l, r) => {
            let (sl, sr) = (sat_set(m, l), sat_set(m, r));
            StateSet {
                bits: (0..n).map(|s| !sl.contains(s) || sr.contains(s)).collect(),
            }
        }
        Formula::Prob {
            cmp,
            threshold,
            path,
        } => {
            let probs = path_probabilities(m, path, |g| sat_set(m, g));
            StateSet {
                bits: probs.iter().map(|p| cmp.holds(p, threshold)).collect(),
            }
        }
    }
}

/// True iff the initial state satisfies the (normalized) formula.
pub fn check(m: &Dtmc, f: &Formula) -> bool {
    sat_set(m, f).contains(m.initial())
}
