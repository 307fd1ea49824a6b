//! Shared helpers for the integration and acceptance suites.
// not every suite uses every helper
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::Rng;

use pctl_bsat::dtmc::{Dtmc, Rational};
use pctl_bsat::syntax::{Comparison, Formula, PathFormula};

/// Solver command for tests: PCTL_BSAT_SOLVER if set, otherwise the
/// in-repo Node/WASM Z3 wrapper.
pub fn solver_command() -> Vec<String> {
    if let Ok(raw) = std::env::var("PCTL_BSAT_SOLVER") {
        let parts: Vec<String> = raw.split_whitespace().map(str::to_owned).collect();
        if !parts.is_empty() {
            return parts;
        }
    }
    let wrapper: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "tools", "z3-node", "run-z3.js"]
        .iter()
        .collect();
    vec!["node".into(), wrapper.to_string_lossy().into_owned()]
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

const THRESHOLDS: [(i64, i64); 5] = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)];
const COMPARISONS: [Comparison; 5] = [
    Comparison::Ge,
    Comparison::Gt,
    Comparison::Le,
    Comparison::Lt,
    Comparison::Eq,
];

/// Random state formula with operator nesting depth at most `depth`,
/// atoms drawn from `atoms`, thresholds from {0, 1/4, 1/2, 3/4, 1},
/// step bounds at most 3. May contain F/G sugar.
pub fn random_formula(rng: &mut StdRng, depth: usize, atoms: &[&str]) -> Formula {
    let leaf = |rng: &mut StdRng| match rng.gen_range(0..6) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::atom(atoms[rng.gen_range(0..atoms.len())]),
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..8) {
        0 => leaf(rng),
        1 => Formula::not(random_formula(rng, depth - 1, atoms)),
        2 => Formula::and(
            random_formula(rng, depth - 1, atoms),
            random_formula(rng, depth - 1, atoms),
        ),
        3 => Formula::or(
            random_formula(rng, depth - 1, atoms),
            random_formula(rng, depth - 1, atoms),
        ),
        4 => Formula::implies(
            random_formula(rng, depth - 1, atoms),
            random_formula(rng, depth - 1, atoms),
        ),
        _ => {
            let (n, d) = THRESHOLDS[rng.gen_range(0..THRESHOLDS.len())];
            let cmp = COMPARISONS[rng.gen_range(0..COMPARISONS.len())];
            let path = match rng.gen_range(0..5) {
                0 => PathFormula::Next(random_formula(rng, depth - 1, atoms)),
                1 => PathFormula::Until(
                    random_formula(rng, depth - 1, atoms),
                    random_formula(rng, depth - 1, atoms),
                ),
                2 => PathFormula::BoundedUntil(
                    random_formula(rng, depth - 1, atoms),
                    random_formula(rng, depth - 1, atoms),
                    rng.gen_range(0..=3),
                ),
                3 => PathFormula::Finally(
                    random_formula(rng, depth - 1, atoms),
                    if rng.gen_bool(0.5) {
                        Some(rng.gen_range(0..=3))
                    } else {
                        None
                    },
                ),
                _ => PathFormula::Globally(
                    random_formula(rng, depth - 1, atoms),
                    if rng.gen_bool(0.5) {
                        Some(rng.gen_range(0..=3))
                    } else {
                        None
                    },
                ),
            };
            Formula::prob(cmp, rat(n, d), path)
        }
    }
}

/// Random valid DTMC: up to `max_states` states, probabilities with
/// denominator `denominator`, labels over `atoms`.
pub fn random_dtmc(rng: &mut StdRng, max_states: usize, denominator: u64, atoms: &[&str]) -> Dtmc {
    let b = rng.gen_range(1..=max_states);
    let mut transitions = Vec::with_capacity(b);
    for _ in 0..b {
        let mut remaining = denominator;
        let mut row = Vec::with_capacity(b);
        for j in 0..b {
            let n = if j + 1 == b {
                remaining
            } else {
                rng.gen_range(0..=remaining)
            };
            remaining -= n;
            row.push(Rational::new(n.into(), denominator.into()));
        }
        transitions.push(row);
    }
    let labels: Vec<BTreeSet<String>> = (0..b)
        .map(|_| {
            atoms
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .map(|s| s.to_string())
                .collect()
        })
        .collect();
    Dtmc::new(b, transitions, labels).expect("rows sum to 1 by construction")
}
