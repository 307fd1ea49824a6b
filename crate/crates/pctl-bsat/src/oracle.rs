//! Brute-force enumeration of all simple DTMCs at tiny sizes.
//!
//! Ground truth for the encoder's completeness tests: every chain with
//! exactly `b` states, row entries `n/D` summing to 1, and every labeling
//! over a fixed atom list, in a deterministic lexicographic order. No
//! symmetry reduction, deliberately: the oracle's trust story stays
//! trivial.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::checker;
use crate::dtmc::{Dtmc, Rational};
use crate::syntax::Formula;

const MAX_MODELS: u128 = 10_000_000;

/// The enumeration space: `b` states, denominator `D`, a fixed atom list.
#[derive(Debug, Clone)]
pub struct EnumSpace {
    pub states: usize,
    pub denominator: u64,
    pub atoms: Vec<String>,
}

impl EnumSpace {
    pub fn new(states: usize, denominator: u64, atoms: &[&str]) -> EnumSpace {
        assert!(states >= 1 && denominator >= 1);
        EnumSpace {
            states,
            denominator,
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Rows are compositions of D into b nonnegative parts:
    /// C(D+b-1, b-1) choices per row, independent across rows, times
    /// 2^(b*|atoms|) labelings.
    pub fn model_count(&self) -> u128 {
        let rows = compositions_count(self.denominator, self.states);
        let mut total: u128 = 1;
        for _ in 0..self.states {
            total = total.saturating_mul(rows);
        }
        let label_bits = (self.states * self.atoms.len()) as u32;
        total.saturating_mul(1u128.shl_saturating(label_bits))
    }
}

trait SaturatingShl {
    fn shl_saturating(self, bits: u32) -> u128;
}
impl SaturatingShl for u128 {
    fn shl_saturating(self, bits: u32) -> u128 {
        if bits >= 127 {
            u128::MAX
        } else {
            self.saturating_mul(1u128 << bits)
        }
    }
}

fn compositions_count(d: u64, b: usize) -> u128 {
    // C(d + b - 1, b - 1)
    let n = d as u128 + b as u128 - 1;
    let k = b as u128 - 1;
    let mut result: u128 = 1;
    for i in 0..k {
        result = result.saturating_mul(n - i) / (i + 1);
    }
    result
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration space holds {count} models, over the {limit} guard")]
    SpaceTooLarge { count: u128, limit: u128 },
}

// All length-b vectors of nonnegative integers summing to d, lexicographic.
fn compositions(d: u64, b: usize) -> Vec<Vec<u64>> {
    fn rec(d: u64, slots: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=d {
            prefix.push(first);
            rec(d - first, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, b, &mut Vec::new(), &mut out);
    out
}

/// Lazy enumerator over the whole space, lexicographic: transition rows
/// form the outer odometer (row 0 most significant), labelings the inner
/// one.
pub struct ModelIter {
    space: EnumSpace,
    rows: Vec<Vec<Rational>>,
    row_odometer: Vec<usize>,
    label_mask: u64,
    label_mask_end: u64,
    done: bool,
}

impl Iterator for ModelIter {
    type Item = Dtmc;

    fn next(&mut self) -> Option<Dtmc> {
        if self.done {
            return None;
        }
        let b = self.space.states;
        let transitions: Vec<Vec<Rational>> = self
            .row_odometer
            .iter()
            .map(|&r| self.rows[r].clone())
            .collect();
        let mut labels: Vec<BTreeSet<String>> = vec![BTreeSet::new(); b];
        for i in 0..b {
            for (k, a) in self.space.atoms.iter().enumerate() {
                let bit = (i * self.space.atoms.len() + k) as u64;
                if self.label_mask >> bit & 1 == 1 {
                    labels[i].insert(a.clone());
                }
            }
        }
        let model = Dtmc::new(b, transitions, labels).expect("enumerated rows are stochastic");

        // advance: labels fastest, then the row odometer from the last row
        self.label_mask += 1;
        if self.label_mask == self.label_mask_end {
            self.label_mask = 0;
            let mut pos = b;
            loop {
                if pos == 0 {
                    self.done = true;
                    break;
                }
                pos -= 1;
                self.row_odometer[pos] += 1;
                if self.row_odometer[pos] < self.rows.len() {
                    break;
                }
                self.row_odometer[pos] = 0;
            }
        }
        Some(model)
    }
}

/// Every simple DTMC in the space, in deterministic lexicographic order.
pub fn enumerate_models(space: &EnumSpace) -> Result<ModelIter, OracleError> {
    let count = space.model_count();
    if count > MAX_MODELS {
        return Err(OracleError::SpaceTooLarge {
            count,
            limit: MAX_MODELS,
        });
    }
    let rows: Vec<Vec<Rational>> = compositions(space.denominator, space.states)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|n| Rational::new(n.into(), space.denominator.into()))
                .collect()
        })
        .collect();
    let b = space.states;
    Ok(ModelIter {
        rows,
        row_odometer: vec![0; b],
        label_mask: 0,
        label_mask_end: 1u64 << (b * space.atoms.len()) as u32,
        done: false,
        space: space.clone(),
    })
}

/// First enumerated model of a normalized formula, if any.
pub fn brute_force_bsat(f: &Formula, space: &EnumSpace) -> Result<Option<Dtmc>, OracleError> {
    Ok(enumerate_models(space)?.find(|m| checker::check(m, f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtmc::rational;
    use crate::syntax::parse;

    #[test]
    fn tiny_space_counts() {
        assert_eq!(EnumSpace::new(1, 1, &["a"]).model_count(), 2);
        assert_eq!(EnumSpace::new(1, 2, &["a"]).model_count(), 2);
        // 3 compositions of 2 into 2 parts per row, squared, times 2^2
        // labelings over one atom and two states
        assert_eq!(EnumSpace::new(2, 2, &["a"]).model_count(), 36);
    }

    #[test]
    fn enumeration_matches_closed_form() {
        for space in [
            EnumSpace::new(1, 1, &["a"]),
            EnumSpace::new(1, 2, &["a"]),
            EnumSpace::new(2, 2, &["a"]),
            EnumSpace::new(2, 1, &["a", "b"]),
            EnumSpace::new(3, 2, &[]),
        ] {
            let listed = enumerate_models(&space).unwrap().count() as u128;
            assert_eq!(listed, space.model_count());
        }
    }

    #[test]
    fn guard_trips_on_large_space() {
        let space = EnumSpace::new(5, 16, &["a", "b"]);
        assert!(matches!(
            enumerate_models(&space),
            Err(OracleError::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn witness_for_atom() {
        let f = parse("a").unwrap().normalize();
        let m = brute_force_bsat(&f, &EnumSpace::new(1, 1, &["a"]))
            .unwrap()
            .expect("model exists");
        assert!(m.has_label(0, "a"));
        assert_eq!(m.prob(0, 0), &rational(1, 1));
    }

    #[test]
    fn contradiction_has_no_witness() {
        let f = parse("a & !a").unwrap().normalize();
        for space in [EnumSpace::new(1, 1, &["a"]), EnumSpace::new(2, 2, &["a"])] {
            assert!(brute_force_bsat(&f, &space).unwrap().is_none());
        }
    }

    #[test]
    fn split_coin_needs_two_states() {
        let f = parse("P>=1/2[X a] & P>=1/2[X !a]").unwrap().normalize();
        assert!(brute_force_bsat(&f, &EnumSpace::new(1, 2, &["a"]))
            .unwrap()
            .is_none());
        let m = brute_force_bsat(&f, &EnumSpace::new(2, 2, &["a"]))
            .unwrap()
            .expect("two-state model exists");
        assert!(checker::check(&m, &f));
    }
}
