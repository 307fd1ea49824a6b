//! Reduction from bounded PCTL satisfiability to SMT.
//!
//! `encode` turns a normalized formula, a state count `b` and a probability
//! denominator `D` into an SMT-LIB v2 script whose models are exactly the
//! `b`-state DTMCs with all probabilities of the form `n/D` that satisfy
//! the formula at state 0. `decode_model` maps a solver's get-value
//! response back to a validated [`Dtmc`].
//!
//! Constraint families, in emission order:
//!
//! 1. stochasticity: integers `n_i_j` in `[0,D]` with each row summing to
//!    `D`, coupled to reals `p_i_j = n_i_j / D`;
//! 2. free labeling bits `l_i_a`;
//! 3. propositional layer: `sat_i_f<k>` per state and closure formula;
//! 4. Next probabilities (ite-encoded, linear);
//! 5. bounded-until probability layers (nonlinear: `p * x` products);
//! 6. unbounded until pinned to the least fixed point with reachability
//!    bits plus integer rank certificates;
//! 7. threshold links `sat <-> (x cmp lambda)`;
//! 8. root assertion at state 0;
//! 9. optional lexicographic symmetry breaking on states `1..b-1`.

use std::collections::BTreeMap;

use num_traits::Signed;
use thiserror::Error;

use crate::dtmc::{Dtmc, DtmcError, Rational};
use crate::sexp::{self, Sexp};
use crate::syntax::{Comparison, Formula, PathFormula};

/// Parameters of a single encoding query.
#[derive(Debug, Clone)]
pub struct EncodingConfig {
    /// Exact number of states `b` for this query (the "at most b" of the
    /// search is realized by sweeping `b` upward, not by padding).
    pub states: usize,
    /// Common denominator `D` of all transition probabilities.
    pub denominator: u64,
    /// Lexicographically order non-initial states to prune relabelings.
    pub symmetry_breaking: bool,
    /// Optional `(set-logic ...)` name; omitted by default for solver
    /// portability.
    pub logic_name: Option<String>,
}

impl EncodingConfig {
    pub fn new(states: usize, denominator: u64) -> EncodingConfig {
        assert!(states >= 1, "state count must be at least 1");
        assert!(denominator >= 1, "denominator must be at least 1");
        EncodingConfig {
            states,
            denominator,
            symmetry_breaking: false,
            logic_name: None,
        }
    }
}

/// An SMT-LIB v2 script: command list plus the final value query.
#[derive(Debug, Clone)]
pub struct SmtScript {
    body: Vec<String>,
    value_query: Vec<String>,
}

impl SmtScript {
    /// Render the full script, ending in `(check-sat)` and a `(get-value ...)`
    /// over the model-defining variables.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for cmd in &self.body {
            out.push_str(cmd);
            out.push('\n');
        }
        out.push_str("(check-sat)\n");
        out.push_str(&format!("(get-value ({}))\n", self.value_query.join(" ")));
        out
    }

    /// Same script, with extra variables appended to the value query
    /// (debug aid: lets tests read back internal probability variables).
    pub fn with_extra_values(&self, extra: &[String]) -> SmtScript {
        let mut s = self.clone();
        s.value_query.extend(extra.iter().cloned());
        s
    }

    pub fn commands(&self) -> &[String] {
        &self.body
    }

    pub fn assertion_count(&self) -> usize {
        self.body.iter().filter(|c| c.starts_with("(assert")).count()
    }

    pub fn declaration_count(&self) -> usize {
        self.body
            .iter()
            .filter(|c| c.starts_with("(declare-const"))
            .count()
    }
}

/// Bookkeeping that maps solver variables back to model components.
#[derive(Debug, Clone)]
pub struct VariableMap {
    pub states: usize,
    pub denominator: u64,
    pub atoms: Vec<String>,
    pub closure: Vec<Formula>,
    /// `(i, j)` -> numerator variable of transition i -> j.
    pub numerators: BTreeMap<(usize, usize), String>,
    /// `(i, atom)` -> labeling bit.
    pub labels: BTreeMap<(usize, String), String>,
    /// `(i, closure index)` -> satisfaction bit.
    pub sats: BTreeMap<(usize, usize), String>,
    /// `(i, closure index of a Prob formula)` -> its probability variable.
    pub probs: BTreeMap<(usize, usize), String>,
    /// `(i, closure index, step)` -> bounded-until layer variable.
    pub steps: BTreeMap<(usize, usize, u64), String>,
    /// `(i, closure index)` -> reachability bit of an unbounded until.
    pub reaches: BTreeMap<(usize, usize), String>,
    /// `(i, closure index)` -> rank certificate of an unbounded until.
    pub ranks: BTreeMap<(usize, usize), String>,
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("solver response has no binding for `{0}`")]
    Missing(String),
    #[error("solver binding for `{0}` is ill-typed")]
    IllTyped(String),
    #[error("solver response is not a get-value list: {0}")]
    Malformed(String),
    #[error(transparent)]
    Dtmc(#[from] DtmcError),
}

fn n_name(i: usize, j: usize) -> String {
    format!("n_{}_{}", i, j)
}

fn p_name(i: usize, j: usize) -> String {
    format!("p_{}_{}", i, j)
}

fn l_name(i: usize, atom: &str) -> String {
    format!("l_{}_{}", i, atom)
}

fn sat_name(i: usize, idx: usize) -> String {
    format!("sat_{}_f{}", i, idx)
}

fn x_name(i: usize, idx: usize) -> String {
    format!("x_{}_f{}", i, idx)
}

fn x_step_name(i: usize, idx: usize, step: u64) -> String {
    format!("x_{}_f{}_s{}", i, idx, step)
}

fn reach_name(i: usize, idx: usize) -> String {
    format!("reach_{}_f{}", i, idx)
}

fn rank_name(i: usize, idx: usize) -> String {
    format!("d_{}_f{}", i, idx)
}

fn threshold_literal(r: &Rational) -> String {
    debug_assert!(!r.is_negative());
    format!("(/ {} {})", r.numer(), r.denom())
}

// (+ a b c), collapsing a singleton sum to its only term
fn sum(terms: Vec<String>) -> String {
    if terms.len() == 1 {
        terms.into_iter().next().unwrap()
    } else {
        format!("(+ {})", terms.join(" "))
    }
}

fn disjunction(terms: Vec<String>) -> String {
    if terms.len() == 1 {
        terms.into_iter().next().unwrap()
    } else {
        format!("(or {})", terms.join(" "))
    }
}

fn index_of(closure: &[Formula], f: &Formula) -> usize {
    closure
        .iter()
        .position(|g| g == f)
        .expect("operand must appear in closure")
}

fn lex_le(v: &[String], w: &[String]) -> String {
    match v.split_first() {
        None => "true".to_string(),
        Some((v0, vrest)) => {
            let (w0, wrest) = w.split_first().expect("tuples have equal length");
            format!(
                "(or (< {} {}) (and (= {} {}) {}))",
                v0,
                w0,
                v0,
                w0,
                lex_le(vrest, wrest)
            )
        }
    }
}

/// Encode the bounded satisfiability query for a normalized formula.
/// Deterministic: identical inputs yield byte-identical scripts.
pub fn encode(f: &Formula, cfg: &EncodingConfig) -> (SmtScript, VariableMap) {
    let b = cfg.states;
    let d_real = format!("{}.0", cfg.denominator);
    let closure = f.closure();
    let atoms = f.atoms();

    let mut vm = VariableMap {
        states: b,
        denominator: cfg.denominator,
        atoms: atoms.clone(),
        closure: closure.clone(),
        numerators: BTreeMap::new(),
        labels: BTreeMap::new(),
        sats: BTreeMap::new(),
        probs: BTreeMap::new(),
        steps: BTreeMap::new(),
        reaches: BTreeMap::new(),
        ranks: BTreeMap::new(),
    };
    let mut cmds: Vec<String> = Vec::new();

    if let Some(logic) = &cfg.logic_name {
        cmds.push(format!("(set-logic {})", logic));
    }

    // (1) stochasticity: n_i_j in [0,D], rows sum to D, p_i_j = n_i_j / D
    for i in 0..b {
        for j in 0..b {
            cmds.push(format!("(declare-const {} Int)", n_name(i, j)));
            cmds.push(format!("(declare-const {} Real)", p_name(i, j)));
            vm.numerators.insert((i, j), n_name(i, j));
        }
    }
    for i in 0..b {
        for j in 0..b {
            cmds.push(format!("(assert (<= 0 {}))", n_name(i, j)));
            cmds.push(format!("(assert (<= {} {}))", n_name(i, j), cfg.denominator));
            cmds.push(format!(
                "(assert (= (* {} {}) (to_real {})))",
                d_real,
                p_name(i, j),
                n_name(i, j)
            ));
        }
        let row: Vec<String> = (0..b).map(|j| n_name(i, j)).collect();
        cmds.push(format!("(assert (= {} {}))", sum(row), cfg.denominator));
    }

    // (2) free labeling bits
    for i in 0..b {
        for a in &atoms {
            cmds.push(format!("(declare-const {} Bool)", l_name(i, a)));
            vm.labels.insert((i, a.clone()), l_name(i, a));
        }
    }

    // (3) propositional layer over the closure
    for (idx, _) in closure.iter().enumerate() {
        for i in 0..b {
            cmds.push(format!("(declare-const {} Bool)", sat_name(i, idx)));
            vm.sats.insert((i, idx), sat_name(i, idx));
        }
    }
    for (idx, g) in closure.iter().enumerate() {
        for i in 0..b {
            let s = sat_name(i, idx);
            match g {
                Formula::True => cmds.push(format!("(assert (= {} true))", s)),
                Formula::False => cmds.push(format!("(assert (= {} false))", s)),
                Formula::Atom(a) => {
                    cmds.push(format!("(assert (= {} {}))", s, l_name(i, a)))
                }
                Formula::Not(inner) => cmds.push(format!(
                    "(assert (= {} (not {})))",
                    s,
                    sat_name(i, index_of(&closure, inner))
                )),
                Formula::And(l, r) => cmds.push(format!(
                    "(assert (= {} (and {} {})))",
                    s,
                    sat_name(i, index_of(&closure, l)),
                    sat_name(i, index_of(&closure, r))
                )),
                Formula::Or(l, r) => cmds.push(format!(
                    "(assert (= {} (or {} {})))",
                    s,
                    sat_name(i, index_of(&closure, l)),
                    sat_name(i, index_of(&closure, r))
                )),
                Formula::Implies(l, r) => cmds.push(format!(
                    "(assert (= {} (=> {} {})))",
                    s,
                    sat_name(i, index_of(&closure, l)),
                    sat_name(i, index_of(&closure, r))
                )),
                Formula::Prob { .. } => {} // probability layers below
            }
        }
    }

    // (4) Next: x_i = sum_j ite(sat_j_inner, p_i_j, 0) -- linear
    for (idx, g) in closure.iter().enumerate() {
        if let Formula::Prob { path, .. } = g {
            if let PathFormula::Next(inner) = path.as_ref() {
                let inner_idx = index_of(&closure, inner);
                for i in 0..b {
                    cmds.push(format!("(declare-const {} Real)", x_name(i, idx)));
                    vm.probs.insert((i, idx), x_name(i, idx));
                    let terms: Vec<String> = (0..b)
                        .map(|j| {
                            format!("(ite {} {} 0.0)", sat_name(j, inner_idx), p_name(i, j))
                        })
                        .collect();
                    cmds.push(format!("(assert (= {} {}))", x_name(i, idx), sum(terms)));
                }
            }
        }
    }

    // (5) bounded until: layered iteration, x^0 = [in target]
    for (idx, g) in closure.iter().enumerate() {
        if let Formula::Prob { path, .. } = g {
            if let PathFormula::BoundedUntil(g1, g2, k) = path.as_ref() {
                let i1 = index_of(&closure, g1);
                let i2 = index_of(&closure, g2);
                for step in 0..=*k {
                    for i in 0..b {
                        cmds.push(format!(
                            "(declare-const {} Real)",
                            x_step_name(i, idx, step)
                        ));
                        vm.steps.insert((i, idx, step), x_step_name(i, idx, step));
                    }
                }
                for i in 0..b {
                    cmds.push(format!(
                        "(assert (= {} (ite {} 1.0 0.0)))",
                        x_step_name(i, idx, 0),
                        sat_name(i, i2)
                    ));
                }
                for step in 0..*k {
                    for i in 0..b {
                        let avg: Vec<String> = (0..b)
                            .map(|j| format!("(* {} {})", p_name(i, j), x_step_name(j, idx, step)))
                            .collect();
                        cmds.push(format!(
                            "(assert (= {} (ite {} 1.0 (ite {} {} 0.0))))",
                            x_step_name(i, idx, step + 1),
                            sat_name(i, i2),
                            sat_name(i, i1),
                            sum(avg)
                        ));
                    }
                }
                for i in 0..b {
                    vm.probs.insert((i, idx), x_step_name(i, idx, *k));
                }
            }
        }
    }

    // (6) unbounded until: least fixed point via reach bits + rank
    // certificates (unrolling would be unsound for strict thresholds)
    for (idx, g) in closure.iter().enumerate() {
        if let Formula::Prob { path, .. } = g {
            if let PathFormula::Until(g1, g2) = path.as_ref() {
                let i1 = index_of(&closure, g1);
                let i2 = index_of(&closure, g2);
                for i in 0..b {
                    cmds.push(format!("(declare-const {} Real)", x_name(i, idx)));
                    cmds.push(format!("(declare-const {} Bool)", reach_name(i, idx)));
                    cmds.push(format!("(declare-const {} Int)", rank_name(i, idx)));
                    vm.probs.insert((i, idx), x_name(i, idx));
                    vm.reaches.insert((i, idx), reach_name(i, idx));
                    vm.ranks.insert((i, idx), rank_name(i, idx));
                }
                for i in 0..b {
                    let x = x_name(i, idx);
                    let reach = reach_name(i, idx);
                    let rank = rank_name(i, idx);
                    let in1 = sat_name(i, i1);
                    let in2 = sat_name(i, i2);
                    cmds.push(format!("(assert (and (<= 0.0 {}) (<= {} 1.0)))", x, x));
                    cmds.push(format!("(assert (and (<= 0 {}) (< {} {})))", rank, rank, b));
                    // (6a) target states reach with probability 1
                    cmds.push(format!(
                        "(assert (=> {} (and {} (= {} 1.0))))",
                        in2, reach, x
                    ));
                    // (6b) dead states never reach
                    cmds.push(format!(
                        "(assert (=> (and (not {}) (not {})) (not {})))",
                        in1, in2, reach
                    ));
                    // (6c) completeness: an edge into the reach set pulls
                    // the source in
                    for j in 0..b {
                        cmds.push(format!(
                            "(assert (=> (and {} (not {}) (>= {} 1) {}) {}))",
                            in1,
                            in2,
                            n_name(i, j),
                            reach_name(j, idx),
                            reach
                        ));
                    }
                    // (6d) soundness: every reaching non-target state has a
                    // rank-decreasing edge into the reach set
                    let witnesses: Vec<String> = (0..b)
                        .map(|j| {
                            format!(
                                "(and (>= {} 1) {} (< {} {}))",
                                n_name(i, j),
                                reach_name(j, idx),
                                rank_name(j, idx),
                                rank
                            )
                        })
                        .collect();
                    cmds.push(format!(
                        "(assert (=> (and {} (not {})) {}))",
                        reach,
                        in2,
                        disjunction(witnesses)
                    ));
                    // (6e) zero law
                    cmds.push(format!("(assert (=> (not {}) (= {} 0.0)))", reach, x));
                    // (6f) probability balance on interior reaching states
                    let balance: Vec<String> = (0..b)
                        .map(|j| format!("(* {} {})", p_name(i, j), x_name(j, idx)))
                        .collect();
                    cmds.push(format!(
                        "(assert (=> (and {} (not {}) {}) (= {} {})))",
                        in1,
                        in2,
                        reach,
                        x,
                        sum(balance)
                    ));
                }
            }
        }
    }

    // (7) thresholds
    for (idx, g) in closure.iter().enumerate() {
        if let Formula::Prob { cmp, threshold, .. } = g {
            let lambda = threshold_literal(threshold);
            let op = match cmp {
                Comparison::Ge => ">=",
                Comparison::Gt => ">",
                Comparison::Le => "<=",
                Comparison::Lt => "<",
                Comparison::Eq => "=",
            };
            for i in 0..b {
                let x = vm.probs.get(&(i, idx)).expect("prob var exists").clone();
                cmds.push(format!(
                    "(assert (= {} ({} {} {})))",
                    sat_name(i, idx),
                    op,
                    x,
                    lambda
                ));
            }
        }
    }

    // (8) root: state 0 satisfies the whole formula
    let root_idx = index_of(&closure, f);
    cmds.push(format!("(assert {})", sat_name(0, root_idx)));

    // (9) symmetry breaking: rows 1..b-1 lexicographically non-decreasing
    // (label bits, then numerators)
    if cfg.symmetry_breaking {
        for i in 1..b.saturating_sub(1) {
            let tuple = |s: usize| -> Vec<String> {
                atoms
                    .iter()
                    .map(|a| format!("(ite {} 1 0)", l_name(s, a)))
                    .chain((0..b).map(|j| n_name(s, j)))
                    .collect()
            };
            cmds.push(format!("(assert {})", lex_le(&tuple(i), &tuple(i + 1))));
        }
    }

    let mut query: Vec<String> = Vec::new();
    for i in 0..b {
        for j in 0..b {
            query.push(n_name(i, j));
        }
    }
    for i in 0..b {
        for a in &atoms {
            query.push(l_name(i, a));
        }
    }

    (
        SmtScript {
            body: cmds,
            value_query: query,
        },
        vm,
    )
}

/// Turn a solver's get-value response into the bindings it contains.
pub fn parse_bindings(raw: &str) -> Result<BTreeMap<String, Sexp>, DecodeError> {
    let parsed = sexp::parse(raw.trim()).map_err(|e| DecodeError::Malformed(e.to_string()))?;
    let items = match parsed {
        Sexp::List(items) => items,
        other => return Err(DecodeError::Malformed(sexp::to_string(&other))),
    };
    let mut map = BTreeMap::new();
    for item in items {
        match item {
            Sexp::List(pair) if pair.len() == 2 => {
                if let Sexp::Atom(name) = &pair[0] {
                    map.insert(name.clone(), pair[1].clone());
                } else {
                    return Err(DecodeError::Malformed(sexp::to_string(&pair[0])));
                }
            }
            other => return Err(DecodeError::Malformed(sexp::to_string(&other))),
        }
    }
    Ok(map)
}

/// Decode a SAT assignment into a validated DTMC: numerators become
/// `n/D` probabilities in lowest terms, labeling bits become label sets.
pub fn decode_model(
    raw: &str,
    vm: &VariableMap,
    cfg: &EncodingConfig,
) -> Result<Dtmc, DecodeError> {
    use num_bigint::BigInt;
    use num_traits::Zero;
    use std::collections::BTreeSet;

    let bindings = parse_bindings(raw)?;
    let b = cfg.states;
    let denom = BigInt::from(cfg.denominator);

    let mut transitions = vec![vec![Rational::zero(); b]; b];
    for i in 0..b {
        for j in 0..b {
            let name = vm
                .numerators
                .get(&(i, j))
                .expect("numerator names cover the matrix");
            let value = bindings
                .get(name)
                .ok_or_else(|| DecodeError::Missing(name.clone()))?;
            let n = sexp::as_integer(value).map_err(|_| DecodeError::IllTyped(name.clone()))?;
            transitions[i][j] = Rational::new(n, denom.clone());
        }
    }

    let mut labels: Vec<BTreeSet<String>> = vec![BTreeSet::new(); b];
    for ((i, atom), name) in &vm.labels {
        let value = bindings
            .get(name)
            .ok_or_else(|| DecodeError::Missing(name.clone()))?;
        if sexp::as_bool(value).map_err(|_| DecodeError::IllTyped(name.clone()))? {
            labels[*i].insert(atom.clone());
        }
    }

    Ok(Dtmc::new(b, transitions, labels)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtmc::rational;
    use crate::syntax::parse;

    #[test]
    fn one_state_script_shape() {
        let f = parse("a").unwrap().normalize();
        let (script, vm) = encode(&f, &EncodingConfig::new(1, 2));
        let text = script.text();
        assert!(text.contains("(assert (= (+ n_0_0) 2))") || text.contains("(assert (= n_0_0 2))"));
        assert!(text.contains("(assert (= sat_0_f0 l_0_a))"));
        assert!(text.contains("(assert sat_0_f0)"));
        assert!(text.ends_with("(get-value (n_0_0 l_0_a))\n"));
        assert_eq!(vm.closure.len(), 1);
    }

    #[test]
    fn encode_is_deterministic() {
        let f = parse("P>=1/2[a U b] & !a").unwrap().normalize();
        let cfg = EncodingConfig::new(3, 4);
        let (s1, _) = encode(&f, &cfg);
        let (s2, _) = encode(&f, &cfg);
        assert_eq!(s1.text(), s2.text());
    }

    #[test]
    fn declaration_count_closed_form() {
        // 2 n/p pairs per (i,j); one l per (state, atom); one sat per
        // (state, closure formula); Next: b reals; bounded until: b(k+1)
        // reals; unbounded until: b * (real + bool + int)
        for (text, b) in [
            ("P>=1/2[X a]", 2usize),
            ("P>0[a U b]", 2),
            ("P<1[a U<=3 b] | c", 3),
            ("a & P>=1[X(!a & P>=1[X a])]", 2),
        ] {
            let f = parse(text).unwrap().normalize();
            let cfg = EncodingConfig::new(b, 4);
            let (script, vm) = encode(&f, &cfg);
            let mut expected = 2 * b * b + b * vm.atoms.len() + b * vm.closure.len();
            for g in &vm.closure {
                if let Formula::Prob { path, .. } = g {
                    expected += match path.as_ref() {
                        PathFormula::Next(_) => b,
                        PathFormula::BoundedUntil(_, _, k) => b * (*k as usize + 1),
                        PathFormula::Until(_, _) => 3 * b,
                        _ => unreachable!("normalized"),
                    };
                }
            }
            assert_eq!(script.declaration_count(), expected, "formula {}", text);
        }
    }

    #[test]
    fn symmetry_breaking_adds_ordering() {
        let f = parse("P>=1/2[X a]").unwrap().normalize();
        let mut cfg = EncodingConfig::new(3, 2);
        let (plain, _) = encode(&f, &cfg);
        cfg.symmetry_breaking = true;
        let (broken, _) = encode(&f, &cfg);
        assert_eq!(plain.assertion_count() + 1, broken.assertion_count());
        assert!(broken.text().contains("(ite l_1_a 1 0)"));
    }

    #[test]
    fn threshold_emitted_as_exact_fraction() {
        let f = parse("P>1/3[X a]").unwrap().normalize();
        let (script, _) = encode(&f, &EncodingConfig::new(1, 3));
        assert!(script.text().contains("(> x_0_f1 (/ 1 3))"));
    }

    #[test]
    fn decode_one_state() {
        let f = parse("a").unwrap().normalize();
        let cfg = EncodingConfig::new(1, 2);
        let (_, vm) = encode(&f, &cfg);
        let m = decode_model("((n_0_0 2) (l_0_a true))", &vm, &cfg).unwrap();
        assert_eq!(m.state_count(), 1);
        assert_eq!(m.prob(0, 0), &rational(1, 1));
        assert!(m.has_label(0, "a"));
    }

    #[test]
    fn decode_two_state() {
        let f = parse("a").unwrap().normalize();
        let cfg = EncodingConfig::new(2, 2);
        let (_, vm) = encode(&f, &cfg);
        let raw = "((n_0_0 1) (n_0_1 1) (n_1_0 0) (n_1_1 2) (l_0_a false) (l_1_a true))";
        let m = decode_model(raw, &vm, &cfg).unwrap();
        assert_eq!(m.prob(0, 0), &rational(1, 2));
        assert_eq!(m.prob(0, 1), &rational(1, 2));
        assert_eq!(m.prob(1, 1), &rational(1, 1));
        assert!(!m.has_label(0, "a"));
        assert!(m.has_label(1, "a"));
    }

    #[test]
    fn decode_missing_binding() {
        let f = parse("a").unwrap().normalize();
        let cfg = EncodingConfig::new(2, 2);
        let (_, vm) = encode(&f, &cfg);
        let raw = "((n_0_0 1) (n_1_0 0) (n_1_1 2) (l_0_a false) (l_1_a true))";
        match decode_model(raw, &vm, &cfg) {
            Err(DecodeError::Missing(name)) => assert_eq!(name, "n_0_1"),
            other => panic!("expected missing n_0_1, got {:?}", other),
        }
    }

    #[test]
    fn decode_bad_row_propagates_stochasticity_error() {
        let f = parse("a").unwrap().normalize();
        let cfg = EncodingConfig::new(1, 2);
        let (_, vm) = encode(&f, &cfg);
        match decode_model("((n_0_0 1) (l_0_a true))", &vm, &cfg) {
            Err(DecodeError::Dtmc(DtmcError::Stochasticity { .. })) => {}
            other => panic!("expected stochasticity error, got {:?}", other),
        }
    }

    #[test]
    fn variable_names_are_distinct() {
        let f = parse("P>=1/2[a U b] & P>0[a U<=2 b]").unwrap().normalize();
        let (_, vm) = encode(&f, &EncodingConfig::new(2, 2));
        let mut names: Vec<&String> = vm
            .numerators
            .values()
            .chain(vm.labels.values())
            .chain(vm.sats.values())
            .chain(vm.probs.values())
            .chain(vm.steps.values())
            .chain(vm.reaches.values())
            .chain(vm.ranks.values())
            .collect();
        let total = names.len();
        names.sort();
        names.dedup();
        // probs aliases the top bounded-until step var, so dedup removes
        // exactly those aliases
        let bounded_aliases = vm
            .closure
            .iter()
            .filter(|g| {
                matches!(
                    g,
                    Formula::Prob { path, .. } if matches!(path.as_ref(), PathFormula::BoundedUntil(..))
                )
            })
            .count()
            * vm.states;
        assert_eq!(names.len(), total - bounded_aliases);
    }
}
