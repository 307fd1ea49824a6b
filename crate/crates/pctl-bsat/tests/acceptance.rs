//! Acceptance gate: one test per release criterion, each printing a
//! single pass line (visible with `--nocapture`; a failed assertion is
//! the fail line). Criteria 1, 2, 5, 6 need the real SMT solver; the
//! rest are solver-free.
//!
//! Run with `cargo test --test acceptance -- --nocapture`.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;

use pctl_bsat::checker::{self, StateSet};
use pctl_bsat::dtmc::{rational, Dtmc, Rational};
use pctl_bsat::encoder::{decode_model, encode, EncodingConfig};
use pctl_bsat::oracle::{brute_force_bsat, EnumSpace};
use pctl_bsat::solver::{bounded_search, solve_script, SearchConfig, SearchResult, SolverVerdict};
use pctl_bsat::syntax::{parse, pretty, Comparison, Formula, PathFormula};

use common::{random_dtmc, random_formula, rat, solver_command};

fn search_config(b_max: usize, denominator: u64) -> SearchConfig {
    let mut cfg = SearchConfig::new(b_max, denominator, solver_command());
    cfg.per_query_timeout = Duration::from_secs(120);
    cfg
}

/// Deduplicated corpus of normalized formulas over at most two atoms,
/// nesting depth at most 2, thresholds in {0, 1/4, 1/2, 3/4, 1}, step
/// bounds at most 3.
fn corpus(n: usize, seed: u64) -> Vec<Formula> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        let f = random_formula(&mut rng, 2, &["a", "b"]).normalize();
        if seen.insert(pretty(&f)) {
            out.push(f);
        }
    }
    out
}

fn labels(sets: &[&[&str]]) -> Vec<BTreeSet<String>> {
    sets.iter()
        .map(|s| s.iter().map(|a| a.to_string()).collect())
        .collect()
}

/// Criterion 1: on small instances the solver pipeline and exhaustive
/// enumeration agree exactly — SAT iff a model exists in the space, and
/// every decoded model satisfies the formula.
#[test]
fn criterion_1_solver_agrees_with_enumeration() {
    let formulas = corpus(200, 0xacce9);
    let cfg = search_config(2, 2);
    let mut sat_count = 0usize;
    for f in &formulas {
        let atoms = f.atoms();
        let atom_refs: Vec<&str> = atoms.iter().map(String::as_str).collect();
        for b in [1usize, 2] {
            for d in [1u64, 2] {
                let enc = EncodingConfig::new(b, d);
                let (script, vm) = encode(f, &enc);
                let verdict = solve_script(&script, &cfg);
                let oracle = brute_force_bsat(f, &EnumSpace::new(b, d, &atom_refs))
                    .expect("space is tiny");
                match verdict {
                    SolverVerdict::Sat { raw_assignment } => {
                        assert!(
                            oracle.is_some(),
                            "solver sat but enumeration finds nothing: {} (b={}, D={})",
                            f, b, d
                        );
                        let m = decode_model(&raw_assignment, &vm, &enc).unwrap();
                        assert!(
                            checker::check(&m, f),
                            "decoded model fails the checker: {} (b={}, D={})",
                            f, b, d
                        );
                        sat_count += 1;
                    }
                    SolverVerdict::Unsat => assert!(
                        oracle.is_none(),
                        "solver unsat but enumeration finds a model: {} (b={}, D={})",
                        f, b, d
                    ),
                    other => panic!("solver gave {:?} on {} (b={}, D={})", other, f, b, d),
                }
            }
        }
    }
    // sanity: the corpus must exercise both outcomes
    let total = formulas.len() * 4;
    assert!(sat_count > 0 && sat_count < total);
    println!(
        "criterion 1 (solver/enumeration equivalence, {} formulas x 4 spaces, {} sat): pass",
        formulas.len(),
        sat_count
    );
}

/// Criterion 2: every model the search returns has passed independent
/// verification, and re-checking it here agrees.
#[test]
fn criterion_2_every_returned_model_verifies() {
    let formulas = corpus(25, 0x6a7e);
    let cfg = search_config(2, 2);
    let mut found = 0usize;
    for f in &formulas {
        if let SearchResult::ModelFound { model, verified, b, .. } =
            bounded_search(f, &cfg).unwrap()
        {
            assert!(verified, "unverified model returned for {}", f);
            assert!(checker::check(&model, f), "re-check failed for {}", f);
            assert!(b <= 2 && model.state_count() == b);
            found += 1;
        }
    }
    assert!(found > 0);
    println!(
        "criterion 2 (verification gate on {} found models): pass",
        found
    );
}

/// Criterion 3: the checker is exact on closed-form instances and its
/// bounded iterates converge monotonically on fuzzed chains.
#[test]
fn criterion_3_checker_exactness() {
    // symmetric gambler's ruin on {0,1,2}, absorbing ends, start in the
    // middle: ruin probability is exactly 1/2
    let gambler = Dtmc::new(
        3,
        vec![
            vec![rational(1, 1), rational(0, 1), rational(0, 1)],
            vec![rational(1, 2), rational(0, 1), rational(1, 2)],
            vec![rational(0, 1), rational(0, 1), rational(1, 1)],
        ],
        labels(&[&["ruin"], &[], &["goal"]]),
    )
    .unwrap();
    let goal = checker::sat_set(&gambler, &Formula::atom("goal"));
    let all = StateSet::full(3);
    assert_eq!(checker::prob_until(&gambler, &all, &goal)[1], rat(1, 2));

    // half-escape: self-loop 1/2, escape 1/2; Pr(F<=2 goal) = 3/4 exactly
    let escape = Dtmc::new(
        2,
        vec![
            vec![rational(1, 2), rational(1, 2)],
            vec![rational(0, 1), rational(1, 1)],
        ],
        labels(&[&[], &["goal"]]),
    )
    .unwrap();
    let goal = checker::sat_set(&escape, &Formula::atom("goal"));
    let all = StateSet::full(2);
    assert_eq!(
        checker::prob_bounded_until(&escape, &all, &goal, 2)[0],
        rat(3, 4)
    );

    // fuzz: bounded iterates are monotone and dominated by the fixpoint
    let start = Instant::now();
    for seed in 0..1000u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_dtmc(&mut rng, 4, 4, &["a", "b"]);
        let k = (seed % 4) as u64;
        let s1 = checker::sat_set(&m, &Formula::atom("a"));
        let s2 = checker::sat_set(&m, &Formula::atom("b"));
        let xk = checker::prob_bounded_until(&m, &s1, &s2, k);
        let xk1 = checker::prob_bounded_until(&m, &s1, &s2, k + 1);
        let xinf = checker::prob_until(&m, &s1, &s2);
        for s in 0..m.state_count() {
            assert!(xk[s] <= xk1[s] && xk1[s] <= xinf[s]);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "fuzz took {:?}", elapsed);
    println!(
        "criterion 3 (checker exactness, 1000 fuzzed chains in {:.1}s): pass",
        elapsed.as_secs_f64()
    );
}

/// Criterion 4: the sweep returns the *smallest* satisfying bound, which
/// enumeration confirms independently.
#[test]
fn criterion_4_minimality() {
    let f = parse("a & P>=1[X(!a & P>=1[X a])]").unwrap().normalize();
    match bounded_search(&f, &search_config(3, 2)).unwrap() {
        SearchResult::ModelFound { b, model, .. } => {
            assert_eq!(b, 2);
            assert!(checker::check(&model, &f));
        }
        other => panic!("expected a model, got {:?}", other),
    }
    // no single-state model exists at any simple denominator up to 2
    for d in [1u64, 2] {
        assert!(brute_force_bsat(&f, &EnumSpace::new(1, d, &["a"]))
            .unwrap()
            .is_none());
    }

    let g = parse("a").unwrap().normalize();
    match bounded_search(&g, &search_config(3, 2)).unwrap() {
        SearchResult::ModelFound { b, .. } => assert_eq!(b, 1),
        other => panic!("expected a model, got {:?}", other),
    }
    println!("criterion 4 (minimal bound, enumeration-confirmed): pass");
}

/// Criterion 5: a 200-operator conjunction with pairwise distinct
/// thresholds solves well inside the ten-minute budget at b <= 2.
#[test]
fn criterion_5_formula_size_scaling() {
    let mut f = Formula::True;
    for i in 1..=100u64 {
        let reach = Formula::prob(
            Comparison::Ge,
            Rational::new(i.into(), 200.into()),
            PathFormula::Finally(Formula::atom("a"), None),
        );
        let step = Formula::prob(
            Comparison::Ge,
            Rational::new(i.into(), 400.into()),
            PathFormula::Next(Formula::atom("a")),
        );
        f = Formula::and(f, Formula::and(reach, step));
    }
    let f = f.normalize();

    let mut cfg = search_config(2, 4);
    cfg.per_query_timeout = Duration::from_secs(600);
    let start = Instant::now();
    let result = bounded_search(&f, &cfg).unwrap();
    let elapsed = start.elapsed();
    match result {
        SearchResult::ModelFound { b, model, verified, .. } => {
            assert!(b <= 2);
            assert!(verified);
            assert!(checker::check(&model, &f));
        }
        other => panic!("expected a model, got {:?}", other),
    }
    assert!(elapsed < Duration::from_secs(600), "took {:?}", elapsed);
    println!(
        "criterion 5 (200 probabilistic operators in {:.1}s): pass",
        elapsed.as_secs_f64()
    );
}

/// Criterion 6: search time grows with the minimal model size. Family:
/// period-b cycles a, !a, ..., !a, back to a; the minimal model of the
/// b-th member has exactly b states, so the sweep issues b queries.
#[test]
fn criterion_6_difficulty_tracks_minimal_size() {
    let family = [
        ("a & P>=1[X a]", 1usize),
        ("a & P>=1[X(!a & P>=1[X a])]", 2),
        ("a & P>=1[X(!a & P>=1[X(!a & P>=1[X a])])]", 3),
    ];
    let mut medians = Vec::new();
    for (text, minimal_b) in family {
        let f = parse(text).unwrap().normalize();
        let cfg = search_config(minimal_b, 2);
        let mut times: Vec<f64> = (0..5)
            .map(|_| {
                let start = Instant::now();
                match bounded_search(&f, &cfg).unwrap() {
                    SearchResult::ModelFound { b, .. } => assert_eq!(b, minimal_b),
                    other => panic!("expected a model for {}, got {:?}", text, other),
                }
                start.elapsed().as_secs_f64()
            })
            .collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push(times[2]);
    }
    assert!(
        medians[0] < medians[1] && medians[1] < medians[2],
        "medians not increasing: {:?}",
        medians
    );
    println!(
        "criterion 6 (median search time {:.2}s < {:.2}s < {:.2}s across minimal sizes 1,2,3): pass",
        medians[0], medians[1], medians[2]
    );
}

/// Criterion 7: printing and reparsing is the identity on ten thousand
/// fuzzed formulas, in well under ten seconds.
#[test]
fn criterion_7_parser_round_trip() {
    let mut rng = StdRng::seed_from_u64(0x707);
    let start = Instant::now();
    for _ in 0..10_000 {
        let f = random_formula(&mut rng, 6, &["a", "b", "c"]);
        let printed = pretty(&f);
        let reparsed = parse(&printed)
            .unwrap_or_else(|e| panic!("reparse failed: {} in {}", e, printed));
        assert_eq!(reparsed, f, "round trip changed {}", printed);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {:?}", elapsed);
    println!(
        "criterion 7 (10000 parser round trips in {:.1}s): pass",
        elapsed.as_secs_f64()
    );
}

/// Criterion 8: models built with a power-of-two denominator are
/// simulable by finitely many fair coin tosses; a denominator-3 model is
/// not, at any toss budget.
#[test]
fn criterion_8_coin_simulability() {
    let f = parse("P>=1/4[X a] & P>=1/2[X !a]").unwrap().normalize();
    match bounded_search(&f, &search_config(2, 4)).unwrap() {
        SearchResult::ModelFound { model, .. } => {
            assert!(model.is_coin_simulable(2), "D=4 model needs two tosses");
        }
        other => panic!("expected a model, got {:?}", other),
    }

    let thirds = Dtmc::new(
        2,
        vec![
            vec![rational(1, 3), rational(2, 3)],
            vec![rational(0, 1), rational(1, 1)],
        ],
        labels(&[&[], &["a"]]),
    )
    .unwrap();
    for t in 0..=20 {
        assert!(!thirds.is_coin_simulable(t));
    }
    println!("criterion 8 (coin simulability at D=4, refuted at D=3): pass");
}
