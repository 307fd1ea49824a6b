//! External SMT solver process driver and the incremental bound search.
//!
//! One fresh solver process per query: the script goes to the child on
//! stdin, or through a temporary file when the command template contains
//! the placeholder `{file}`. The first output line reading `sat`, `unsat`
//! or `unknown` is the verdict; on `sat` the rest of the output must be
//! the get-value s-expression.

use std::io::Write;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::checker;
use crate::dtmc::Dtmc;
use crate::encoder::{self, DecodeError, EncodingConfig, SmtScript};
use crate::sexp;
use crate::syntax::Formula;

/// Outcome of one solver invocation.
#[derive(Debug, Clone)]
pub enum SolverVerdict {
    /// Satisfiable; carries the raw (already syntax-checked) get-value
    /// response.
    Sat { raw_assignment: String },
    Unsat,
    Unknown { timed_out: bool },
    SolverError {
        message: String,
        exit_code: Option<i32>,
    },
}

/// Configuration of the bound search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub b_max: usize,
    pub denominator: u64,
    pub per_query_timeout: Duration,
    /// Executable plus arguments; an argument containing `{file}` switches
    /// from stdin delivery to a temporary script file.
    pub solver_command: Vec<String>,
    pub parallel_bounds: bool,
    /// Re-check every decoded model with the independent checker (on by
    /// default; a failure aborts the search).
    pub verify: bool,
    pub symmetry_breaking: bool,
    pub logic_name: Option<String>,
}

impl SearchConfig {
    pub fn new(b_max: usize, denominator: u64, solver_command: Vec<String>) -> SearchConfig {
        assert!(b_max >= 1, "bMax must be at least 1");
        SearchConfig {
            b_max,
            denominator,
            per_query_timeout: Duration::from_secs(60),
            solver_command,
            parallel_bounds: false,
            verify: true,
            symmetry_breaking: false,
            logic_name: None,
        }
    }

    fn encoding_for(&self, b: usize) -> EncodingConfig {
        EncodingConfig {
            states: b,
            denominator: self.denominator,
            symmetry_breaking: self.symmetry_breaking,
            logic_name: self.logic_name.clone(),
        }
    }
}

/// What happened at one bound of the sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictKind {
    Sat,
    Unsat,
    Unknown,
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictKind::Sat => "sat",
            VerdictKind::Unsat => "unsat",
            VerdictKind::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundRecord {
    pub b: usize,
    pub verdict: VerdictKind,
    pub seconds: f64,
    pub assertions: usize,
    pub script_bytes: usize,
}

/// Outcome of the bound sweep.
#[derive(Debug, Clone)]
pub enum SearchResult {
    /// A model was found at the smallest SAT bound; `verified` records
    /// whether the independent checker confirmed it.
    ModelFound {
        b: usize,
        model: Dtmc,
        verified: bool,
        bounds: Vec<BoundRecord>,
    },
    NoModelUpTo {
        b_max: usize,
        bounds: Vec<BoundRecord>,
    },
    /// Some bound was Unknown (or timed out) and no later bound was SAT.
    Inconclusive {
        first_unknown: usize,
        bounds: Vec<BoundRecord>,
    },
}

impl SearchResult {
    pub fn bounds(&self) -> &[BoundRecord] {
        match self {
            SearchResult::ModelFound { bounds, .. }
            | SearchResult::NoModelUpTo { bounds, .. }
            | SearchResult::Inconclusive { bounds, .. } => bounds,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("solver failed at bound {b}: {message}")]
    Solver { b: usize, message: String },
    #[error("could not decode model at bound {b}: {source}")]
    Decode { b: usize, source: DecodeError },
    #[error(
        "internal soundness error: decoded model at bound {b} fails the independent checker (encoder or solver bug)"
    )]
    InternalSoundness { b: usize },
}

static SCRIPT_COUNTER: AtomicU64 = AtomicU64::new(0);

fn run_child(script_text: &str, cfg: &SearchConfig) -> Result<(String, String, Option<i32>, bool), String> {
    let (program, args) = cfg
        .solver_command
        .split_first()
        .ok_or_else(|| "empty solver command".to_string())?;

    let uses_file = cfg.solver_command.iter().any(|a| a.contains("{file}"));
    let script_path = if uses_file {
        let path = std::env::temp_dir().join(format!(
            "pctl-bsat-{}-{}.smt2",
            std::process::id(),
            SCRIPT_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&path, script_text).map_err(|e| format!("cannot write script: {}", e))?;
        Some(path)
    } else {
        None
    };

    let mut cmd = Command::new(program);
    for a in args {
        if let Some(path) = &script_path {
            cmd.arg(a.replace("{file}", &path.to_string_lossy()));
        } else {
            cmd.arg(a);
        }
    }
    cmd.stdin(if uses_file {
        Stdio::null()
    } else {
        Stdio::piped()
    })
    .stdout(Stdio::piped())
    .stderr(Stdio::piped());

    let spawn_result = cmd.spawn();
    let mut child = match spawn_result {
        Ok(c) => c,
        Err(e) => {
            if let Some(path) = &script_path {
                let _ = std::fs::remove_file(path);
            }
            return Err(format!("cannot start solver `{}`: {}", program, e));
        }
    };

    if !uses_file {
        let mut stdin = child.stdin.take().expect("stdin piped");
        let text = script_text.to_owned();
        // writer thread: the child may exit before consuming everything
        std::thread::spawn(move || {
            let _ = stdin.write_all(text.as_bytes());
        });
    }

    let mut stdout = child.stdout.take().expect("stdout piped");
    let mut stderr = child.stderr.take().expect("stderr piped");
    let out_handle = std::thread::spawn(move || {
        let mut buf = String::new();
        use std::io::Read;
        let _ = stdout.read_to_string(&mut buf);
        buf
    });
    let err_handle = std::thread::spawn(move || {
        let mut buf = String::new();
        use std::io::Read;
        let _ = stderr.read_to_string(&mut buf);
        buf
    });

    let deadline = Instant::now() + cfg.per_query_timeout;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) => {
                if Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    // don't join the readers: grandchildren may hold the
                    // pipes open past the kill
                    if let Some(path) = &script_path {
                        let _ = std::fs::remove_file(path);
                    }
                    return Ok((String::new(), String::new(), None, true));
                }
                std::thread::sleep(Duration::from_millis(10));
            }
            Err(e) => {
                let _ = child.kill();
                if let Some(path) = &script_path {
                    let _ = std::fs::remove_file(path);
                }
                return Err(format!("wait on solver failed: {}", e));
            }
        }
    };

    let stdout_text = out_handle.join().unwrap_or_default();
    let stderr_text = err_handle.join().unwrap_or_default();
    if let Some(path) = &script_path {
        let _ = std::fs::remove_file(path);
    }
    Ok((stdout_text, stderr_text, status.and_then(|s| s.code()), false))
}

/// Run the solver on one script and classify its answer. Rational values
/// in the response may be plain integers, negated terms, `(/ a b)`
/// fractions, or exact decimals.
pub fn solve_script(script: &SmtScript, cfg: &SearchConfig) -> SolverVerdict {
    let text = script.text();
    let (stdout, stderr, exit_code, timed_out) = match run_child(&text, cfg) {
        Ok(r) => r,
        Err(message) => {
            return SolverVerdict::SolverError {
                message,
                exit_code: None,
            }
        }
    };

    if timed_out {
        return SolverVerdict::Unknown { timed_out: true };
    }

    let mut lines = stdout.lines();
    let status = lines.find_map(|l| match l.trim() {
        "sat" => Some(VerdictKind::Sat),
        "unsat" => Some(VerdictKind::Unsat),
        "unknown" => Some(VerdictKind::Unknown),
        _ => None,
    });
    match status {
        Some(VerdictKind::Unsat) => SolverVerdict::Unsat,
        Some(VerdictKind::Unknown) => SolverVerdict::Unknown { timed_out: false },
        Some(VerdictKind::Sat) => {
            let rest: String = lines.collect::<Vec<_>>().join("\n");
            let raw = rest.trim().to_string();
            match sexp::parse(&raw) {
                Ok(_) => SolverVerdict::Sat {
                    raw_assignment: raw,
                },
                Err(e) => SolverVerdict::SolverError {
                    message: format!("unparseable get-value response: {} ({})", e, raw),
                    exit_code,
                },
            }
        }
        None => SolverVerdict::SolverError {
            message: format!(
                "no sat/unsat/unknown in solver output; stdout: {:?}, stderr: {:?}",
                stdout.trim(),
                stderr.trim()
            ),
            exit_code,
        },
    }
}

struct BoundOutcome {
    record: BoundRecord,
    model: Option<Dtmc>,
    error: Option<SearchError>,
}

fn run_bound(f: &Formula, b: usize, cfg: &SearchConfig) -> BoundOutcome {
    let enc_cfg = cfg.encoding_for(b);
    let (script, vm) = encoder::encode(f, &enc_cfg);
    let text_len = script.text().len();
    let start = Instant::now();
    let verdict = solve_script(&script, cfg);
    let seconds = start.elapsed().as_secs_f64();
    let mut record = BoundRecord {
        b,
        verdict: VerdictKind::Unknown,
        seconds,
        assertions: script.assertion_count(),
        script_bytes: text_len,
    };
    match verdict {
        SolverVerdict::Sat { raw_assignment } => {
            record.verdict = VerdictKind::Sat;
            match encoder::decode_model(&raw_assignment, &vm, &enc_cfg) {
                Ok(model) => {
                    if cfg.verify && !checker::check(&model, f) {
                        return BoundOutcome {
                            record,
                            model: None,
                            error: Some(SearchError::InternalSoundness { b }),
                        };
                    }
                    BoundOutcome {
                        record,
                        model: Some(model),
                        error: None,
                    }
                }
                Err(source) => BoundOutcome {
                    record,
                    model: None,
                    error: Some(SearchError::Decode { b, source }),
                },
            }
        }
        SolverVerdict::Unsat => {
            record.verdict = VerdictKind::Unsat;
            BoundOutcome {
                record,
                model: None,
                error: None,
            }
        }
        SolverVerdict::Unknown { .. } => BoundOutcome {
            record,
            model: None,
            error: None,
        },
        SolverVerdict::SolverError { message, .. } => BoundOutcome {
            record,
            model: None,
            error: Some(SearchError::Solver { b, message }),
        },
    }
}

fn assemble(bounds: Vec<BoundRecord>, found: Option<(usize, Dtmc)>, cfg: &SearchConfig) -> SearchResult {
    match found {
        Some((b, model)) => SearchResult::ModelFound {
            b,
            model,
            verified: cfg.verify,
            bounds,
        },
        None => {
            let first_unknown = bounds
                .iter()
                .find(|r| r.verdict == VerdictKind::Unknown)
                .map(|r| r.b);
            match first_unknown {
                Some(first_unknown) => SearchResult::Inconclusive {
                    first_unknown,
                    bounds,
                },
                None => SearchResult::NoModelUpTo {
                    b_max: cfg.b_max,
                    bounds,
                },
            }
        }
    }
}

/// Sweep bounds 1..=bMax in ascending order; return the first SAT bound's
/// decoded (and, unless disabled, independently verified) model. An
/// Unknown at a lower bound does not stop the sweep; it only downgrades a
/// final all-unsat answer to Inconclusive.
pub fn bounded_search(f: &Formula, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    if cfg.parallel_bounds {
        return bounded_search_parallel(f, cfg);
    }
    let mut bounds = Vec::new();
    for b in 1..=cfg.b_max {
        let outcome = run_bound(f, b, cfg);
        bounds.push(outcome.record);
        if let Some(err) = outcome.error {
            return Err(err);
        }
        if let Some(model) = outcome.model {
            return Ok(assemble(bounds, Some((b, model)), cfg));
        }
    }
    Ok(assemble(bounds, None, cfg))
}

// All bounds run as independent tasks; the coordinator keeps the records
// in bound order and picks the smallest SAT bound after joining.
fn bounded_search_parallel(f: &Formula, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    let outcomes: Vec<BoundOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = (1..=cfg.b_max)
            .map(|b| scope.spawn(move || run_bound(f, b, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bound task panicked"))
            .collect()
    });

    let mut bounds = Vec::new();
    let mut found = None;
    for mut outcome in outcomes {
        if found.is_some() {
            break;
        }
        bounds.push(outcome.record.clone());
        if let Some(err) = outcome.error.take() {
            return Err(err);
        }
        if let Some(model) = outcome.model.take() {
            found = Some((outcome.record.b, model));
        }
    }
    Ok(assemble(bounds, found, cfg))
}
