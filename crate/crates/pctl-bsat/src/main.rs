//! Command-line front end for the bounded satisfiability workflow.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pctl_bsat::encoder::{encode, EncodingConfig};
use pctl_bsat::oracle::{brute_force_bsat, EnumSpace};
use pctl_bsat::solver::{bounded_search, SearchConfig, SearchResult};
use pctl_bsat::syntax::Formula;
use pctl_bsat::{checker, dtmc};

const EXIT_MODEL_FOUND: u8 = 0;
const EXIT_NO_MODEL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pctl-bsat",
    about = "Find small, coin-tossable Markov chain models of PCTL formulas via SMT",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct FormulaInput {
    /// Formula given inline
    #[arg(long, value_name = "STR", conflicts_with = "formula")]
    expr: Option<String>,
    /// File containing the formula
    #[arg(long, value_name = "FILE")]
    formula: Option<PathBuf>,
}

impl FormulaInput {
    fn read(&self) -> Result<(String, Formula), String> {
        let text = match (&self.expr, &self.formula) {
            (Some(e), None) => e.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {}", path.display(), e))?,
            _ => return Err("exactly one of --expr or --formula is required".into()),
        };
        let parsed = pctl_bsat::syntax::parse(&text).map_err(|e| e.to_string())?;
        Ok((text.trim().to_string(), parsed))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a minimal simple model up to a state bound
    Solve {
        #[command(flatten)]
        input: FormulaInput,
        /// Largest state count to try
        #[arg(long, value_name = "B")]
        max_states: usize,
        /// Common denominator of all transition probabilities
        #[arg(long, value_name = "D", default_value_t = 4)]
        denominator: u64,
        /// Per-query solver timeout in seconds
        #[arg(long, value_name = "SECS", default_value_t = 60)]
        timeout: u64,
        /// Solver command line (default: the PCTL_BSAT_SOLVER env var);
        /// use the {file} placeholder for file instead of stdin delivery
        #[arg(long, value_name = "CMD")]
        solver: Option<String>,
        /// Output directory for model files and report.json
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        /// Also write model.dot
        #[arg(long)]
        dot: bool,
        /// Skip independent verification of the returned model
        #[arg(long)]
        no_verify: bool,
        /// Add symmetry-breaking constraints
        #[arg(long)]
        symmetry: bool,
        /// Run all bounds in parallel
        #[arg(long)]
        parallel: bool,
    },
    /// Model-check a formula against a PRISM explicit-state model
    Check {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, value_name = "FILE")]
        tra: PathBuf,
        #[arg(long, value_name = "FILE")]
        lab: PathBuf,
    },
    /// Print the SMT-LIB v2 script for one bound to standard output
    Encode {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, value_name = "B")]
        states: usize,
        #[arg(long, value_name = "D", default_value_t = 4)]
        denominator: u64,
        /// Add symmetry-breaking constraints
        #[arg(long)]
        symmetry: bool,
    },
    /// Exhaustively enumerate the model space and report the first witness
    Enumerate {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, value_name = "B")]
        states: usize,
        #[arg(long, value_name = "D", default_value_t = 4)]
        denominator: u64,
    },
}

#[derive(Serialize)]
struct ReportConfig {
    #[serde(rename = "maxStates")]
    max_states: usize,
    denominator: u64,
    #[serde(rename = "timeoutSecs")]
    timeout_secs: u64,
    #[serde(rename = "solverCmd")]
    solver_cmd: String,
}

#[derive(Serialize)]
struct ReportBound {
    b: usize,
    verdict: String,
    seconds: f64,
    assertions: usize,
}

#[derive(Serialize)]
struct Report {
    schema: u32,
    formula: String,
    config: ReportConfig,
    bounds: Vec<ReportBound>,
    outcome: String,
    #[serde(rename = "modelFiles")]
    model_files: Vec<String>,
    verified: bool,
}

fn solver_command(flag: Option<String>) -> Result<Vec<String>, String> {
    let raw = match flag {
        Some(s) => s,
        None => std::env::var("PCTL_BSAT_SOLVER").map_err(|_| {
            "no solver configured: pass --solver or set PCTL_BSAT_SOLVER".to_string()
        })?,
    };
    let parts: Vec<String> = raw.split_whitespace().map(str::to_owned).collect();
    if parts.is_empty() {
        return Err("solver command is empty".into());
    }
    Ok(parts)
}

#[allow(clippy::too_many_arguments)]
fn run_solve(
    input: FormulaInput,
    max_states: usize,
    denominator: u64,
    timeout: u64,
    solver: Option<String>,
    out: PathBuf,
    dot: bool,
    no_verify: bool,
    symmetry: bool,
    parallel: bool,
) -> Result<u8, String> {
    let (text, parsed) = input.read()?;
    let normalized = parsed.normalize();
    let command = solver_command(solver)?;
    let mut cfg = SearchConfig::new(max_states, denominator, command.clone());
    cfg.per_query_timeout = Duration::from_secs(timeout);
    cfg.verify = !no_verify;
    cfg.symmetry_breaking = symmetry;
    cfg.parallel_bounds = parallel;

    let result = bounded_search(&normalized, &cfg).map_err(|e| e.to_string())?;

    std::fs::create_dir_all(&out)
        .map_err(|e| format!("cannot create {}: {}", out.display(), e))?;
    let mut model_files = Vec::new();
    let (outcome, verified) = match &result {
        SearchResult::ModelFound { b, model, verified, .. } => {
            let (tra, lab) = model.export_prism();
            let tra_path = out.join("model.tra");
            let lab_path = out.join("model.lab");
            write_file(&tra_path, &tra)?;
            write_file(&lab_path, &lab)?;
            model_files.push(tra_path.display().to_string());
            model_files.push(lab_path.display().to_string());
            if dot {
                let dot_path = out.join("model.dot");
                write_file(&dot_path, &model.export_dot())?;
                model_files.push(dot_path.display().to_string());
            }
            eprintln!("model found with {} states", b);
            ("modelFound".to_string(), *verified)
        }
        SearchResult::NoModelUpTo { b_max, .. } => {
            eprintln!("no model with up to {} states", b_max);
            ("noModelUpTo".to_string(), false)
        }
        SearchResult::Inconclusive { first_unknown, .. } => {
            eprintln!("inconclusive: solver answered unknown at bound {}", first_unknown);
            ("inconclusive".to_string(), false)
        }
    };

    let report = Report {
        schema: 1,
        formula: text,
        config: ReportConfig {
            max_states,
            denominator,
            timeout_secs: timeout,
            solver_cmd: command.join(" "),
        },
        bounds: result
            .bounds()
            .iter()
            .map(|r| ReportBound {
                b: r.b,
                verdict: r.verdict.as_str().to_string(),
                seconds: r.seconds,
                assertions: r.assertions,
            })
            .collect(),
        outcome: outcome.clone(),
        model_files,
        verified,
    };
    let report_path = out.join("report.json");
    write_file(
        &report_path,
        &format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes")),
    )?;

    Ok(match result {
        SearchResult::ModelFound { .. } => EXIT_MODEL_FOUND,
        SearchResult::NoModelUpTo { .. } => EXIT_NO_MODEL,
        SearchResult::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("cannot write {}: {}", path.display(), e))
}

fn run_check(input: FormulaInput, tra: PathBuf, lab: PathBuf) -> Result<u8, String> {
    let (_, parsed) = input.read()?;
    let tra_text = std::fs::read_to_string(&tra)
        .map_err(|e| format!("cannot read {}: {}", tra.display(), e))?;
    let lab_text = std::fs::read_to_string(&lab)
        .map_err(|e| format!("cannot read {}: {}", lab.display(), e))?;
    let model = dtmc::import_prism(&tra_text, &lab_text).map_err(|e| e.to_string())?;
    if checker::check(&model, &parsed.normalize()) {
        eprintln!("model satisfies the formula");
        Ok(0)
    } else {
        eprintln!("model does not satisfy the formula");
        Ok(1)
    }
}

fn run_encode(
    input: FormulaInput,
    states: usize,
    denominator: u64,
    symmetry: bool,
) -> Result<u8, String> {
    let (_, parsed) = input.read()?;
    let mut cfg = EncodingConfig::new(states, denominator);
    cfg.symmetry_breaking = symmetry;
    let (script, _) = encode(&parsed.normalize(), &cfg);
    print!("{}", script.text());
    Ok(0)
}

fn run_enumerate(input: FormulaInput, states: usize, denominator: u64) -> Result<u8, String> {
    let (_, parsed) = input.read()?;
    let normalized = parsed.normalize();
    let atoms = normalized.atoms();
    let atom_refs: Vec<&str> = atoms.iter().map(String::as_str).collect();
    let space = EnumSpace::new(states, denominator, &atom_refs);
    let count = space.model_count();
    let witness = brute_force_bsat(&normalized, &space).map_err(|e| e.to_string())?;
    let out = serde_json::json!({
        "models": count.to_string(),
        "witness": witness.as_ref().map(|m| {
            let (tra, lab) = m.export_prism();
            serde_json::json!({ "tra": tra, "lab": lab, "dot": m.export_dot() })
        }),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json serializes"));
    Ok(if witness.is_some() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not usage errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let outcome = match cli.command {
        Cmd::Solve {
            input,
            max_states,
            denominator,
            timeout,
            solver,
            out,
            dot,
            no_verify,
            symmetry,
            parallel,
        } => run_solve(
            input, max_states, denominator, timeout, solver, out, dot, no_verify, symmetry,
            parallel,
        ),
        Cmd::Check { input, tra, lab } => run_check(input, tra, lab),
        Cmd::Encode {
            input,
            states,
            denominator,
            symmetry,
        } => run_encode(input, states, denominator, symmetry),
        Cmd::Enumerate {
            input,
            states,
            denominator,
        } => run_enumerate(input, states, denominator),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {}", message);
            ExitCode::from(EXIT_ERROR)
        }
    }
}
