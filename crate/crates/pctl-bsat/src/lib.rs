//! Bounded satisfiability for PCTL.
//!
//! Given a PCTL formula and a state bound, search for a *simple* model:
//! a discrete-time Markov chain with few states whose transition
//! probabilities all share a small fixed denominator. The search reduces
//! each bound to an SMT-LIB v2 query handed to an external solver
//! process; every model the solver returns is decoded into an
//! exact-rational DTMC and re-checked by an independent explicit-state
//! PCTL model checker before it is reported.
//!
//! Module map:
//! - [`syntax`]: formula AST, parser, pretty-printer, normalization;
//! - [`dtmc`]: exact-rational chains, validation, PRISM/DOT export;
//! - [`checker`]: the verification oracle (graph precomputation plus
//!   exact Gaussian elimination, no floating point anywhere);
//! - [`encoder`]: the reduction to SMT and model decoding;
//! - [`solver`]: solver subprocess driver and the ascending bound sweep;
//! - [`oracle`]: exhaustive enumeration of tiny model spaces, the ground
//!   truth for completeness testing.

pub mod checker;
pub mod dtmc;
pub mod encoder;
pub mod oracle;
pub mod sexp;
pub mod solver;
pub mod syntax;

pub use dtmc::{Dtmc, Rational};
pub use encoder::{EncodingConfig, SmtScript, VariableMap};
pub use solver::{SearchConfig, SearchResult, SolverVerdict};
pub use syntax::{Comparison, Formula, PathFormula};
