//! Library half of the `symcartan` command-line tool: problem-file schema,
//! task execution and report types. The binary in `main.rs` is a thin
//! argument-parsing layer over [`run_problem`].

pub mod corpus;
pub mod problem;
pub mod report;
pub mod tasks;

use problem::ProblemFile;
use report::Report;

/// Errors surfaced to the user. Schema errors (bad files, bad flags,
/// out-of-range parameters) exit with code 2; computation errors (the
/// engine rejecting an otherwise well-formed input) exit with code 3.
/// Failed task expectations are not errors: the run completes and exits
/// with code 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    Schema(String),
    Computation(String),
}

impl CliError {
    pub fn schema(msg: impl Into<String>) -> CliError {
        CliError::Schema(msg.into())
    }

    pub fn computation(msg: impl Into<String>) -> CliError {
        CliError::Computation(msg.into())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Computation(_) => "computation",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Schema(m) | CliError::Computation(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Computation(_) => 3,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.message() }
        })
        .to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

/// Global run options shared by every task.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Base seed for every seeded sample or field in the run.
    pub seed: u64,
    /// When set, overrides the tolerance of every numeric task.
    pub tol: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions { seed: 0, tol: None }
    }
}

/// Runs every task of a problem file in declaration order and bundles the
/// per-task reports. Expectation failures mark tasks failed but do not
/// abort the run; schema and engine errors do.
pub fn run_problem(file: &ProblemFile, opts: &RunOptions) -> Result<Report, CliError> {
    let mut out = Vec::with_capacity(file.tasks.len());
    for task in &file.tasks {
        out.push(tasks::run_task(file, task, opts)?);
    }
    Ok(Report::new(out))
}
