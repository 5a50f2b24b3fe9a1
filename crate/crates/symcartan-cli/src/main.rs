//! Command-line front end. Every subcommand either runs the task list of a
//! problem file as written (`run`, `corpus`) or replaces it with a single
//! task assembled from flags. Reports are JSON on stdout, or at `--out`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use symcartan_cli::problem::{Factor, ProblemFile, Task};
use symcartan_cli::report::Report;
use symcartan_cli::{corpus, run_problem, CliError, RunOptions};

#[derive(Parser)]
#[command(
    name = "symcartan",
    about = "Exact symmetric Cartan calculus on coordinate charts",
    version
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed for sampled points and seeded test fields.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the tolerance of every numeric check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FileArg {
    /// Problem file (JSON).
    file: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task list of a problem file as written.
    Run(FileArg),
    /// Killing tensors of one degree within a polynomial ansatz.
    Kill {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = 3)]
        bound: u16,
    },
    /// Symmetric cohomology dimensions (kernel, exact, quotient).
    Cohomology {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Fix the ansatz bound; omitted means escalate until stable.
        #[arg(long)]
        bound: Option<u16>,
    },
    /// Affine and parallel vector fields of the connection.
    Affine {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value_t = 3)]
        bound: u16,
    },
    /// Exact identity suite for the split metric on the doubled chart.
    Pw {
        #[command(flatten)]
        file: FileArg,
    },
    /// Summand dimensions of the lifted-metric degree-one cohomology.
    PwLift {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value_t = 3)]
        bound: u16,
    },
    /// Product classes against a second factor, optionally compared with
    /// the full product cohomology.
    Kunneth {
        #[command(flatten)]
        file: FileArg,
        /// Problem file of the second factor (manifold + connection).
        #[arg(long)]
        other: PathBuf,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = 3)]
        bound: u16,
        /// Also compute the full cohomology of the product connection.
        #[arg(long)]
        full: bool,
    },
    /// Classify a circle connection by the mean of its coefficient.
    Circle {
        #[command(flatten)]
        file: FileArg,
    },
    /// Lie-admissibility and symmetric cohomology of a product table.
    Lieadm {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Fixed-step RK4 geodesic with optional conserved-quantity drift.
    Geodesic {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        h: f64,
        #[arg(long = "T")]
        horizon: f64,
        /// Start coordinates, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        start: Vec<f64>,
        /// Start velocity, comma-separated.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        velocity: Vec<f64>,
        /// Write the trajectory as CSV here.
        #[arg(long)]
        csv: Option<String>,
        /// Also track the drift of every Killing one-form within this
        /// ansatz bound.
        #[arg(long)]
        killing_bound: Option<u16>,
        /// Fail when any tracked drift reaches this value.
        #[arg(long)]
        max_drift: Option<f64>,
    },
    /// Commutation-relation suite on a spanning family of forms.
    Identities {
        #[command(flatten)]
        file: FileArg,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value_t = 2)]
        coeff_degree: u16,
    },
    /// Run every problem file in a fixture directory.
    Corpus {
        /// Keep only files whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Fixture directory (defaults to the workspace corpus).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn single_task(path: &PathBuf, task: Task) -> Result<ProblemFile, CliError> {
    let mut file = ProblemFile::from_path(path)?;
    file.tasks = vec![task];
    Ok(file)
}

fn emit(report: &Report, out: &Option<PathBuf>) -> Result<(), CliError> {
    let text = report.to_json();
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::schema(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let opts = RunOptions {
        seed: cli.seed,
        tol: cli.tol,
    };
    let file = match cli.command {
        Command::Run(f) => ProblemFile::from_path(&f.file)?,
        Command::Kill { file, degree, bound } => single_task(
            &file.file,
            Task::Kill {
                degree,
                bound,
                expect_dim: None,
            },
        )?,
        Command::Cohomology { file, degree, bound } => single_task(
            &file.file,
            Task::Cohomology {
                degree,
                bound,
                expect: None,
            },
        )?,
        Command::Affine { file, bound } => {
            single_task(&file.file, Task::Affine { bound, expect: None })?
        }
        Command::Pw { file } => single_task(&file.file, Task::Pw { seed: None })?,
        Command::PwLift { file, bound } => single_task(
            &file.file,
            Task::PwLift {
                bound,
                expect_summands: None,
                expect_total: None,
            },
        )?,
        Command::Kunneth {
            file,
            other,
            degree,
            bound,
            full,
        } => {
            let factor_file = ProblemFile::from_path(&other)?;
            let manifold = factor_file.manifold.ok_or_else(|| {
                CliError::schema("the second factor needs a manifold section".to_string())
            })?;
            let connection = factor_file.connection.ok_or_else(|| {
                CliError::schema("the second factor needs a connection section".to_string())
            })?;
            single_task(
                &file.file,
                Task::Kunneth {
                    other: Factor { manifold, connection },
                    degree,
                    bound,
                    compare_full: full,
                    expect_dim: None,
                    expect_full_dim: None,
                },
            )?
        }
        Command::Circle { file } => single_task(
            &file.file,
            Task::Circle {
                expect_dim: None,
                expect_levi_civita: None,
            },
        )?,
        Command::Lieadm { file, max_degree } => single_task(
            &file.file,
            Task::Lieadm {
                max_degree,
                expect_admissible: true,
                expect_h: None,
            },
        )?,
        Command::Geodesic {
            file,
            h,
            horizon,
            start,
            velocity,
            csv,
            killing_bound,
            max_drift,
        } => single_task(
            &file.file,
            Task::Geodesic {
                h,
                horizon,
                start,
                velocity,
                killing_bound,
                max_drift,
                csv,
            },
        )?,
        Command::Identities {
            file,
            max_degree,
            coeff_degree,
        } => single_task(
            &file.file,
            Task::Identities {
                max_degree,
                coeff_degree,
                seed: None,
            },
        )?,
        Command::Corpus { filter, dir } => {
            let dir = dir.unwrap_or_else(corpus::default_dir);
            let entries = corpus::run_corpus(&dir, filter.as_deref(), &opts)?;
            let mut all_pass = true;
            let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
            for entry in &entries {
                let status = if entry.report.all_pass { "pass" } else { "fail" };
                all_pass &= entry.report.all_pass;
                let seconds: f64 = entry.report.tasks.iter().map(|t| t.seconds).sum();
                println!(
                    "{:width$}  {status}  {:>8.2}s  ({} tasks)",
                    entry.name,
                    seconds,
                    entry.report.tasks.len(),
                );
            }
            if let Some(path) = &cli.out {
                let merged: Vec<serde_json::Value> = entries
                    .iter()
                    .map(|e| {
                        serde_json::json!({
                            "name": e.name,
                            "report": serde_json::to_value(&e.report).expect("report serializes"),
                        })
                    })
                    .collect();
                let text = serde_json::to_string_pretty(&merged).expect("corpus serializes");
                std::fs::write(path, text + "\n").map_err(|e| {
                    CliError::schema(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            return Ok(all_pass);
        }
    };
    let report = run_problem(&file, &opts)?;
    let all_pass = report.all_pass;
    emit(&report, &cli.out)?;
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
