//! `ergolib` command line: spectral decompositions, boundedness verdicts,
//! Cesàro-mean reports, rate-bound verification and the sequence-space
//! operator models, with deterministic JSON/CSV/text reports.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification failure.

mod builtin;
mod commands;
mod input;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use commands::{InputError, Outcome, RunConfig};
use report::ReportEnvelope;

#[derive(Parser)]
#[command(
    name = "ergolib",
    version,
    about = "Spectral decompositions and mean ergodic limits of y'(t) = A y(t)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full spectral decomposition with eigenvalue indices and projections.
    Decompose(CommonArgs),
    /// Boundedness verdict for the trajectory from an initial state.
    Classify(CommonArgs),
    /// Cesàro means on a time grid, their ergodic limit and rate bound.
    Cesaro(CommonArgs),
    /// O(1/t) rate-bound verification for (reducibly) invertible operators.
    Rate(CommonArgs),
    /// Sequence-space operator models: shifts and diagonal spectral operators.
    Model(CommonArgs),
    /// Combined decomposition/classification/Cesàro/rate/kernel report.
    Report(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Decompose(_) => "decompose",
            Command::Classify(_) => "classify",
            Command::Cesaro(_) => "cesaro",
            Command::Rate(_) => "rate",
            Command::Model(_) => "model",
            Command::Report(_) => "report",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Decompose(a)
            | Command::Classify(a)
            | Command::Cesaro(a)
            | Command::Rate(a)
            | Command::Model(a)
            | Command::Report(a) => a,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Input JSON file.
    #[arg(long, value_name = "PATH", conflicts_with = "builtin")]
    input: Option<PathBuf>,
    /// Named builtin fixture instead of an input file.
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Largest grid time.
    #[arg(long, value_name = "R", default_value_t = 1e4)]
    t_max: f64,
    /// Grid points per decade.
    #[arg(long, value_name = "N", default_value_t = 16)]
    grid_density: usize,
    /// Override the eigenvalue clustering tolerance.
    #[arg(long, value_name = "R")]
    tol_eig: Option<f64>,
    /// Override the rank (singular value) cutoff.
    #[arg(long, value_name = "R")]
    tol_rank: Option<f64>,
    /// Override the residual verification threshold.
    #[arg(long, value_name = "R")]
    tol_residual: Option<f64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path (stdout when absent).
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ERGOLIB_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK // --help / --version
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load_document(args: &CommonArgs) -> Result<Value, String> {
    match (&args.input, &args.builtin) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| {
                format!(
                    "malformed JSON in {} at line {}, column {}: {e}",
                    path.display(),
                    e.line(),
                    e.column()
                )
            })
        }
        (None, Some(name)) => builtin::builtin_input(name).ok_or_else(|| {
            format!(
                "unknown builtin \"{name}\"; available: {}",
                builtin::BUILTIN_NAMES.join(", ")
            )
        }),
        _ => Err("exactly one of --input or --builtin is required".to_string()),
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    let args = cli.command.args();
    if args.t_max <= 1.0 || !args.t_max.is_finite() {
        return Err("--t-max must be a finite value greater than 1".to_string());
    }
    if args.grid_density < 2 {
        return Err("--grid-density must be at least 2".to_string());
    }
    for (flag, value) in [
        ("--tol-eig", args.tol_eig),
        ("--tol-rank", args.tol_rank),
        ("--tol-residual", args.tol_residual),
    ] {
        if let Some(v) = value {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("{flag} must be a finite nonnegative value"));
            }
        }
    }
    let command = cli.command.name();
    if args.format == Format::Csv && command != "cesaro" {
        return Err("csv output is only available for the `cesaro` grid".to_string());
    }

    let document = load_document(args)?;
    let problem = input::parse_problem(&document)?;
    log::info!("{} on a {} problem", command, problem.kind());

    let cfg = RunConfig {
        t_max: args.t_max,
        grid_density: args.grid_density,
        tol_eig: args.tol_eig,
        tol_rank: args.tol_rank,
        tol_residual: args.tol_residual,
    };

    let outcome = match &cli.command {
        Command::Decompose(_) => commands::run_decompose(&problem, &cfg),
        Command::Classify(_) => commands::run_classify(&problem, &cfg),
        Command::Cesaro(_) => commands::run_cesaro(&problem, &cfg),
        Command::Rate(_) => commands::run_rate(&problem, &cfg),
        Command::Model(_) => commands::run_model(&problem, &cfg),
        Command::Report(_) => commands::run_report(&problem, &cfg),
    };
    let outcome = match outcome {
        Ok(outcome) => outcome,
        Err(InputError(message)) => return Err(message),
    };

    let (results, warnings, failure) = match outcome {
        Outcome::Ok { results, warnings } => (results, warnings, None),
        Outcome::Failed {
            results,
            warnings,
            failure,
        } => (results, warnings, Some(failure)),
    };
    let envelope = ReportEnvelope {
        command: command.to_string(),
        digest: report::input_digest(&document),
        config: cfg.config_value(),
        results,
        warnings,
        failure,
    };

    let rendered = match args.format {
        Format::Json => envelope.render_json(),
        Format::Text => envelope.render_text(),
        Format::Csv => render_csv(&envelope)?,
    };
    match &args.output {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }

    Ok(if envelope.failure.is_none() {
        EXIT_OK
    } else {
        if let Some(failure) = &envelope.failure {
            log::warn!("verification failed: {failure}");
        }
        EXIT_VERIFICATION
    })
}

/// CSV is defined for the Cesàro grid time series only.
fn render_csv(envelope: &ReportEnvelope) -> Result<String, String> {
    let grid = envelope
        .results
        .get("grid")
        .and_then(Value::as_array)
        .ok_or_else(|| "no grid to render as csv".to_string())?;
    let mut points = Vec::with_capacity(grid.len());
    for entry in grid {
        let t = entry["t"].as_f64().unwrap_or(f64::NAN);
        let mean: Vec<ergolib::Complex64> = entry["mean"]
            .as_array()
            .map(|pairs| {
                pairs
                    .iter()
                    .map(|p| {
                        ergolib::Complex64::new(
                            p[0].as_f64().unwrap_or(f64::NAN),
                            p[1].as_f64().unwrap_or(f64::NAN),
                        )
                    })
                    .collect()
            })
            .unwrap_or_default();
        let error_norm = entry["error_norm"].as_f64().unwrap_or(f64::NAN);
        points.push(ergolib::ergodic::GridPoint {
            t,
            mean,
            error_norm,
        });
    }
    Ok(report::render_grid_csv(&points))
}
