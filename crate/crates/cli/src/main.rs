//! Command-line front end: `relcheck <file> --assert <name> ...`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use relcheck::pipeline::{load_model_file, run_pipeline, Mode, PipelineConfig, DEFAULT_SCOPES};
use relcheck::smt::SolverCmd;

/// Exit status for usage, input and solver errors.
const EXIT_ERROR: u8 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Bounded,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportArg {
    Json,
    Text,
}

/// Checks an assertion of a relational model, first by bounded search and
/// optionally by an unbounded proof attempt.
///
/// Exit status: 0 valid (BV or FV), 1 counterexample (CE), 2 undecided (UK),
/// 3 error.
#[derive(Debug, Parser)]
#[command(name = "relcheck", version)]
struct Args {
    /// Model file.
    file: PathBuf,
    /// Assertion to check.
    #[arg(long = "assert", value_name = "NAME")]
    assertion: String,
    /// Uniform scope of a bounded check; repeat for several (default 4 8 16).
    #[arg(long = "scope", value_name = "N", num_args = 1.., value_parser = clap::value_parser!(u32).range(1..))]
    scopes: Vec<u32>,
    #[arg(long, value_enum, default_value = "bounded")]
    mode: ModeArg,
    /// Time limit for each solver call, in seconds.
    #[arg(long, value_name = "SECS", default_value_t = 60.0)]
    timeout: f64,
    /// Solver command line; the script path is appended
    /// (default: $RELCHECK_SOLVER, else "z3 -smt2").
    #[arg(long, value_name = "CMD")]
    solver: Option<String>,
    /// Keep every generated SMT script in DIR.
    #[arg(long, value_name = "DIR")]
    keep_smt: Option<PathBuf>,
    /// Write the proof obligation to DIR when the unbounded stage is undecided.
    #[arg(long, value_name = "DIR")]
    export_obligation: Option<PathBuf>,
    /// Assume the ordered signature has exactly N elements in the obligation.
    #[arg(long, value_name = "N")]
    finite_ordering: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportArg,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        // Help and version requests succeed; usage errors must not be
        // confused with the UK status that clap's own exit code would mean.
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("relcheck: {message}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(args: &Args) -> Result<u8, String> {
    if !(args.timeout.is_finite() && args.timeout > 0.0) {
        return Err(format!("invalid timeout {}", args.timeout));
    }
    let solver = match &args.solver {
        Some(s) => SolverCmd::parse(s).ok_or("empty solver command")?,
        None => SolverCmd::from_env(),
    };
    let cfg = PipelineConfig {
        scopes: if args.scopes.is_empty() { DEFAULT_SCOPES.to_vec() } else { args.scopes.clone() },
        mode: match args.mode {
            ModeArg::Bounded => Mode::Bounded,
            ModeArg::Full => Mode::Full,
        },
        timeout: Duration::from_secs_f64(args.timeout),
        solver,
        keep_smt: args.keep_smt.clone(),
        export_dir: args.export_obligation.clone(),
        finite_ordering: args.finite_ordering,
    };
    let model = load_model_file(&args.file).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let report = run_pipeline(&model, &args.assertion, &cfg).map_err(|e| e.to_string())?;
    let text = match args.report {
        ReportArg::Json => report.to_json() + "\n",
        ReportArg::Text => report.to_text(),
    };
    // A closed pipe (`relcheck ... | head`) must not turn the verdict into a
    // panic; the exit status still carries it.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    Ok(report.verdict.exit_code() as u8)
}
