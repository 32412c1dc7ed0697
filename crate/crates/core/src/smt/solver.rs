//! Running an external SMT solver on a script.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::model::{parse_model, DecodeError, RawModel};
use super::script::{serialize, SmtScript};

/// Environment variable naming the solver command.
pub const SOLVER_ENV: &str = "RELCHECK_SOLVER";

/// Default solver invocation; the script path is appended.
pub const DEFAULT_SOLVER: &str = "z3 -smt2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
    Timeout,
    /// The solver reported an error (e.g. a rejected script).
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Unknown => "unknown",
            Status::Timeout => "timeout",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver `{0}` not found")]
    SolverNotFound(String),
    #[error("solver crashed (exit status {status}): {stderr}")]
    SolverCrashed { status: String, stderr: String },
    #[error("i/o error while running the solver: {0}")]
    Io(#[from] std::io::Error),
}

/// How to invoke the solver: a program with leading arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverCmd {
    pub program: String,
    pub args: Vec<String>,
}

impl SolverCmd {
    /// Splits a command line on whitespace, e.g. `"z3 -smt2"`.
    pub fn parse(spec: &str) -> Option<SolverCmd> {
        let mut parts = spec.split_whitespace().map(str::to_string);
        let program = parts.next()?;
        Some(SolverCmd {
            program,
            args: parts.collect(),
        })
    }

    /// The command from the environment, or the default.
    pub fn from_env() -> SolverCmd {
        std::env::var(SOLVER_ENV)
            .ok()
            .and_then(|s| SolverCmd::parse(&s))
            .unwrap_or_else(|| SolverCmd::parse(DEFAULT_SOLVER).expect("default solver command"))
    }

    pub fn display(&self) -> String {
        std::iter::once(self.program.as_str())
            .chain(self.args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone)]
pub struct SolverOutcome {
    pub status: Status,
    /// Text after the status line (the model, for sat results).
    pub model_text: String,
    /// The parsed model, when the status is sat and parsing succeeded.
    pub model: Option<RawModel>,
    pub decode_error: Option<DecodeError>,
    /// Full standard output of the solver.
    pub transcript: String,
    pub elapsed: Duration,
}

/// Serializes `script`, runs the solver on it and parses the answer.
/// When `keep` is given the script is also written to that path.
pub fn run_solver(
    cmd: &SolverCmd,
    script: &SmtScript,
    timeout: Duration,
    keep: Option<&Path>,
) -> Result<SolverOutcome, SolverError> {
    let text = serialize(script);
    if let Some(path) = keep {
        std::fs::write(path, &text)?;
    }
    run_solver_text(cmd, &text, timeout)
}

/// Runs the solver on SMT-LIB text.
pub fn run_solver_text(cmd: &SolverCmd, text: &str, timeout: Duration) -> Result<SolverOutcome, SolverError> {
    let mut file = tempfile::Builder::new().prefix("relcheck-").suffix(".smt2").tempfile()?;
    file.write_all(text.as_bytes())?;
    file.flush()?;
    let path: PathBuf = file.path().to_path_buf();

    let start = Instant::now();
    let mut child = match Command::new(&cmd.program)
        .args(&cmd.args)
        .arg(&path)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(SolverError::SolverNotFound(cmd.display()));
        }
        Err(e) => return Err(e.into()),
    };
    let mut out_pipe = child.stdout.take().expect("piped stdout");
    let mut err_pipe = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = out_pipe.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = err_pipe.read_to_string(&mut s);
        s
    });

    let mut timed_out = false;
    let exit = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if start.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            timed_out = true;
            break None;
        }
        thread::sleep(Duration::from_millis(5));
    };
    let elapsed = start.elapsed();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    drop(file);

    if timed_out {
        return Ok(SolverOutcome {
            status: Status::Timeout,
            model_text: String::new(),
            model: None,
            decode_error: None,
            transcript: stdout,
            elapsed,
        });
    }

    let (first, rest) = match stdout.split_once('\n') {
        Some((a, b)) => (a.trim(), b),
        None => (stdout.trim(), ""),
    };
    let status = match first {
        "sat" => Status::Sat,
        "unsat" => Status::Unsat,
        "unknown" => Status::Unknown,
        "timeout" => Status::Timeout,
        s if s.starts_with("(error") => Status::Error,
        _ => {
            let exit = exit.map(|s| s.to_string()).unwrap_or_default();
            return Err(SolverError::SolverCrashed {
                status: exit,
                stderr: if stderr.trim().is_empty() { stdout } else { stderr },
            });
        }
    };
    let model_text = rest.to_string();
    let (model, decode_error) = if status == Status::Sat {
        match parse_model(&model_text) {
            Ok(m) => (Some(m), None),
            Err(e) => (None, Some(e)),
        }
    } else {
        (None, None)
    };
    Ok(SolverOutcome {
        status,
        model_text,
        model,
        decode_error,
        transcript: stdout,
        elapsed,
    })
}
