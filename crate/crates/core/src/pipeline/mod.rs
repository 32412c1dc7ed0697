//! The staged check: bounded checks at ascending scopes, then (in full
//! mode) the unbounded check, then export of a proof obligation.

mod report;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::eval::validate_counterexample;
use crate::fol::export_obligation;
use crate::model::{typecheck, Model, ModelError};
use crate::smt::{run_solver, SolverCmd, SolverError, SolverOutcome, SmtScript, Status};
use crate::syntax::{parse, FrontendError};
use crate::translate::{decode_instance, encode_check, encode_unbounded, EncodingMetadata, ScopeAssignment, TranslateError};

pub use report::{CounterexampleReport, Mode, Outcome, Stage, StageRecord, Verdict, VerdictReport, Witness};

/// Scopes checked when none are given.
pub const DEFAULT_SCOPES: [u32; 3] = [4, 8, 16];

/// Per-solver-call time limit when none is given.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown assertion `{0}`")]
    UnknownAssertion(String),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("the solver rejected the {stage} script: {message}")]
    SolverRejected { stage: &'static str, message: String },
    #[error("no scopes to check")]
    NoScopes,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Uniform scopes of the bounded stage; checked in ascending order.
    pub scopes: Vec<u32>,
    pub mode: Mode,
    /// Limit for each solver call.
    pub timeout: Duration,
    pub solver: SolverCmd,
    /// Directory receiving every generated SMT script.
    pub keep_smt: Option<PathBuf>,
    /// Directory receiving the obligation when the unbounded stage is
    /// undecided.
    pub export_dir: Option<PathBuf>,
    /// Size of the ordered signature assumed by the obligation; unbounded
    /// when absent.
    pub finite_ordering: Option<u32>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            scopes: DEFAULT_SCOPES.to_vec(),
            mode: Mode::Bounded,
            timeout: DEFAULT_TIMEOUT,
            solver: SolverCmd::from_env(),
            keep_smt: None,
            export_dir: None,
            finite_ordering: None,
        }
    }
}

/// Parses and typechecks a model.
pub fn load_model(text: &str) -> Result<Model, PipelineError> {
    Ok(typecheck(&parse(text)?)?)
}

pub fn load_model_file(path: &Path) -> Result<Model, PipelineError> {
    load_model(&std::fs::read_to_string(path)?)
}

fn millis(d: Duration) -> u64 {
    d.as_millis().try_into().unwrap_or(u64::MAX)
}

struct Run<'a> {
    model: &'a Model,
    assertion: &'a str,
    cfg: &'a PipelineConfig,
    report: VerdictReport,
}

/// Result of interpreting one sat answer.
enum SatResult {
    Confirmed(CounterexampleReport),
    Rejected(Outcome, String),
}

impl Run<'_> {
    fn solve(
        &mut self,
        stage: Stage,
        scope: Option<u32>,
        script: &SmtScript,
    ) -> Result<(SolverOutcome, Option<String>), PipelineError> {
        let keep = match &self.cfg.keep_smt {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let name = match scope {
                    Some(n) => format!("{}_scope{n}.smt2", self.assertion),
                    None => format!("{}_{}.smt2", self.assertion, stage.as_str()),
                };
                Some(dir.join(name))
            }
            None => None,
        };
        let out = run_solver(&self.cfg.solver, script, self.cfg.timeout, keep.as_deref())?;
        if out.status == Status::Error {
            return Err(PipelineError::SolverRejected {
                stage: stage.as_str(),
                message: out.transcript.trim().to_string(),
            });
        }
        Ok((out, keep.map(|p| p.display().to_string())))
    }

    fn record(&mut self, stage: Stage, scope: Option<u32>, out: &SolverOutcome, outcome: Outcome, file: Option<String>, detail: Option<String>) {
        self.report.stages.push(StageRecord {
            stage,
            scope,
            status: Some(out.status.as_str().to_string()),
            outcome,
            elapsed_ms: millis(out.elapsed),
            file,
            detail,
        });
    }

    /// Decodes a sat answer and confirms it with the evaluator.
    fn confirm(&self, stage: Stage, scope: Option<u32>, out: &SolverOutcome, meta: &EncodingMetadata) -> SatResult {
        let Some(raw) = &out.model else {
            let why = out.decode_error.as_ref().map_or("the solver printed no model".to_string(), |e| e.to_string());
            return SatResult::Rejected(Outcome::DecodeFailed, why);
        };
        let decoded = match decode_instance(self.model, raw, meta) {
            Ok(d) => d,
            Err(e) => return SatResult::Rejected(Outcome::DecodeFailed, e.to_string()),
        };
        if !validate_counterexample(self.model, self.assertion, &decoded.instance) {
            return SatResult::Rejected(Outcome::Spurious, "the decoded instance is not a counterexample".into());
        }
        SatResult::Confirmed(CounterexampleReport {
            stage,
            scope,
            validated: true,
            scope_insufficient: stage == Stage::Unbounded,
            witnesses: decoded
                .witnesses
                .into_iter()
                .map(|(var, value)| Witness { var, value })
                .collect(),
            instance: decoded.instance.to_json(self.model),
        })
    }

    fn finish(mut self, verdict: Verdict, undecided: Option<Stage>, start: Instant) -> VerdictReport {
        self.report.verdict = verdict;
        self.report.undecided_stage = undecided;
        self.report.elapsed_ms = millis(start.elapsed());
        self.report
    }

    /// Stage one. Returns the verdict when it is final.
    fn bounded(&mut self) -> Result<Option<Verdict>, PipelineError> {
        let mut all_unsat = true;
        for &scope in &self.report.scopes.clone() {
            let assignment = ScopeAssignment::uniform(self.model, scope)?;
            let enc = encode_check(self.model, self.assertion, &assignment)?;
            let (out, file) = self.solve(Stage::Bounded, Some(scope), enc.script())?;
            match out.status {
                Status::Unsat => self.record(Stage::Bounded, Some(scope), &out, Outcome::NoCounterexample, file, None),
                Status::Sat => match self.confirm(Stage::Bounded, Some(scope), &out, &enc.metadata()) {
                    SatResult::Confirmed(ce) => {
                        self.record(Stage::Bounded, Some(scope), &out, Outcome::Counterexample, file, None);
                        self.report.counterexample = Some(ce);
                        return Ok(Some(Verdict::Counterexample));
                    }
                    SatResult::Rejected(outcome, why) => {
                        // A bounded model is exact, so a rejected one is an
                        // internal inconsistency: never report it as CE,
                        // and do not let later stages overrule it.
                        self.record(Stage::Bounded, Some(scope), &out, outcome, file, Some(why.clone()));
                        self.report
                            .notes
                            .push(format!("bounded model at scope {scope} failed validation: {why}"));
                        return Ok(Some(Verdict::Unknown));
                    }
                },
                Status::Timeout | Status::Unknown => {
                    let outcome = if out.status == Status::Timeout { Outcome::Timeout } else { Outcome::Unknown };
                    self.record(Stage::Bounded, Some(scope), &out, outcome, file, None);
                    // Larger scopes are at least as hard.
                    all_unsat = false;
                    break;
                }
                Status::Error => unreachable!("solver errors are returned by solve"),
            }
        }
        if all_unsat {
            self.report.bounded_verdict = Some(Verdict::BoundedValid);
        }
        Ok(match (self.cfg.mode, all_unsat) {
            (Mode::Bounded, true) => Some(Verdict::BoundedValid),
            (Mode::Bounded, false) => Some(Verdict::Unknown),
            (Mode::Full, _) => None,
        })
    }

    /// Stage two. Returns the verdict when it is final.
    fn unbounded(&mut self) -> Result<Option<Verdict>, PipelineError> {
        let enc = encode_unbounded(self.model, self.assertion)?;
        let (out, file) = self.solve(Stage::Unbounded, None, &enc.script)?;
        match out.status {
            Status::Unsat => {
                self.record(Stage::Unbounded, None, &out, Outcome::NoCounterexample, file, None);
                Ok(Some(Verdict::FullyValid))
            }
            Status::Sat if self.uses_int_quantifier() => {
                let why = "integer quantifiers range over all integers here, unlike in the evaluator";
                self.record(Stage::Unbounded, None, &out, Outcome::Unconfirmable, file, Some(why.into()));
                Ok(None)
            }
            Status::Sat => match self.confirm(Stage::Unbounded, None, &out, &enc.metadata) {
                SatResult::Confirmed(ce) => {
                    self.record(Stage::Unbounded, None, &out, Outcome::Counterexample, file, None);
                    self.report.counterexample = Some(ce);
                    Ok(Some(Verdict::Counterexample))
                }
                SatResult::Rejected(outcome, why) => {
                    if outcome == Outcome::Spurious && self.uses_closure() {
                        self.report.closure_overapproximated = true;
                    }
                    self.record(Stage::Unbounded, None, &out, outcome, file, Some(why));
                    Ok(None)
                }
            },
            Status::Timeout | Status::Unknown => {
                let outcome = if out.status == Status::Timeout { Outcome::Timeout } else { Outcome::Unknown };
                self.record(Stage::Unbounded, None, &out, outcome, file, None);
                Ok(None)
            }
            Status::Error => unreachable!("solver errors are returned by solve"),
        }
    }

    /// Stage three: the obligation is always produced (so export problems
    /// show up in the report) but only written when a directory is given.
    fn export(&mut self) {
        let start = Instant::now();
        let (outcome, file, detail) = match export_obligation(self.model, self.assertion, self.cfg.finite_ordering) {
            Err(e) => (Outcome::ExportFailed, None, Some(e.to_string())),
            Ok(ob) => match &self.cfg.export_dir {
                None => (Outcome::NotWritten, None, Some("no export directory given".to_string())),
                Some(dir) => match std::fs::create_dir_all(dir).and_then(|_| ob.write_to(dir)) {
                    Ok(path) => {
                        let p = path.display().to_string();
                        self.report.obligation = Some(p.clone());
                        (Outcome::Exported, Some(p), None)
                    }
                    Err(e) => (Outcome::ExportFailed, None, Some(e.to_string())),
                },
            },
        };
        self.report.stages.push(StageRecord {
            stage: Stage::Export,
            scope: None,
            status: None,
            outcome,
            elapsed_ms: millis(start.elapsed()),
            file,
            detail,
        });
    }

    fn relevant(&self) -> Vec<&crate::model::RelExpr> {
        let mut out: Vec<_> = self.model.facts.iter().map(|f| &f.body).collect();
        out.extend(self.model.templates.iter().map(|t| &t.body));
        out.extend(self.model.assertion(self.assertion).map(|a| &a.body));
        out
    }

    fn uses_closure(&self) -> bool {
        self.relevant().iter().any(|e| e.contains_closure()) || self.model.fields.iter().any(|f| f.typing.contains_closure())
    }

    fn uses_int_quantifier(&self) -> bool {
        self.relevant().iter().any(|e| e.contains_int_quantifier())
    }
}

/// Runs the staged check of `assertion`.
pub fn run_pipeline(model: &Model, assertion: &str, cfg: &PipelineConfig) -> Result<VerdictReport, PipelineError> {
    let start = Instant::now();
    if model.assertion(assertion).is_none() {
        return Err(PipelineError::UnknownAssertion(assertion.to_string()));
    }
    let mut scopes = cfg.scopes.clone();
    scopes.sort_unstable();
    scopes.dedup();
    if scopes.is_empty() {
        return Err(PipelineError::NoScopes);
    }
    let mut run = Run {
        model,
        assertion,
        cfg,
        report: VerdictReport {
            assertion: assertion.to_string(),
            mode: cfg.mode,
            verdict: Verdict::Unknown,
            undecided_stage: None,
            bounded_verdict: None,
            scopes,
            stages: Vec::new(),
            counterexample: None,
            obligation: None,
            closure_overapproximated: false,
            notes: Vec::new(),
            elapsed_ms: 0,
        },
    };
    if let Some(v) = run.bounded()? {
        let undecided = (v == Verdict::Unknown).then_some(Stage::Bounded);
        return Ok(run.finish(v, undecided, start));
    }
    if let Some(v) = run.unbounded()? {
        return Ok(run.finish(v, None, start));
    }
    run.export();
    Ok(run.finish(Verdict::Unknown, Some(Stage::Unbounded), start))
}
