//! Verdict reports (see `docs/report-schema.md`).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::eval::InstanceJson;

/// Final answer of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Bounded-valid: no counterexample within the checked scopes.
    #[serde(rename = "BV")]
    BoundedValid,
    /// Fully valid: the assertion holds in every finite or infinite instance.
    #[serde(rename = "FV")]
    FullyValid,
    /// A counterexample was found and confirmed by the evaluator.
    #[serde(rename = "CE")]
    Counterexample,
    /// Undecided within the resources given.
    #[serde(rename = "UK")]
    Unknown,
}

impl Verdict {
    pub fn code(self) -> &'static str {
        match self {
            Verdict::BoundedValid => "BV",
            Verdict::FullyValid => "FV",
            Verdict::Counterexample => "CE",
            Verdict::Unknown => "UK",
        }
    }

    /// Process exit status for the verdict.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::BoundedValid | Verdict::FullyValid => 0,
            Verdict::Counterexample => 1,
            Verdict::Unknown => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Bounded checks only.
    Bounded,
    /// Bounded checks, then the unbounded check, then obligation export.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Bounded,
    Unbounded,
    Export,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Bounded => "bounded",
            Stage::Unbounded => "unbounded",
            Stage::Export => "export",
        }
    }
}

/// What a stage run concluded from the solver's answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// unsat: no counterexample in this stage.
    NoCounterexample,
    /// sat, decoded and confirmed by the evaluator.
    Counterexample,
    /// sat, but the decoded instance is not a counterexample.
    Spurious,
    /// sat, but the model could not be decoded.
    DecodeFailed,
    /// sat in the presence of integer quantifiers, whose range the
    /// evaluator cannot reproduce.
    Unconfirmable,
    Timeout,
    /// The solver answered unknown.
    Unknown,
    /// The solver rejected the script or crashed.
    SolverError,
    /// The obligation was written.
    Exported,
    /// The obligation could not be produced.
    ExportFailed,
    /// The obligation was produced but not written (no export directory).
    NotWritten,
}

/// One solver run or export step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    /// Uniform scope of a bounded run.
    pub scope: Option<u32>,
    /// Solver status (`sat`, `unsat`, `unknown`, `timeout`, `error`);
    /// absent for the export stage.
    pub status: Option<String>,
    pub outcome: Outcome,
    pub elapsed_ms: u64,
    /// Kept SMT script or written obligation.
    pub file: Option<String>,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub stage: Stage,
    pub scope: Option<u32>,
    /// Always true in a CE verdict: the evaluator confirmed the instance
    /// satisfies every constraint and violates the assertion.
    pub validated: bool,
    /// The counterexample came from the unbounded stage, i.e. the bounded
    /// scopes were too small (or undecided) to exhibit it.
    pub scope_insufficient: bool,
    /// Values of the assertion's outermost universally quantified variables.
    pub witnesses: Vec<Witness>,
    pub instance: InstanceJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub var: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub assertion: String,
    pub mode: Mode,
    pub verdict: Verdict,
    /// The stage that left the check undecided (UK verdicts only).
    pub undecided_stage: Option<Stage>,
    /// `BV` when every bounded scope was unsat, even if a later stage was
    /// undecided.
    pub bounded_verdict: Option<Verdict>,
    pub scopes: Vec<u32>,
    pub stages: Vec<StageRecord>,
    pub counterexample: Option<CounterexampleReport>,
    /// Path of the exported obligation.
    pub obligation: Option<String>,
    /// True when an unbounded model was rejected by the evaluator and the
    /// model uses transitive closure, which the unbounded encoding only
    /// over-approximates.
    pub closure_overapproximated: bool,
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl VerdictReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "assertion {}: {}", self.assertion, self.verdict.code());
        if let Some(st) = self.undecided_stage {
            let _ = writeln!(s, "  undecided at stage: {}", st.as_str());
        }
        if let Some(b) = self.bounded_verdict {
            if b != self.verdict {
                let _ = writeln!(s, "  bounded stage: {}", b.code());
            }
        }
        for r in &self.stages {
            let scope = r.scope.map(|n| format!(" scope {n}")).unwrap_or_default();
            let status = r.status.as_deref().map(|x| format!(" {x}")).unwrap_or_default();
            let _ = write!(
                s,
                "  {}{}:{} -> {} ({} ms)",
                r.stage.as_str(),
                scope,
                status,
                serde_json::to_value(&r.outcome).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                r.elapsed_ms
            );
            if let Some(f) = &r.file {
                let _ = write!(s, " [{f}]");
            }
            if let Some(d) = &r.detail {
                let _ = write!(s, " {d}");
            }
            s.push('\n');
        }
        if let Some(ce) = &self.counterexample {
            let _ = writeln!(
                s,
                "  counterexample ({}{}{}):",
                ce.stage.as_str(),
                ce.scope.map(|n| format!(", scope {n}")).unwrap_or_default(),
                if ce.scope_insufficient { ", beyond the bounded scopes" } else { "" }
            );
            for w in &ce.witnesses {
                let _ = writeln!(s, "    {} = {}", w.var, w.value);
            }
            for (sig, atoms) in &ce.instance.sigs {
                let _ = writeln!(s, "    {sig} = {{{}}}", atoms.join(", "));
            }
            for (field, tuples) in &ce.instance.fields {
                let ts: Vec<String> = tuples.iter().map(|t| t.join("->")).collect();
                let _ = writeln!(s, "    {field} = {{{}}}", ts.join(", "));
            }
        }
        if let Some(p) = &self.obligation {
            let _ = writeln!(s, "  obligation: {p}");
        }
        if self.closure_overapproximated {
            let _ = writeln!(s, "  note: the unbounded model was spurious (closure over-approximation)");
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }
}
