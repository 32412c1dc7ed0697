//! Bounded translation to quantified bitvector formulas.
//!
//! Every top-level signature becomes a bitvector sort just wide enough for
//! its scope; subsignatures and fields become boolean functions over those
//! sorts. The resulting problem is decidable, and its models are
//! counterexamples within the scope.

use std::collections::BTreeMap;

use crate::model::{Model, RelExpr, SigId};
use crate::smt::{SmtScript, Term};

use super::encoder::{Backend, Encoder, Env, Symbols};
use super::TranslateError;

/// The number of atoms of each top-level signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeAssignment {
    scopes: BTreeMap<SigId, u32>,
}

impl ScopeAssignment {
    /// The same scope for every top-level signature.
    pub fn uniform(model: &Model, scope: u32) -> Result<ScopeAssignment, TranslateError> {
        let scopes = model.top_levels().into_iter().map(|t| (t, scope)).collect();
        ScopeAssignment::new(model, scopes)
    }

    /// Per-signature scopes; every top-level signature needs one.
    pub fn new(model: &Model, scopes: BTreeMap<SigId, u32>) -> Result<ScopeAssignment, TranslateError> {
        for t in model.top_levels() {
            match scopes.get(&t) {
                None => return Err(TranslateError::Scope(format!("no scope for `{}`", model.sigs[t].name))),
                Some(0) => return Err(TranslateError::Scope(format!("scope of `{}` must be positive", model.sigs[t].name))),
                Some(&s) if s > 1 << 20 => {
                    return Err(TranslateError::Scope(format!("scope {s} of `{}` is too large", model.sigs[t].name)))
                }
                Some(_) => {}
            }
        }
        if let Some(s) = scopes.keys().find(|&&s| !model.sigs.get(s).is_some_and(|x| x.is_top_level())) {
            return Err(TranslateError::Scope(format!("signature #{s} is not top-level")));
        }
        Ok(ScopeAssignment { scopes })
    }

    pub fn scope(&self, top: SigId) -> u32 {
        self.scopes[&top]
    }

    pub fn scopes(&self) -> &BTreeMap<SigId, u32> {
        &self.scopes
    }

    /// Smallest width w with 2^w >= scope, at least 1.
    pub fn bitwidth(&self, top: SigId) -> u32 {
        let s = self.scope(top);
        let mut w = 1;
        while (1u64 << w) < s as u64 {
            w += 1;
        }
        w
    }

    /// True if the scope fills its bitvector sort exactly.
    pub fn is_exact(&self, top: SigId) -> bool {
        self.scope(top) as u64 == 1u64 << self.bitwidth(top)
    }

    /// The largest scope of any signature.
    pub fn max_scope(&self) -> u32 {
        self.scopes.values().copied().max().unwrap_or(0)
    }
}

/// A bounded encoding: the script built so far and the role of each
/// symbol in it.
pub struct BoundedEncoding {
    enc: Encoder,
    pub scope: ScopeAssignment,
}

impl BoundedEncoding {
    pub fn script(&self) -> &SmtScript {
        &self.enc.script
    }

    pub fn into_script(self) -> SmtScript {
        self.enc.script
    }

    pub fn symbols(&self) -> &Symbols {
        &self.enc.symbols
    }

    /// Width of integer terms.
    pub fn int_width(&self) -> u32 {
        self.enc.int_width
    }

    pub fn metadata(&self) -> EncodingMetadata {
        EncodingMetadata {
            symbols: self.enc.symbols.clone(),
            scope: Some(self.scope.clone()),
            int_width: self.enc.int_width,
        }
    }
}

/// What a decoder needs to know about an encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingMetadata {
    pub symbols: Symbols,
    /// The scope for bounded encodings; `None` for unbounded ones.
    pub scope: Option<ScopeAssignment>,
    pub int_width: u32,
}

/// Declarations and implicit axioms of a model at a scope: memberships,
/// hierarchy, fields with typing and multiplicity axioms.
pub fn encode_declarations(model: &Model, scope: &ScopeAssignment) -> BoundedEncoding {
    let mut enc = Encoder::new(model, Backend::Bounded(scope.clone()));
    enc.declare_model(model);
    BoundedEncoding {
        enc,
        scope: scope.clone(),
    }
}

/// Encodes a closed formula as a boolean term. Closure symbols it needs
/// are added to the encoding's script.
pub fn encode_formula(model: &Model, expr: &RelExpr, encoding: &mut BoundedEncoding) -> Result<Term, TranslateError> {
    let expr = crate::model::expand_calls(model, expr);
    encoding.enc.formula(model, &expr, &Env::new())
}

/// The complete bounded check of an assertion: declarations, facts and the
/// negated assertion. The script is satisfiable iff a counterexample
/// exists within the scope.
pub fn encode_check(model: &Model, assertion: &str, scope: &ScopeAssignment) -> Result<BoundedEncoding, TranslateError> {
    let goal = model
        .assertion(assertion)
        .ok_or_else(|| TranslateError::UnknownAssertion(assertion.to_string()))?
        .body
        .clone();
    let mut e = encode_declarations(model, scope);
    e.enc.assert_facts(model)?;
    e.enc.script.comment(format!("negated assertion {assertion}"));
    e.enc.assert_negation(model, &goal)?;
    e.enc.script.finish();
    Ok(e)
}
