//! Unbounded translation over free sorts and linear integer arithmetic.
//!
//! The declarations mirror the bounded encoding, but top-level signatures
//! are uninterpreted sorts of unknown size. Transitive closure is only
//! over-approximated (no minimality axiom), so an unsatisfiable script is a
//! proof for every scope while a model may be spurious.

use crate::model::Model;
use crate::smt::SmtScript;

use super::bounded::EncodingMetadata;
use super::encoder::{Backend, Encoder};
use super::TranslateError;

/// An unbounded check script with its decoding metadata.
pub struct UnboundedEncoding {
    pub script: SmtScript,
    pub metadata: EncodingMetadata,
}

pub fn encode_unbounded(model: &Model, assertion: &str) -> Result<UnboundedEncoding, TranslateError> {
    let goal = model
        .assertion(assertion)
        .ok_or_else(|| TranslateError::UnknownAssertion(assertion.to_string()))?
        .body
        .clone();
    let mut enc = Encoder::new(model, Backend::Unbounded);
    enc.declare_model(model);
    enc.assert_facts(model)?;
    enc.script.comment(format!("negated assertion {assertion}"));
    enc.assert_negation(model, &goal)?;
    enc.script.finish();
    Ok(UnboundedEncoding {
        metadata: EncodingMetadata {
            symbols: enc.symbols.clone(),
            scope: None,
            int_width: 0,
        },
        script: enc.script,
    })
}
