//! Translation of models to SMT scripts, and of solver models back to
//! instances.

mod bounded;
mod decode;
mod encoder;
mod unbounded;

use thiserror::Error;

use crate::model::ModelError;

pub use bounded::{encode_check, encode_declarations, encode_formula, BoundedEncoding, EncodingMetadata, ScopeAssignment};
pub use decode::{decode_instance, Decoded};
pub use encoder::{Symbols, Witness};
pub use unbounded::{encode_unbounded, UnboundedEncoding};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TranslateError {
    #[error("unknown assertion `{0}`")]
    UnknownAssertion(String),
    #[error("invalid scope: {0}")]
    Scope(String),
    #[error("unsupported expression: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(ModelError),
}
