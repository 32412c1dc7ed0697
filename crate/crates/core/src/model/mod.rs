//! Name resolution, typing and the typed [`Model`] shared by every backend.

mod template;
mod typecheck;
mod types;

use thiserror::Error;

use crate::syntax::Span;

pub(crate) use template::map_children;
pub use template::{alpha_eq, expand_calls, fresh_var, instantiate_template, substitute};
pub use typecheck::typecheck;
pub use types::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{span}: unresolved name `{name}`")]
    NameError { span: Span, name: String },
    #[error("{span}: arity error: {message}")]
    ArityError { span: Span, message: String },
    #[error("{span}: type error: {message}")]
    TypeError { span: Span, message: String },
    #[error("{span}: multiplicity error: {message}")]
    MultiplicityError { span: Span, message: String },
    #[error("{span}: unknown assertion `{name}`")]
    UnknownAssertion { span: Span, name: String },
    #[error("{span}: `{name}` is declared more than once")]
    Duplicate { span: Span, name: String },
    #[error("{span}: signature hierarchy through `{name}` is cyclic")]
    HierarchyCycle { span: Span, name: String },
    #[error("{span}: `{name}` is (mutually) recursive; recursion is not supported")]
    Recursion { span: Span, name: String },
    #[error("{span}: unsupported: {message}")]
    Unsupported { span: Span, message: String },
}
