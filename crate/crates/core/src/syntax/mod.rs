//! Lexing, parsing and pretty-printing of the surface language.
//!
//! The accepted grammar is a strict subset of Alloy 4: constructs outside the
//! subset are rejected with [`FrontendError::Unsupported`] instead of being
//! approximated.

pub mod ast;
pub mod lexer;
mod parser;
mod pretty;

use std::path::Path;

use thiserror::Error;

pub use ast::*;
pub use pretty::pretty_print;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontendError {
    #[error("{span}: syntax error: found `{found}`, expected {}", expected.join(" or "))]
    Syntax {
        span: Span,
        found: String,
        expected: Vec<String>,
    },
    #[error("{span}: unsupported construct `{construct}`: {reason}")]
    Unsupported {
        span: Span,
        construct: String,
        reason: String,
    },
    #[error("{span}: signature `{sig}` is ordered more than once")]
    DuplicateOrdering { span: Span, sig: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Parses source text into an untyped [`SourceSpec`].
pub fn parse(text: &str) -> Result<SourceSpec, FrontendError> {
    let tokens = lexer::tokenize(text)?;
    let decls = parser::Parser::new(tokens).parse_spec()?;
    let spec = SourceSpec {
        path: None,
        text: text.to_string(),
        decls,
    };
    check_single_ordering(&spec)?;
    Ok(spec)
}

/// Reads and parses a file, recording its path in the result.
pub fn parse_file(path: &Path) -> Result<SourceSpec, FrontendError> {
    let text = std::fs::read_to_string(path).map_err(|e| FrontendError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut spec = parse(&text)?;
    spec.path = Some(path.display().to_string());
    Ok(spec)
}

fn check_single_ordering(spec: &SourceSpec) -> Result<(), FrontendError> {
    let mut seen = std::collections::BTreeSet::new();
    for open in spec.opens() {
        if !seen.insert(open.sig.name.as_str()) {
            return Err(FrontendError::DuplicateOrdering {
                span: open.span,
                sig: open.sig.name.clone(),
            });
        }
    }
    Ok(())
}
