//! A dual-mode verifier for a core relational specification language.

pub mod eval;
pub mod fol;
pub mod model;
pub mod pipeline;
pub mod smt;
pub mod syntax;
pub mod translate;
