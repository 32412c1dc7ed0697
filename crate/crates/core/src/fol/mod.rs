//! The typed relational first-order theory, proof obligation export, the
//! lemma rewriter and the closure induction rule.

mod export;
mod finite;
mod interp;
mod lemmas;
mod shape;
mod syntax;
mod tc_induct;
mod theory;

use thiserror::Error;

pub use export::{export_obligation, ConstRole, ModelConstant, Obligation, MAX_ARITY, ORD_BIJECTION};
pub use finite::{binary_relations_up_to_iso, check_tc_induct_finite, phi_grammar, validate_lemmas, LemmaCheck, TcInductReport};
pub use interp::{transitive_closure, FolInterp, InterpError, RelValue, Value, MAX_ENUMERATED_TUPLES};
pub use lemmas::{check_lemma_finite, rewrite_with_lemmas, shipped_lemmas, LemmaConclusion, LemmaRule, RewriteOutcome};
pub use shape::{check_structure, formula_shape, source_shape, Shape};
pub use syntax::*;
pub use tc_induct::{check_tc_induct_instance, subst_formula, ParamFormula, TcInductInstance};
pub use theory::{Axiom, OpInstance, RelTheory, SymbolDecl};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FolError {
    #[error("unknown assertion `{0}`")]
    UnknownAssertion(String),
    #[error("unsupported in the first-order export: {0}")]
    Unsupported(String),
    #[error("relations of arity {0} exceed the generated theory tiers")]
    UnsupportedArity(usize),
    #[error("invalid bound: {0}")]
    InvalidBound(String),
    #[error("arity error: {0}")]
    ArityError(String),
    #[error("ill-formed obligation: {0}")]
    NotWellFormed(String),
}
