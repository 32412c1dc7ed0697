//! Brute-force semantics over finite instances: the independent oracle
//! used to validate counterexamples and to cross-check the backends.

mod enumerate;
mod instance;
mod json;
mod semantics;

pub use enumerate::{
    enumerate_check, enumerate_check_with, enumerate_instances, find_counterexample, size_combinations, EnumConfig,
    EnumError, MAX_ORACLE_ATOMS,
};
pub use instance::{Atom, Instance, IntSemantics, Tuple, TupleSet};
pub use json::{InstanceError, InstanceJson, IntsJson};
pub use semantics::{
    closure, eval, holds, join, product, satisfies_constraints, validate_counterexample, Env, Value,
};
