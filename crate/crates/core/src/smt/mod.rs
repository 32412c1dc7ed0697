//! SMT-LIB scripts, the solver driver and model decoding.

mod model;
mod reader;
mod script;
mod sexpr;
mod solver;
mod term;

pub use model::{parse_model, DecodeError, FunDef, MValue, RawModel};
pub use reader::{parse_script, read_bv_literal, read_sort, read_term};
pub use script::{serialize, Item, Logic, SmtScript};
pub use sexpr::{parse_sexps, parse_toplevel, SExp, TopLevel};
pub use solver::{run_solver, run_solver_text, SolverCmd, SolverError, SolverOutcome, Status, DEFAULT_SOLVER, SOLVER_ENV};
pub use term::{
    and, app, bv, eq, exists, forall, iff, implies, is_simple_symbol, ite, not, or, render_symbol, sym, write_term,
    Sort, Term,
};
