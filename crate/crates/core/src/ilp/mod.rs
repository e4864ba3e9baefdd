//! The linearized integer program, its LP-format serialization, an exact
//! branch-and-bound solver and a brute-force oracle.

mod bnb;
mod lp;
mod model;
mod oracle;

pub use bnb::{solve_exact, SolveLimits, SolveResult, SolveStatus, TieBreak};
pub use lp::{export_lp, parse_lp};
pub use model::{
    build_model, build_model_with, indicator_gadget, product_gadget, xor_gadget, Constraint, Family, IlpModel, Sense,
    VarKind, Variable,
};
pub use oracle::{brute_force_oracle, ORACLE_LIMIT};
