//! Message Definition Language: terms, text syntax, and grounding.

mod ground;
mod syntax;
mod term;

pub use ground::{eval_guards, ground, splice, GroundError, Substitution};
pub use syntax::{parse_bool_expr, parse_seniority, parse_term, render_term, SyntaxError};
pub use term::{is_identifier, BoolExpr, Collection, Element, FreeVars, Kind, Label, Term};

/// All term and Boolean variables of `t`, including tails and guards.
pub fn free_vars(t: &Term) -> FreeVars {
    t.free_vars()
}
