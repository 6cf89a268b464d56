//! Many-sorted coherent and first-order logic: syntax, the theory text
//! format, well-formedness, substitution, alpha-normalization and
//! Morleyization.

mod morley;
mod parse;
mod print;
mod subst;
mod syntax;
mod wf;

pub use morley::{morleyize, Morleyization};
pub use parse::{parse_context, parse_formula, parse_sequent, parse_term, parse_theory, ParseError};
pub use print::theory_to_text;
pub use subst::{alpha_eq, fresh_name, normalize, rename_apart, substitute, Substitution};
pub use syntax::{Context, Formula, FunctionType, Sequent, Signature, Term, Theory};
pub use wf::{wf_check, wf_check_with, Diagnostic};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("variable {0} is not bound in the context")]
    UnboundVariable(String),
    #[error("undeclared symbol {0}")]
    UndeclaredSymbol(String),
    #[error("{symbol} expects {expected} arguments, got {found}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("sort mismatch at {at}: expected {expected}, found {found}")]
    SortMismatch { expected: String, found: String, at: String },
    #[error("ill-formed: {0}")]
    IllFormed(String),
    #[error("formula is not coherent")]
    NotCoherent,
    #[error(transparent)]
    Parse(#[from] ParseError),
}
