//! Finite Set-structures: interpretation of terms and first-order formulas,
//! sequent validity, homomorphisms and exhaustive enumeration.

mod enumerate;
mod interp;
mod structure;

pub use enumerate::{
    enumerate_homs, enumerate_models, enumerate_models_between, enumerate_models_sized, find_structure,
    for_each_structure, is_homomorphism, size_vectors, space_size, Homomorphism, DEFAULT_BUDGET,
};
pub use interp::{
    eval_term, first_failure, holds_sequent, interpret_formula, interpret_term, is_model, InterpretedSubset,
};
pub use structure::{tuples, FinStructure, FunctionTable};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("enumeration needs {needed} candidates, over the budget of {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("malformed structure: {0}")]
    Structure(String),
    #[error("structure JSON: {0}")]
    Json(String),
}
