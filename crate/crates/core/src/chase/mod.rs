//! Bounded forward chaining (the chase) for coherent theories.

mod compile;
mod engine;
mod factbase;
mod functional;
mod matcher;

use thiserror::Error;

pub use engine::{
    prove_sequent, prove_sequent_with, replay, saturate, saturate_with, CertNode, ChaseLimits, ProofOutcome, StepLabel,
};
pub use factbase::{BranchSummary, FactBase};
pub use functional::{
    find_countermodel, functionality_sequents, provably_functional, provably_functional_with, Functionality, Verdict,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChaseError {
    #[error("sequent is not coherent")]
    NotCoherent,
    #[error("ill-formed input: {0}")]
    IllFormed(String),
    #[error("disjunctive normal form too large")]
    TooLarge,
    #[error("contexts overlap: {0}")]
    ContextOverlap(String),
    #[error("chase budget exhausted")]
    Budget,
}
