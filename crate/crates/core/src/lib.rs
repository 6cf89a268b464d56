//! A workbench for coherent logic and the finite category theory around it.
//!
//! * [`logic`]: signatures, formulas, theories, the text format, Morleyization.
//! * [`semantics`]: finite Set-structures, interpretation, model enumeration.
//! * [`chase`]: a bounded forward-chaining prover with certificates.
//! * [`fincat`]: explicit finite categories, Set fragments, pullbacks,
//!   filtered colimits and coherent closure.
//! * [`canon`]: canonical languages and internal theories.
//! * [`syncat`]: the syntactic category of a theory.
//! * [`twocat`]: homotopy pullbacks and related 2-dimensional constructions.
//! * [`soa`]: a stage-bounded small object argument over theory presentations.

pub mod canon;
pub mod chase;
pub mod fincat;
pub mod logic;
pub mod semantics;
pub mod soa;
pub mod syncat;
pub mod twocat;
