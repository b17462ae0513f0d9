//! Equational logic: proofs, bounded proof search and free models.

mod bounded;
pub(crate) mod engine;
mod free;
pub mod proof;

pub use bounded::{prove_bounded, Prover};
pub use free::{
    completeness_witness, eval_in_free_model, free_model, free_model_in, saturate_theorems,
    FreeModel, TheoremSet,
};
pub use proof::{check_proof, parse_script, random_proof, Proof, ProofError, ProofPath, Rule};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("the universe of context {context} up to size {size} exceeds {cap} terms")]
    UniverseTooLarge {
        context: usize,
        size: usize,
        cap: usize,
    },
    #[error("the free model is not complete within the limits")]
    IncompleteFreeModel,
    #[error("evaluation leaves the bounded universe")]
    UniverseEscape,
    #[error("{0}")]
    Invalid(String),
}
