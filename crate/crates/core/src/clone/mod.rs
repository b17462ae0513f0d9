//! Abstract clones: graded sets with projections and superposition.
//!
//! Every clone answers carrier queries only up to an arity cap, and
//! term-backed clones additionally cut their levels at a size bound, so no
//! operation enumerates an infinite level.

mod axioms;
mod end;
mod explicit;
mod hom;
mod kernel;
mod product;
mod semantics;
mod terms;

use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::logic::LogicError;
use crate::term::TermError;

pub use axioms::{check_clone_axioms, AxiomReport, Law, Violation};
pub use end::{end_clone, EndClone, GradedHomSet};
pub use explicit::{generated_subclone, ExplicitClone};
pub use hom::{
    clone_model_of_algebra, extend_to_clone_hom, factor_through_quotient, factorization_mismatches,
    hom_violations, is_clone_hom, is_model_hom, quotient_map, CloneHom, CloneModel,
};
pub use kernel::{kernel_presentation, ArityCheck, KernelPresentation};
pub use product::{product_embedding, Embedding, InjectivityReport, ProductClone};
pub use semantics::{
    clone_semantic_consequence, clone_semantic_consequence_in, Certificate, CertificateSource,
    CloneVerdict,
};
pub use terms::{free_term_clone, quotient_clone, quotient_clone_in, FreeTermClone, QuotientClone};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CloneError {
    #[error("arity {arity} exceeds the arity cap {cap}")]
    ArityCapExceeded { arity: usize, cap: usize },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("not an element of the clone: {0}")]
    NotAnElement(String),
    #[error("composition is not defined: {0}")]
    Undefined(String),
    #[error("a composite leaves the bounded universe")]
    UniverseEscape,
    #[error("level {arity} is too large to enumerate ({reason})")]
    TooLarge { arity: usize, reason: String },
    #[error("more than {budget} elements generated")]
    BudgetExceeded { budget: usize },
    #[error("axiom {axiom} is not collapsed by the homomorphism")]
    HypothesisViolated { axiom: usize },
    #[error("the algebra is not a model of the presentation")]
    NotAModel,
    #[error("malformed clone description, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A clone queried through its levels.
///
/// `compose(φ, θs, n)` is the superposition `φ ∘ (θ_1,…,θ_k)` of a `k`-ary
/// `φ` with `k` elements of arity `n`; `n` is explicit because `θs` may be
/// empty.
pub trait AbstractClone {
    type Elem: Clone + Eq + Hash + fmt::Debug;

    /// Highest arity whose level can be enumerated.
    fn arity_cap(&self) -> usize;

    fn arity(&self, e: &Self::Elem) -> usize;

    /// The elements of arity `n`, without duplicates.
    fn carrier(&self, n: usize) -> Result<Vec<Self::Elem>, CloneError>;

    /// `p^{(n)}_i`, 1-based.
    fn proj(&self, n: usize, i: usize) -> Result<Self::Elem, CloneError>;

    fn compose(
        &self,
        phi: &Self::Elem,
        thetas: &[Self::Elem],
        n: usize,
    ) -> Result<Self::Elem, CloneError>;

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a == b
    }

    /// Human-readable rendering for reports.
    fn describe(&self, e: &Self::Elem) -> String {
        format!("{e:?}")
    }
}

/// An element of a clone whose levels are numbered: the `index`-th element
/// of arity `arity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Indexed {
    pub arity: usize,
    pub index: usize,
}

impl Indexed {
    pub fn new(arity: usize, index: usize) -> Self {
        Self { arity, index }
    }
}

impl fmt::Display for Indexed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}@{}", self.index, self.arity)
    }
}

pub(crate) fn check_arity<C: AbstractClone + ?Sized>(
    c: &C,
    phi: &C::Elem,
    thetas: &[C::Elem],
    n: usize,
) -> Result<(), CloneError> {
    if c.arity(phi) != thetas.len() {
        return Err(CloneError::ArityMismatch(format!(
            "{} has arity {} but {} argument(s) were given",
            c.describe(phi),
            c.arity(phi),
            thetas.len()
        )));
    }
    if let Some(t) = thetas.iter().find(|t| c.arity(t) != n) {
        return Err(CloneError::ArityMismatch(format!(
            "{} does not have arity {n}",
            c.describe(t)
        )));
    }
    Ok(())
}

pub(crate) fn check_proj(n: usize, i: usize) -> Result<(), CloneError> {
    if i == 0 || i > n {
        return Err(CloneError::ArityMismatch(format!(
            "projection p({n},{i}) does not exist"
        )));
    }
    Ok(())
}
