use std::fmt;

use crate::algebra::{
    first_violation, is_model, semantic_consequence_bounded, Consequence, FiniteAlgebra,
};
use crate::clone::CloneError;
use crate::fixtures;
use crate::limits::Limits;
use crate::logic::{free_model_in, Proof, Prover};
use crate::term::{Equation, Presentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateSource {
    /// A stock or user-supplied model.
    Fixture,
    /// Found by enumerating small models.
    Enumerated,
    /// The complete bounded free model on the equation's variables.
    FreeModel,
}

impl fmt::Display for CertificateSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateSource::Fixture => "fixture",
            CertificateSource::Enumerated => "enumerated",
            CertificateSource::FreeModel => "free-model",
        })
    }
}

/// A model of the presentation and an assignment of the variables where the
/// two sides differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub source: CertificateSource,
    pub algebra: FiniteAlgebra,
    pub assignment: Vec<usize>,
}

impl Certificate {
    /// Re-checks the certificate from scratch.
    pub fn replay(&self, pres: &Presentation, eq: &Equation) -> bool {
        let n = eq.context();
        if self.assignment.len() != n || self.assignment.iter().any(|&a| a >= self.algebra.size()) {
            return false;
        }
        if !matches!(is_model(&self.algebra, pres), Ok(true))
            || eq.check_over(self.algebra.signature()).is_err()
        {
            return false;
        }
        self.algebra.eval(eq.lhs().expr(), &self.assignment)
            != self.algebra.eval(eq.rhs().expr(), &self.assignment)
    }
}

/// Whether both sides of an equation fall in one class of the quotient
/// clone.
#[derive(Debug, Clone)]
pub enum CloneVerdict {
    /// Same class, with a checked derivation.
    Equal(Proof),
    /// Different classes, certified by a model that tells them apart.
    Separated(Certificate),
    /// No derivation and no separating model within the limits.
    Unknown,
}

impl CloneVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            CloneVerdict::Equal(_) => "Equal",
            CloneVerdict::Separated(_) => "Separated",
            CloneVerdict::Unknown => "Unknown",
        }
    }
}

/// Decides `T^⟨Σ|E⟩ ⊨ t ≈_n s` at the canonical model `q ∘ η`: `Equal` when
/// the sides are provably equal, `Separated` only with a certificate (stock
/// fixtures, then `fixtures`, then enumerated models, then a complete free
/// model), `Unknown` otherwise.
pub fn clone_semantic_consequence(
    pres: &Presentation,
    eq: &Equation,
    limits: &Limits,
    fixtures: &[FiniteAlgebra],
) -> Result<CloneVerdict, CloneError> {
    clone_semantic_consequence_in(&mut Prover::new(pres.clone(), *limits), eq, fixtures)
}

/// [`clone_semantic_consequence`] sharing saturated contexts with `prover`.
pub fn clone_semantic_consequence_in(
    prover: &mut Prover,
    eq: &Equation,
    extra: &[FiniteAlgebra],
) -> Result<CloneVerdict, CloneError> {
    let pres = prover.presentation().clone();
    eq.check_over(pres.signature())?;
    if let Some(p) = prover.prove(eq) {
        return Ok(CloneVerdict::Equal(p));
    }
    let stock = [
        fixtures::z2(),
        fixtures::z3(),
        fixtures::s3(),
        fixtures::semilattice_two(),
        fixtures::semilattice_chain3(),
    ];
    for alg in stock.iter().chain(extra) {
        if alg.signature() != pres.signature() || !is_model(alg, &pres)? {
            continue;
        }
        if let Some(assignment) = first_violation(alg, eq)? {
            return Ok(CloneVerdict::Separated(Certificate {
                source: CertificateSource::Fixture,
                algebra: alg.clone(),
                assignment,
            }));
        }
    }
    if let Consequence::Countermodel(alg) =
        semantic_consequence_bounded(&pres, eq, prover.limits().max_model_size)?
    {
        let assignment = first_violation(&alg, eq)?.expect("a countermodel violates the equation");
        return Ok(CloneVerdict::Separated(Certificate {
            source: CertificateSource::Enumerated,
            algebra: alg,
            assignment,
        }));
    }
    let fm = free_model_in(prover, eq.context())?;
    if let Some(alg) = fm.algebra() {
        let assignment: Vec<usize> = (1..=eq.context()).map(|i| fm.generator_class(i)).collect();
        if let (Some(l), Some(r)) = (fm.class_of_term(eq.lhs()), fm.class_of_term(eq.rhs())) {
            if l != r {
                return Ok(CloneVerdict::Separated(Certificate {
                    source: CertificateSource::FreeModel,
                    algebra: alg.clone(),
                    assignment,
                }));
            }
        }
    }
    Ok(CloneVerdict::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(pres: &Presentation, s: &str) -> Equation {
        Equation::parse(pres.signature(), s).unwrap()
    }

    #[test]
    fn group_verdicts() {
        let pres = fixtures::group_presentation();
        let limits = Limits::default();
        let mut prover = Prover::new(pres.clone(), limits);
        let v =
            clone_semantic_consequence_in(&mut prover, &eq(&pres, "m(e,x1) = x1 @1"), &[]).unwrap();
        assert!(matches!(v, CloneVerdict::Equal(_)));
        let comm = eq(&pres, "m(x1,x2) = m(x2,x1) @2");
        match clone_semantic_consequence_in(&mut prover, &comm, &[]).unwrap() {
            CloneVerdict::Separated(c) => {
                assert_eq!(c.source, CertificateSource::Fixture);
                assert_eq!(c.algebra.name(), "s3");
                assert!(c.replay(&pres, &comm));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semilattice_generators_are_separated() {
        let pres = fixtures::semilattice_presentation();
        let e = eq(&pres, "x1 = x2 @2");
        match clone_semantic_consequence(&pres, &e, &Limits::default(), &[]).unwrap() {
            CloneVerdict::Separated(c) => assert!(c.replay(&pres, &e)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_model_certificates() {
        // No stock fixture has this signature and model search is off, so
        // only the free model can separate.
        let sig = crate::term::Signature::from_symbols([("f", 1)]).unwrap();
        let pres = Presentation::from_text("Inv", sig, &["f(f(x1)) = x1 @1"]).unwrap();
        let limits = Limits {
            max_model_size: 0,
            ..Limits::default().with_term_size(5)
        };
        let e = eq(&pres, "f(x1) = x1 @1");
        match clone_semantic_consequence(&pres, &e, &limits, &[]).unwrap() {
            CloneVerdict::Separated(c) => {
                assert_eq!(c.source, CertificateSource::FreeModel);
                assert!(c.replay(&pres, &e));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_without_certificates() {
        let sig = crate::term::Signature::from_symbols([("f", 1)]).unwrap();
        let pres = Presentation::new("Free", sig, vec![]).unwrap();
        let limits = Limits {
            max_model_size: 0,
            ..Limits::default().with_term_size(3)
        };
        let e = eq(&pres, "f(x1) = x1 @1");
        assert!(matches!(
            clone_semantic_consequence(&pres, &e, &limits, &[]).unwrap(),
            CloneVerdict::Unknown
        ));
    }
}
