use crate::clone::{check_arity, check_proj, AbstractClone, CloneError, Indexed};
use crate::limits::Limits;
use crate::logic::{free_model_in, FreeModel, LogicError, Prover};
use crate::term::{enum_terms, Presentation, Signature, Term};

/// `T(Σ)`: terms under substitution. Level `n` is cut at `size_bound` nodes
/// for enumeration; composites may be larger.
#[derive(Debug, Clone)]
pub struct FreeTermClone {
    sig: Signature,
    size_bound: usize,
    cap: usize,
}

pub fn free_term_clone(sig: &Signature, size_bound: usize, arity_cap: usize) -> FreeTermClone {
    FreeTermClone {
        sig: sig.clone(),
        size_bound,
        cap: arity_cap,
    }
}

impl FreeTermClone {
    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size_bound(&self) -> usize {
        self.size_bound
    }

    /// `η(σ) = σ(x1,…,xk)`.
    pub fn eta(&self, s: usize) -> Term {
        Term::generic(&self.sig.symbols()[s])
    }
}

impl AbstractClone for FreeTermClone {
    type Elem = Term;

    fn arity_cap(&self) -> usize {
        self.cap
    }

    fn arity(&self, t: &Term) -> usize {
        t.context()
    }

    fn carrier(&self, n: usize) -> Result<Vec<Term>, CloneError> {
        if n > self.cap {
            return Err(CloneError::ArityCapExceeded {
                arity: n,
                cap: self.cap,
            });
        }
        Ok(enum_terms(&self.sig, n, self.size_bound))
    }

    fn proj(&self, n: usize, i: usize) -> Result<Term, CloneError> {
        check_proj(n, i)?;
        Ok(Term::var(n, i)?)
    }

    fn compose(&self, phi: &Term, thetas: &[Term], n: usize) -> Result<Term, CloneError> {
        check_arity(self, phi, thetas, n)?;
        Ok(phi.subst_at(n, thetas)?)
    }

    fn describe(&self, t: &Term) -> String {
        format!("{t}@{}", t.context())
    }
}

/// `T^⟨Σ|E⟩`: terms modulo the theorems found within the limits. Level `n`
/// is the partition of the bounded free model on `n` generators; elements
/// are class numbers, ordered by representative.
pub struct QuotientClone {
    pres: Presentation,
    limits: Limits,
    levels: Vec<FreeModel>,
}

/// Builds levels `0..=limits.arity_cap`.
pub fn quotient_clone(pres: &Presentation, limits: &Limits) -> Result<QuotientClone, LogicError> {
    quotient_clone_in(&mut Prover::new(pres.clone(), *limits))
}

/// [`quotient_clone`] reusing the contexts already saturated by `prover`.
pub fn quotient_clone_in(prover: &mut Prover) -> Result<QuotientClone, LogicError> {
    let limits = *prover.limits();
    let levels = (0..=limits.arity_cap)
        .map(|n| free_model_in(prover, n))
        .collect::<Result<_, _>>()?;
    Ok(QuotientClone {
        pres: prover.presentation().clone(),
        limits,
        levels,
    })
}

impl QuotientClone {
    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn level(&self, n: usize) -> Result<&FreeModel, CloneError> {
        self.levels.get(n).ok_or(CloneError::ArityCapExceeded {
            arity: n,
            cap: self.limits.arity_cap,
        })
    }

    /// Whether level `n` is closed, so that composites into it never escape.
    pub fn is_complete(&self, n: usize) -> bool {
        self.levels.get(n).is_some_and(FreeModel::is_complete)
    }

    pub fn carrier_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(FreeModel::class_count).collect()
    }

    /// The quotient map `q`: the class of a term.
    pub fn class_of(&self, t: &Term) -> Result<Indexed, CloneError> {
        let fm = self.level(t.context())?;
        let c = fm.class_of_term(t).ok_or(CloneError::UniverseEscape)?;
        Ok(Indexed::new(t.context(), c))
    }

    pub fn representative(&self, e: &Indexed) -> Result<Term, CloneError> {
        let fm = self.level(e.arity)?;
        if e.index >= fm.class_count() {
            return Err(CloneError::NotAnElement(e.to_string()));
        }
        Ok(fm.representative(e.index))
    }
}

impl AbstractClone for QuotientClone {
    type Elem = Indexed;

    fn arity_cap(&self) -> usize {
        self.limits.arity_cap
    }

    fn arity(&self, e: &Indexed) -> usize {
        e.arity
    }

    fn carrier(&self, n: usize) -> Result<Vec<Indexed>, CloneError> {
        let fm = self.level(n)?;
        Ok((0..fm.class_count()).map(|c| Indexed::new(n, c)).collect())
    }

    fn proj(&self, n: usize, i: usize) -> Result<Indexed, CloneError> {
        check_proj(n, i)?;
        Ok(Indexed::new(n, self.level(n)?.generator_class(i)))
    }

    fn compose(&self, phi: &Indexed, thetas: &[Indexed], n: usize) -> Result<Indexed, CloneError> {
        check_arity(self, phi, thetas, n)?;
        let ts = thetas
            .iter()
            .map(|t| self.representative(t))
            .collect::<Result<Vec<_>, _>>()?;
        let t = self.representative(phi)?.subst_at(n, &ts)?;
        self.class_of(&t)
    }

    fn describe(&self, e: &Indexed) -> String {
        match self.representative(e) {
            Ok(t) => format!("[{t}]@{}", e.arity),
            Err(_) => e.to_string(),
        }
    }
}
