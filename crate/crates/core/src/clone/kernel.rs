use std::collections::HashMap;
use std::sync::Arc;

use crate::clone::{
    extend_to_clone_hom, free_term_clone, quotient_clone, AbstractClone, CloneError, ExplicitClone,
};
use crate::limits::Limits;
use crate::term::{enum_terms, Equation, Presentation};

/// How the quotient of the kernel presentation matches one level of the
/// source clone under `[t] ↦ ε(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArityCheck {
    pub arity: usize,
    pub classes: usize,
    pub elements: usize,
    /// Every class has a single image.
    pub sound: bool,
    pub injective: bool,
    pub surjective: bool,
    /// The quotient level is closed.
    pub complete: bool,
}

impl ArityCheck {
    pub fn passed(&self) -> bool {
        self.sound && self.injective && self.surjective
    }
}

/// `⟨S | E_S⟩` with the check that its quotient clone reproduces `S`.
#[derive(Debug, Clone)]
pub struct KernelPresentation {
    pub presentation: Presentation,
    pub checks: Vec<ArityCheck>,
}

impl KernelPresentation {
    pub fn reproduces(&self) -> bool {
        self.checks.iter().all(ArityCheck::passed)
    }
}

/// The kernel of `ε_S: T(S) -> S`, the extension of the identity on the
/// elements of `s` viewed as symbols. The axioms identify each term of size
/// at most `size_budget` with the least term of the same image, which spans
/// the kernel on that slice.
pub fn kernel_presentation(
    s: &ExplicitClone,
    size_budget: usize,
) -> Result<KernelPresentation, CloneError> {
    let cap = s.arity_cap();
    let sig = s.signature()?;
    let f = sig
        .symbols()
        .iter()
        .map(|sym| {
            s.lookup(sym.arity(), sym.name())
                .ok_or_else(|| CloneError::NotAnElement(sym.name().to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let terms = Arc::new(free_term_clone(&sig, size_budget, cap));
    let eps = extend_to_clone_hom(terms, Arc::new(s.clone()), f)?;
    let mut axioms = Vec::new();
    for n in 0..=cap {
        let mut least = HashMap::new();
        for t in enum_terms(&sig, n, size_budget) {
            let img = eps.apply(&t)?;
            match least.get(&img) {
                Some(first) => axioms.push(Equation::new(t, Clone::clone(first))?),
                None => {
                    least.insert(img, t);
                }
            }
        }
    }
    let presentation = Presentation::new("Kernel", sig, axioms)?;
    let limits = Limits {
        max_term_size: size_budget,
        arity_cap: cap,
        ..Limits::default()
    };
    let q = quotient_clone(&presentation, &limits)?;
    let mut checks = Vec::new();
    for n in 0..=cap {
        let level = q.level(n)?;
        let mut images = Vec::with_capacity(level.class_count());
        let mut sound = true;
        for c in 0..level.class_count() {
            let members = level.class_members(c);
            let img = eps.apply(&members[0])?;
            for t in &members[1..] {
                sound &= eps.apply(t)? == img;
            }
            images.push(img);
        }
        let elements = s.carrier(n)?;
        let mut distinct = images.clone();
        distinct.sort();
        distinct.dedup();
        checks.push(ArityCheck {
            arity: n,
            classes: images.len(),
            elements: elements.len(),
            sound,
            injective: distinct.len() == images.len(),
            surjective: elements.iter().all(|e| images.contains(e)),
            complete: level.is_complete(),
        });
    }
    Ok(KernelPresentation {
        presentation,
        checks,
    })
}
