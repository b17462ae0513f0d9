//! Bounded saturation of one context, and proof search on top of it.

use std::collections::{HashMap, HashSet};

use crate::limits::Limits;
use crate::logic::engine::{Engine, Universe};
use crate::logic::proof::{check_proof, Proof};
use crate::logic::LogicError;
use crate::term::{Equation, Expr, Presentation};

/// Tuple lookups spent deciding whether the classes are closed under the
/// operations; beyond this the classes are reported as not closed.
const CLOSURE_CHECKS: u64 = 1 << 22;

/// A saturated context.
pub(crate) struct Closure {
    pub(crate) engine: Engine,
    pub(crate) rounds: usize,
    /// A complete round changed nothing and every operation applied to
    /// every tuple of classes has a class.
    pub(crate) closed: bool,
}

/// Builds the universe of context `n` (plus the subterms of `extra`) and
/// saturates it under the axioms and the `imported` lemmas.
///
/// Whenever a round leaves the partition unchanged, the reduced lemmas of the
/// current partition are added as further rules; this stops at `max_rounds`
/// rounds, when no new lemma appears, or once the classes are closed.
pub(crate) fn close_context(
    pres: &Presentation,
    n: usize,
    limits: &Limits,
    imported: &[(Equation, Proof)],
    extra: &[&Expr],
) -> Result<Closure, LogicError> {
    let u = Universe::build(
        pres.signature(),
        n,
        limits.max_term_size,
        extra,
        limits.max_universe,
    )
    .map_err(|_| LogicError::UniverseTooLarge {
        context: n,
        size: limits.max_term_size,
        cap: limits.max_universe,
    })?;
    let mut engine = Engine::new(u);
    let mut seen: HashSet<(Expr, Expr)> = HashSet::new();
    for (i, ax) in pres.axioms().iter().enumerate() {
        if seen.insert(rule_key(ax)) {
            engine.add_rule(ax, Proof::ax(pres, i).expect("axiom index in range"));
        }
    }
    for (eq, p) in imported {
        if seen.insert(rule_key(eq)) {
            engine.add_rule(eq, p.clone());
        }
    }
    let mut rounds = 0;
    let mut closed = false;
    while rounds < limits.max_rounds {
        let before = engine.class_count();
        let complete = engine.round();
        rounds += 1;
        if !complete || engine.class_count() != before {
            continue;
        }
        if engine.closed_under_operations(CLOSURE_CHECKS) {
            closed = true;
            break;
        }
        let mut fresh = 0;
        for (eq, p) in engine.reduced_lemmas() {
            if seen.insert(rule_key(&eq)) {
                engine.add_rule(&eq, p);
                fresh += 1;
            }
        }
        if fresh == 0 {
            break;
        }
    }
    Ok(Closure {
        engine,
        rounds,
        closed,
    })
}

/// Identifies rules that match the same instances: both sides with
/// variables renamed in order of first occurrence, in either orientation.
fn rule_key(eq: &Equation) -> (Expr, Expr) {
    fn rename(e: &Expr, map: &mut Vec<usize>) -> Expr {
        match e {
            Expr::Var(i) => {
                let j = map.iter().position(|v| v == i).unwrap_or_else(|| {
                    map.push(*i);
                    map.len() - 1
                });
                Expr::Var(j + 1)
            }
            Expr::App(_) => {
                let sym = e.symbol().expect("application").clone();
                Expr::app(sym, e.args().iter().map(|a| rename(a, map)).collect())
            }
        }
    }
    let orient = |l: &Expr, r: &Expr| {
        let mut map = Vec::new();
        let l = rename(l, &mut map);
        (l, rename(r, &mut map))
    };
    let (l, r) = (eq.lhs().expr(), eq.rhs().expr());
    orient(l, r).min(orient(r, l))
}

/// Bounded proof search for one presentation.
///
/// Contexts are saturated bottom-up: every context `1..n` exports its reduced
/// lemmas, which context `n` uses as extra rules (context 0 uses those of
/// context 1). Saturated contexts are
/// cached, so repeated queries are cheap. Answers depend only on the
/// presentation, the limits and the goal.
pub struct Prover {
    pres: Presentation,
    limits: Limits,
    /// Lemmas exported by each context, indexed by context.
    exported: Vec<Vec<(Equation, Proof)>>,
    closures: HashMap<usize, Result<Closure, LogicError>>,
}

impl Prover {
    pub fn new(pres: Presentation, limits: Limits) -> Prover {
        Prover {
            pres,
            limits,
            exported: vec![Vec::new()],
            closures: HashMap::new(),
        }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// Lemmas available to context `n`: those exported by contexts `1..n`,
    /// or by context 1 for ground terms.
    pub(crate) fn imports(&mut self, n: usize) -> Result<Vec<(Equation, Proof)>, LogicError> {
        let n = if n == 0 { 2 } else { n };
        while self.exported.len() < n {
            let m = self.exported.len();
            let imported: Vec<(Equation, Proof)> =
                self.exported.iter().flatten().cloned().collect();
            let mut c = close_context(&self.pres, m, &self.limits, &imported, &[])?;
            let lemmas = c.engine.reduced_lemmas();
            self.exported.push(lemmas);
            self.closures.insert(m, Ok(c));
        }
        Ok(self.exported[..n].iter().flatten().cloned().collect())
    }

    /// The saturated universe of context `n`, built on first use.
    pub(crate) fn closure(&mut self, n: usize) -> Result<&mut Closure, LogicError> {
        if !self.closures.contains_key(&n) {
            let c = self
                .imports(n)
                .and_then(|imported| close_context(&self.pres, n, &self.limits, &imported, &[]));
            self.closures.insert(n, c);
        }
        match self.closures.get_mut(&n).expect("just inserted") {
            Ok(c) => Ok(c),
            Err(e) => Err(e.clone()),
        }
    }

    /// Removes and returns the saturated context `n`.
    pub(crate) fn take_closure(&mut self, n: usize) -> Result<Closure, LogicError> {
        self.closure(n)?;
        self.closures.remove(&n).expect("built above")
    }

    /// Searches for a proof of `goal` within the limits. `None` is not a
    /// refutation.
    pub fn prove(&mut self, goal: &Equation) -> Option<Proof> {
        goal.check_over(self.pres.signature()).ok()?;
        if goal.is_trivial() {
            return Some(Proof::refl(goal.lhs().clone()));
        }
        if let Some(i) = self.pres.axiom_index(goal) {
            return Some(Proof::ax(&self.pres, i).expect("axiom index in range"));
        }
        if let Some(i) = self.pres.axiom_index(&goal.flipped()) {
            return Some(Proof::sym(
                Proof::ax(&self.pres, i).expect("axiom index in range"),
            ));
        }
        let n = goal.context();
        let fits = goal.lhs().size() <= self.limits.max_term_size
            && goal.rhs().size() <= self.limits.max_term_size;
        let proof = if fits {
            let c = self.closure(n).ok()?;
            explain_goal(&mut c.engine, goal)?
        } else {
            let imported = self.imports(n).ok()?;
            let extra = [goal.lhs().expr(), goal.rhs().expr()];
            let mut c = close_context(&self.pres, n, &self.limits, &imported, &extra).ok()?;
            explain_goal(&mut c.engine, goal)?
        };
        let concl = check_proof(&self.pres, &proof).expect("extracted proofs check");
        assert_eq!(&concl, goal, "extracted proof concludes the goal");
        Some(proof)
    }
}

fn explain_goal(engine: &mut Engine, goal: &Equation) -> Option<Proof> {
    let a = engine.u.lookup_expr(goal.lhs().expr())?;
    let b = engine.u.lookup_expr(goal.rhs().expr())?;
    engine.same(a, b).then(|| engine.explain(a, b))
}

/// Searches for a proof of `goal` within `limits`. Absence is not a
/// refutation.
pub fn prove_bounded(pres: &Presentation, goal: &Equation, limits: &Limits) -> Option<Proof> {
    Prover::new(pres.clone(), *limits).prove(goal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn goal(pres: &Presentation, s: &str) -> Equation {
        Equation::parse(pres.signature(), s).unwrap()
    }

    #[test]
    fn group_consequences_at_default_limits() {
        let pres = fixtures::group_presentation();
        let mut prover = Prover::new(pres.clone(), Limits::default());
        for g in [
            "m(e,x1) = x1 @1",
            "i(i(x1)) = x1 @1",
            "m(i(x1),x1) = e @1",
            "i(e) = e @0",
        ] {
            let g = goal(&pres, g);
            let p = prover.prove(&g).unwrap_or_else(|| panic!("{g} not proved"));
            assert_eq!(check_proof(&pres, &p).unwrap(), g);
        }
    }

    #[test]
    fn non_theorems_are_not_proved() {
        let pres = fixtures::group_presentation();
        let limits = Limits::default().with_term_size(6);
        assert!(prove_bounded(&pres, &goal(&pres, "x1 = e @1"), &limits).is_none());
        assert!(prove_bounded(&pres, &goal(&pres, "m(x1,x2) = m(x2,x1) @2"), &limits).is_none());
    }

    #[test]
    fn trivial_and_axiom_goals() {
        let pres = fixtures::group_presentation();
        let limits = Limits::default().with_term_size(3);
        let p = prove_bounded(&pres, &goal(&pres, "m(x2,x1) = m(x2,x1) @2"), &limits).unwrap();
        assert_eq!(p.dag_size(), 1);
        let p = prove_bounded(&pres, &goal(&pres, "x1 = m(x1,e) @1"), &limits).unwrap();
        assert_eq!(p.dag_size(), 2);
    }

    #[test]
    fn goals_beyond_the_size_bound() {
        let pres = fixtures::semilattice_presentation();
        let limits = Limits::default().with_term_size(5);
        let g = goal(&pres, "m(m(x1,m(x2,x1)),m(x2,x2)) = m(x2,x1) @2");
        assert!(g.lhs().size() > 5);
        let p = prove_bounded(&pres, &g, &limits).unwrap();
        assert_eq!(check_proof(&pres, &p).unwrap(), g);
    }
}
