//! Bounded theorem sets and free models read off a saturated context.

use crate::algebra::{is_model, FiniteAlgebra};
use crate::limits::Limits;
use crate::logic::bounded::{Closure, Prover};
use crate::logic::engine::{chain, NONE};
use crate::logic::proof::{check_proof, Proof, ProofChecker};
use crate::logic::LogicError;
use crate::term::{Equation, Expr, Presentation, Term};

/// The partition of a saturated universe, indexed by class number. Classes
/// are numbered in the order of their representatives.
struct Partition {
    node_class: Vec<u32>,
    reps: Vec<u32>,
    /// Members of class `c` are `members[start[c]..start[c + 1]]`, in node order.
    start: Vec<u32>,
    members: Vec<u32>,
}

impl Partition {
    fn of(c: &mut Closure) -> Partition {
        let e = &mut c.engine;
        let ids = e.class_ids();
        let reps_by_root = e.reps().to_vec();
        let len = e.u.len();
        let mut index_of_root = vec![NONE; len];
        let mut reps = Vec::with_capacity(ids.len());
        for (i, &root) in ids.iter().enumerate() {
            index_of_root[root as usize] = i as u32;
            reps.push(reps_by_root[root as usize]);
        }
        let node_class: Vec<u32> = (0..len as u32)
            .map(|x| index_of_root[e.find(x) as usize])
            .collect();
        let mut start = vec![0u32; ids.len() + 1];
        for &c in &node_class {
            start[c as usize + 1] += 1;
        }
        for i in 0..ids.len() {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut members = vec![0u32; len];
        for (x, &c) in node_class.iter().enumerate() {
            members[fill[c as usize] as usize] = x as u32;
            fill[c as usize] += 1;
        }
        Partition {
            node_class,
            reps,
            start,
            members,
        }
    }

    fn count(&self) -> usize {
        self.reps.len()
    }

    fn members(&self, c: usize) -> &[u32] {
        &self.members[self.start[c] as usize..self.start[c + 1] as usize]
    }
}

/// The equations of one context derivable within the limits: all pairs of
/// universe terms that the saturation put in one class. Closed under Sym
/// by construction; every member's link to its class representative was
/// checked when the set was built, so every pair has a checked proof.
pub struct TheoremSet {
    pres: Presentation,
    n: usize,
    limits: Limits,
    closure: Closure,
    part: Partition,
}

/// Saturates context `n` within `limits` and checks a proof of every class
/// member against its representative.
pub fn saturate_theorems(
    pres: &Presentation,
    n: usize,
    limits: &Limits,
) -> Result<TheoremSet, LogicError> {
    let mut prover = Prover::new(pres.clone(), *limits);
    let mut closure = prover.take_closure(n)?;
    let part = Partition::of(&mut closure);
    let mut checker = ProofChecker::default();
    for c in 0..part.count() {
        let r = part.reps[c];
        for &x in part.members(c) {
            if let Some(p) = closure.engine.explain_opt(x, r) {
                checker.check(pres, &p).expect("extracted proofs check");
            }
        }
    }
    Ok(TheoremSet {
        pres: pres.clone(),
        n,
        limits: *limits,
        closure,
        part,
    })
}

impl TheoremSet {
    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn context(&self) -> usize {
        self.n
    }

    pub fn size_bound(&self) -> usize {
        self.limits.max_term_size
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn rounds(&self) -> usize {
        self.closure.rounds
    }

    pub fn universe_len(&self) -> usize {
        self.part.node_class.len()
    }

    pub fn class_count(&self) -> usize {
        self.part.count()
    }

    /// Number of member equations, counting `t ≈ s` and `s ≈ t` separately
    /// and including the diagonal.
    pub fn len(&self) -> u128 {
        (0..self.part.count())
            .map(|c| (self.part.members(c).len() as u128).pow(2))
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.part.count() == 0
    }

    fn node(&self, t: &Term) -> Option<u32> {
        if t.context() != self.n {
            return None;
        }
        self.closure.engine.u.lookup_expr(t.expr())
    }

    pub fn contains(&self, eq: &Equation) -> bool {
        match (self.node(eq.lhs()), self.node(eq.rhs())) {
            (Some(a), Some(b)) => {
                self.part.node_class[a as usize] == self.part.node_class[b as usize]
            }
            _ => false,
        }
    }

    /// A checked proof of a member equation.
    pub fn proof_of(&mut self, eq: &Equation) -> Option<Proof> {
        if !self.contains(eq) {
            return None;
        }
        let a = self.node(eq.lhs())?;
        let b = self.node(eq.rhs())?;
        let p = self.closure.engine.explain(a, b);
        debug_assert_eq!(check_proof(&self.pres, &p).as_ref(), Ok(eq));
        Some(p)
    }

    /// Members of each class, representative first.
    pub fn classes(&self) -> impl Iterator<Item = Vec<Term>> + '_ {
        (0..self.part.count()).map(move |c| {
            let r = self.part.reps[c];
            let mut ts = vec![self.closure.engine.u.term(r)];
            ts.extend(
                self.part
                    .members(c)
                    .iter()
                    .filter(|&&x| x != r)
                    .map(|&x| self.closure.engine.u.term(x)),
            );
            ts
        })
    }

    /// Every member equation; the count is [`TheoremSet::len`].
    pub fn equations(&self) -> impl Iterator<Item = Equation> + '_ {
        self.classes().flat_map(|ts| {
            let pairs: Vec<Equation> = ts
                .iter()
                .flat_map(|a| {
                    ts.iter()
                        .map(move |b| Equation::new(a.clone(), b.clone()).expect("same context"))
                })
                .collect();
            pairs
        })
    }

    /// Member equations between distinct terms.
    pub fn nontrivial(&self) -> impl Iterator<Item = Equation> + '_ {
        self.equations().filter(|eq| !eq.is_trivial())
    }
}

/// The bounded free model on `n` generators: the universe of terms up to
/// the size bound, partitioned by the saturation.
pub struct FreeModel {
    pres: Presentation,
    n: usize,
    limits: Limits,
    closure: Closure,
    part: Partition,
    algebra: Option<FiniteAlgebra>,
}

/// Builds the bounded free model on `n` generators. It is complete when the
/// saturation reached a fixpoint whose classes are closed under every
/// operation; the quotient is then a finite model of the presentation.
pub fn free_model(pres: &Presentation, n: usize, limits: &Limits) -> Result<FreeModel, LogicError> {
    free_model_in(&mut Prover::new(pres.clone(), *limits), n)
}

/// [`free_model`] reusing the lower contexts already saturated by `prover`.
pub fn free_model_in(prover: &mut Prover, n: usize) -> Result<FreeModel, LogicError> {
    let pres = &prover.presentation().clone();
    let limits = &prover.limits().clone();
    let mut closure = prover.take_closure(n)?;
    let part = Partition::of(&mut closure);
    let mut fm = FreeModel {
        pres: pres.clone(),
        n,
        limits: *limits,
        closure,
        part,
        algebra: None,
    };
    if fm.closure.closed {
        let alg = fm.quotient_tables();
        if is_model(&alg, pres).expect("signature matches") {
            fm.algebra = Some(alg);
        }
    }
    Ok(fm)
}

impl FreeModel {
    fn quotient_tables(&self) -> FiniteAlgebra {
        let sig = self.pres.signature();
        let m = self.part.count();
        let tables = sig
            .symbols()
            .iter()
            .enumerate()
            .map(|(s, sym)| {
                let k = sym.arity();
                let mut tuple = Vec::with_capacity(k);
                (0..m.pow(k as u32))
                    .map(|index| {
                        crate::algebra::index_tuple(m, k, index, &mut tuple);
                        self.apply(s, &tuple).expect("closed classes")
                    })
                    .collect()
            })
            .collect();
        FiniteAlgebra::new(
            format!("free{}({})", self.n, self.pres.name()),
            sig.clone(),
            m,
            tables,
        )
        .expect("well-formed tables")
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn rounds(&self) -> usize {
        self.closure.rounds
    }

    pub fn is_complete(&self) -> bool {
        self.algebra.is_some()
    }

    /// The quotient as a finite algebra, when complete.
    pub fn algebra(&self) -> Option<&FiniteAlgebra> {
        self.algebra.as_ref()
    }

    pub fn universe_len(&self) -> usize {
        self.part.node_class.len()
    }

    /// The `i`-th universe term, in enumeration order.
    pub fn universe_term(&self, i: usize) -> Term {
        self.closure.engine.u.term(i as u32)
    }

    pub fn class_count(&self) -> usize {
        self.part.count()
    }

    pub fn class_of_node(&self, i: usize) -> usize {
        self.part.node_class[i] as usize
    }

    /// Class of `t`, looked up in the universe or, for larger terms,
    /// computed from the classes of its arguments. `None` when the term
    /// leaves the universe.
    pub fn class_of_term(&self, t: &Term) -> Option<usize> {
        if t.context() != self.n || t.check_over(self.pres.signature()).is_err() {
            return None;
        }
        if let Some(x) = self.closure.engine.u.lookup_expr(t.expr()) {
            return Some(self.part.node_class[x as usize] as usize);
        }
        let gens: Vec<usize> = (1..=self.n).map(|i| self.generator_class(i)).collect();
        self.eval_expr(t.expr(), &gens).ok()
    }

    /// Class of the generator `x_i` (1-based).
    pub fn generator_class(&self, i: usize) -> usize {
        assert!((1..=self.n).contains(&i), "generator index out of range");
        self.part.node_class[i - 1] as usize
    }

    /// Least member of class `c` under the term order.
    pub fn representative(&self, c: usize) -> Term {
        self.closure.engine.u.term(self.part.reps[c])
    }

    pub fn representatives(&self) -> Vec<Term> {
        (0..self.class_count())
            .map(|c| self.representative(c))
            .collect()
    }

    pub fn class_members(&self, c: usize) -> Vec<Term> {
        self.part
            .members(c)
            .iter()
            .map(|&x| self.closure.engine.u.term(x))
            .collect()
    }

    /// The class of `σ(c_1,…,c_k)` for the `s`-th symbol, if that
    /// application lands in the universe.
    pub fn apply(&self, s: usize, classes: &[usize]) -> Option<usize> {
        let e = &self.closure.engine;
        let kind = (self.n + s) as u32;
        let roots: Vec<u32> = classes.iter().map(|&c| e.find(self.part.reps[c])).collect();
        let x = e.apply_node(kind, &roots)?;
        Some(self.part.node_class[x as usize] as usize)
    }

    fn eval_expr(&self, e: &Expr, args: &[usize]) -> Result<usize, LogicError> {
        match e {
            Expr::Var(i) => Ok(args[i - 1]),
            Expr::App(_) => {
                let sym = e.symbol().expect("application");
                let s = self
                    .pres
                    .signature()
                    .index_of(sym)
                    .expect("checked signature");
                let cs = e
                    .args()
                    .iter()
                    .map(|a| self.eval_expr(a, args))
                    .collect::<Result<Vec<_>, _>>()?;
                self.apply(s, &cs).ok_or(LogicError::UniverseEscape)
            }
        }
    }

    /// A universe node for `e` with a proof of `e ≈ node` (`None` when
    /// `e` is itself that node).
    fn reach(&mut self, e: &Expr) -> Option<(u32, Option<Proof>)> {
        if let Some(x) = self.closure.engine.u.lookup_expr(e) {
            return Some((x, None));
        }
        let sym = e
            .symbol()
            .expect("variables are always in the universe")
            .clone();
        let s = self
            .pres
            .signature()
            .index_of(&sym)
            .expect("checked signature");
        let mut nodes = Vec::new();
        let mut proofs = Vec::new();
        for a in e.args() {
            let (x, p) = self.reach(a)?;
            nodes.push(x);
            proofs.push(p);
        }
        let engine = &mut self.closure.engine;
        let roots: Vec<u32> = nodes.iter().map(|&x| engine.find(x)).collect();
        let y = engine.apply_node((self.n + s) as u32, &roots)?;
        let ys = engine.u.children(y).to_vec();
        let mut args = Vec::with_capacity(nodes.len());
        for ((a, (x, p)), yc) in e.args().iter().zip(nodes.into_iter().zip(proofs)).zip(ys) {
            let mut steps: Vec<Proof> = p.into_iter().collect();
            steps.extend(engine.explain_opt(x, yc));
            args.push(if steps.is_empty() {
                Proof::refl(Term::from_expr_unchecked(self.n, a.clone()))
            } else {
                chain(steps)
            });
        }
        let g = Term::generic(&sym);
        let p =
            Proof::cong(g.clone(), g.clone(), self.n, Proof::refl(g), args).expect("well-formed");
        Some((y, Some(p)))
    }

    /// Decides `eq` in a complete free model: a checked proof when both
    /// sides evaluate to one class at the generators, `None` otherwise.
    pub fn witness(&mut self, eq: &Equation) -> Result<Option<Proof>, LogicError> {
        eq.check_over(self.pres.signature())
            .map_err(|e| LogicError::Invalid(e.to_string()))?;
        if eq.context() != self.n {
            return Err(LogicError::Invalid(format!(
                "equation has context {}, free model has {} generators",
                eq.context(),
                self.n
            )));
        }
        if eq.is_trivial() {
            return Ok(Some(Proof::refl(eq.lhs().clone())));
        }
        if !self.is_complete() {
            return Err(LogicError::IncompleteFreeModel);
        }
        let (a, pa) = self
            .reach(eq.lhs().expr())
            .ok_or(LogicError::UniverseEscape)?;
        let (b, pb) = self
            .reach(eq.rhs().expr())
            .ok_or(LogicError::UniverseEscape)?;
        if !self.closure.engine.same(a, b) {
            return Ok(None);
        }
        let mut steps: Vec<Proof> = pa.into_iter().collect();
        steps.extend(self.closure.engine.explain_opt(a, b));
        steps.extend(pb.map(Proof::sym));
        let p = chain(steps);
        let concl = check_proof(&self.pres, &p).expect("extracted proofs check");
        assert_eq!(&concl, eq);
        Ok(Some(p))
    }
}

/// Evaluates `t` in the free model with its variables sent to the classes
/// `args`.
pub fn eval_in_free_model(fm: &FreeModel, t: &Term, args: &[usize]) -> Result<usize, LogicError> {
    if !fm.is_complete() {
        return Err(LogicError::IncompleteFreeModel);
    }
    t.check_over(fm.pres.signature())
        .map_err(|e| LogicError::Invalid(e.to_string()))?;
    if args.len() != t.context() {
        return Err(LogicError::Invalid(format!(
            "term has context {}, got {} arguments",
            t.context(),
            args.len()
        )));
    }
    if let Some(&c) = args.iter().find(|&&c| c >= fm.class_count()) {
        return Err(LogicError::Invalid(format!(
            "class {c} out of range (model has {})",
            fm.class_count()
        )));
    }
    fm.eval_expr(t.expr(), args)
}

/// Proof of `eq` extracted from the free model on `eq.context()` generators,
/// or `None` when the free model separates its sides.
pub fn completeness_witness(
    pres: &Presentation,
    eq: &Equation,
    limits: &Limits,
) -> Result<Option<Proof>, LogicError> {
    eq.check_over(pres.signature())
        .map_err(|e| LogicError::Invalid(e.to_string()))?;
    if eq.is_trivial() {
        return Ok(Some(Proof::refl(eq.lhs().clone())));
    }
    free_model(pres, eq.context(), limits)?.witness(eq)
}
