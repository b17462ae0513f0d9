use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{is_model, FiniteAlgebra, TupleFunction};
use crate::clone::{
    end_clone, free_term_clone, AbstractClone, CloneError, EndClone, FreeTermClone, QuotientClone,
};
use crate::term::{Expr, Presentation, Term};

type MapFn<S, T> = dyn Fn(&<S as AbstractClone>::Elem) -> Result<<T as AbstractClone>::Elem, CloneError>
    + Send
    + Sync;

/// A map of graded sets between two clones, meant to be a clone
/// homomorphism; see [`is_clone_hom`].
pub struct CloneHom<S: AbstractClone, T: AbstractClone> {
    source: Arc<S>,
    target: Arc<T>,
    map: Arc<MapFn<S, T>>,
}

impl<S: AbstractClone, T: AbstractClone> Clone for CloneHom<S, T> {
    fn clone(&self) -> Self {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            map: self.map.clone(),
        }
    }
}

impl<S: AbstractClone, T: AbstractClone> fmt::Debug for CloneHom<S, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CloneHom")
    }
}

impl<S: AbstractClone, T: AbstractClone> CloneHom<S, T> {
    pub fn new(
        source: Arc<S>,
        target: Arc<T>,
        map: impl Fn(&S::Elem) -> Result<T::Elem, CloneError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            source,
            target,
            map: Arc::new(map),
        }
    }

    pub fn source(&self) -> &Arc<S> {
        &self.source
    }

    pub fn target(&self) -> &Arc<T> {
        &self.target
    }

    pub fn apply(&self, e: &S::Elem) -> Result<T::Elem, CloneError> {
        (self.map)(e)
    }
}

impl<S: AbstractClone + 'static, T: AbstractClone + 'static> CloneHom<S, T> {
    /// `other ∘ self`.
    pub fn then<U: AbstractClone + 'static>(&self, other: &CloneHom<T, U>) -> CloneHom<S, U> {
        let (f, g) = (self.map.clone(), other.map.clone());
        CloneHom::new(self.source.clone(), other.target.clone(), move |e| {
            g(&f(e)?)
        })
    }
}

/// `h` preserves projections and composition on every checked instance.
pub fn is_clone_hom<S: AbstractClone, T: AbstractClone>(
    h: &CloneHom<S, T>,
    arity_cap: usize,
    sample_budget: u64,
) -> bool {
    hom_violations(h, arity_cap, sample_budget).is_empty()
}

/// Every failed instance of `h(p^(n)_i) = p^(n)_i` and
/// `h(φ ∘ θs) = h(φ) ∘ h(θs)` on levels `0..=arity_cap` of the source.
/// Instances whose composite leaves a bounded source are skipped.
/// Composition instances are checked exhaustively when there are at most
/// `sample_budget` of them, otherwise on a seeded random sample.
pub fn hom_violations<S: AbstractClone, T: AbstractClone>(
    h: &CloneHom<S, T>,
    arity_cap: usize,
    sample_budget: u64,
) -> Vec<String> {
    let (s, t) = (&*h.source, &*h.target);
    let mut out = Vec::new();
    let mut levels = Vec::with_capacity(arity_cap + 1);
    for n in 0..=arity_cap {
        match s.carrier(n) {
            Ok(l) => levels.push(l),
            Err(e) => {
                out.push(format!("level {n}: {e}"));
                return out;
            }
        }
    }
    for n in 0..=arity_cap {
        for i in 1..=n {
            let r = s
                .proj(n, i)
                .and_then(|p| h.apply(&p))
                .and_then(|hp| Ok((hp, t.proj(n, i)?)));
            match r {
                Ok((hp, tp)) if t.equal(&hp, &tp) => {}
                Ok((hp, _)) => out.push(format!("h(p({n},{i})) = {}", t.describe(&hp))),
                Err(e) => out.push(format!("h(p({n},{i})): {e}")),
            }
        }
    }
    let mut blocks = Vec::new();
    for k in 0..=arity_cap {
        for n in 0..=arity_cap {
            let count = (levels[k].len() as u128).saturating_mul(
                (levels[n].len() as u128)
                    .checked_pow(k as u32)
                    .unwrap_or(u128::MAX),
            );
            blocks.push((k, n, count));
        }
    }
    let total = blocks.iter().fold(0u128, |a, b| a.saturating_add(b.2));
    let mut check = |k: usize, n: usize, mut idx: u128| {
        let len = levels[n].len() as u128;
        let mut thetas = vec![levels[n][0].clone(); k];
        for th in thetas.iter_mut().rev() {
            *th = levels[n][(idx % len) as usize].clone();
            idx /= len;
        }
        let phi = &levels[k][idx as usize];
        let left = s.compose(phi, &thetas, n).and_then(|c| h.apply(&c));
        let right = (|| {
            let hs = thetas
                .iter()
                .map(|x| h.apply(x))
                .collect::<Result<Vec<_>, _>>()?;
            t.compose(&h.apply(phi)?, &hs, n)
        })();
        let ctx = || {
            let args: Vec<String> = thetas.iter().map(|x| s.describe(x)).collect();
            format!("{} ∘ ({})", s.describe(phi), args.join(", "))
        };
        match (left, right) {
            (Ok(l), Ok(r)) if t.equal(&l, &r) => {}
            (Ok(l), Ok(r)) => out.push(format!(
                "h({}) = {} but h-images compose to {}",
                ctx(),
                t.describe(&l),
                t.describe(&r)
            )),
            // The composite lies outside the bounded source slice.
            (Err(CloneError::UniverseEscape), _) => {}
            (Err(e), _) | (_, Err(e)) => out.push(format!("{}: {e}", ctx())),
        }
    };
    if total <= sample_budget as u128 {
        for &(k, n, count) in &blocks {
            for idx in 0..count {
                check(k, n, idx);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_40e0);
        for _ in 0..sample_budget {
            let mut r = rng.gen_range(0..total);
            let mut at = 0;
            while r >= blocks[at].2 {
                r -= blocks[at].2;
                at += 1;
            }
            check(blocks[at].0, blocks[at].1, r);
        }
    }
    out
}

/// The unique clone homomorphism `g: T(Σ) -> target` with `g ∘ η = f`, where
/// `f[s]` is the image of the `s`-th symbol: variables go to projections and
/// `σ(t1,…,tk)` to `f(σ) ∘ (g(t1),…,g(tk))`.
pub fn extend_to_clone_hom<T: AbstractClone + Send + Sync + 'static>(
    source: Arc<FreeTermClone>,
    target: Arc<T>,
    f: Vec<T::Elem>,
) -> Result<CloneHom<FreeTermClone, T>, CloneError>
where
    T::Elem: Send + Sync,
{
    let sig = source.signature();
    if f.len() != sig.len() {
        return Err(CloneError::ArityMismatch(format!(
            "{} symbols but {} images",
            sig.len(),
            f.len()
        )));
    }
    for (sym, e) in sig.symbols().iter().zip(&f) {
        if sym.arity() > source.arity_cap() {
            return Err(CloneError::ArityCapExceeded {
                arity: sym.arity(),
                cap: source.arity_cap(),
            });
        }
        if target.arity(e) != sym.arity() {
            return Err(CloneError::ArityMismatch(format!(
                "{} has arity {} but its image {} has arity {}",
                sym.name(),
                sym.arity(),
                target.describe(e),
                target.arity(e)
            )));
        }
    }
    let (src, tgt) = (source.clone(), target.clone());
    Ok(CloneHom::new(source, target, move |t: &Term| {
        extend(&src, &*tgt, &f, t.context(), t.expr())
    }))
}

fn extend<T: AbstractClone>(
    src: &FreeTermClone,
    tgt: &T,
    f: &[T::Elem],
    n: usize,
    e: &Expr,
) -> Result<T::Elem, CloneError> {
    match e {
        Expr::Var(i) => tgt.proj(n, *i),
        Expr::App(_) => {
            let sym = e.symbol().expect("application");
            let s = src
                .signature()
                .index_of(sym)
                .ok_or_else(|| CloneError::NotAnElement(sym.name().to_string()))?;
            let args = e
                .args()
                .iter()
                .map(|a| extend(src, tgt, f, n, a))
                .collect::<Result<Vec<_>, _>>()?;
            tgt.compose(&f[s], &args, n)
        }
    }
}

/// `q: T(Σ) -> T^⟨Σ|E⟩`.
pub fn quotient_map(
    source: Arc<FreeTermClone>,
    quotient: Arc<QuotientClone>,
) -> CloneHom<FreeTermClone, QuotientClone> {
    let q = quotient.clone();
    CloneHom::new(source, quotient, move |t: &Term| q.class_of(t))
}

/// The unique `h: T^⟨Σ|E⟩ -> target` with `h ∘ q = g`, given by
/// `h([θ]) = g(θ)` on representatives. Fails with the index of the first
/// axiom that `g` does not collapse.
pub fn factor_through_quotient<T: AbstractClone + Send + Sync + 'static>(
    g: &CloneHom<FreeTermClone, T>,
    quotient: Arc<QuotientClone>,
) -> Result<CloneHom<QuotientClone, T>, CloneError> {
    for (a, ax) in quotient.presentation().axioms().iter().enumerate() {
        let (l, r) = (g.apply(ax.lhs())?, g.apply(ax.rhs())?);
        if !g.target.equal(&l, &r) {
            return Err(CloneError::HypothesisViolated { axiom: a });
        }
    }
    let (g2, q) = (g.clone(), quotient.clone());
    Ok(CloneHom::new(quotient, g.target.clone(), move |e| {
        g2.apply(&q.representative(e)?)
    }))
}

/// Terms of the bounded source slice on which `h ∘ q` and `g` disagree.
/// Terms that leave the quotient's universe are skipped.
pub fn factorization_mismatches<T: AbstractClone>(
    h: &CloneHom<QuotientClone, T>,
    g: &CloneHom<FreeTermClone, T>,
    arity_cap: usize,
) -> Result<Vec<Term>, CloneError> {
    let mut out = Vec::new();
    for n in 0..=arity_cap {
        for t in g.source.carrier(n)? {
            let c = match h.source.class_of(&t) {
                Ok(c) => c,
                Err(CloneError::UniverseEscape) => continue,
                Err(e) => return Err(e),
            };
            if !g.target.equal(&h.apply(&c)?, &g.apply(&t)?) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// A model of `T^⟨Σ|E⟩`: a clone homomorphism into `End(m)`.
#[derive(Debug, Clone)]
pub struct CloneModel {
    m: usize,
    hom: CloneHom<QuotientClone, EndClone>,
}

/// The clone model of an algebra: [`extend_to_clone_hom`] on its tables,
/// factored through the quotient.
pub fn clone_model_of_algebra(
    alg: &FiniteAlgebra,
    quotient: Arc<QuotientClone>,
) -> Result<CloneModel, CloneError> {
    let pres: &Presentation = quotient.presentation();
    if alg.signature() != pres.signature() || !is_model(alg, pres)? {
        return Err(CloneError::NotAModel);
    }
    let cap = quotient.arity_cap();
    let source = Arc::new(free_term_clone(
        pres.signature(),
        quotient.limits().max_term_size,
        cap,
    ));
    let target = Arc::new(end_clone(alg.size(), cap));
    let g = extend_to_clone_hom(source, target, alg.tables().to_vec())?;
    let hom = factor_through_quotient(&g, quotient)?;
    Ok(CloneModel { m: alg.size(), hom })
}

impl CloneModel {
    pub fn carrier_size(&self) -> usize {
        self.m
    }

    pub fn hom(&self) -> &CloneHom<QuotientClone, EndClone> {
        &self.hom
    }

    /// The images of `[η(σ)]`, in signature order: the algebra's tables.
    pub fn tables(&self) -> Result<Vec<TupleFunction>, CloneError> {
        let q = self.hom.source();
        q.presentation()
            .signature()
            .symbols()
            .iter()
            .map(|s| self.hom.apply(&q.class_of(&Term::generic(s))?))
            .collect()
    }
}

/// Whether `f: A -> B` is a homomorphism of clone models `α -> β`:
/// `f ∘ α(θ) = β(θ) ∘ f^n` for every `θ` of arity at most `arity_cap`.
pub fn is_model_hom(f: &[usize], ma: &CloneModel, mb: &CloneModel, arity_cap: usize) -> bool {
    let q = ma.hom.source();
    if f.len() != ma.m || f.iter().any(|&v| v >= mb.m) {
        return false;
    }
    for n in 0..=arity_cap {
        let Ok(level) = q.carrier(n) else {
            return false;
        };
        for theta in level {
            let (Ok(a), Ok(b)) = (ma.hom.apply(&theta), mb.hom.apply(&theta)) else {
                return false;
            };
            if a.postcompose(f, mb.m).table() != b.precompose(f, ma.m).as_slice() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{interpret, is_homomorphism};
    use crate::clone::quotient_clone;
    use crate::fixtures;
    use crate::limits::Limits;
    use crate::term::enum_terms;

    fn group_quotient() -> Arc<QuotientClone> {
        let limits = Limits::default().with_term_size(5).with_arity_cap(2);
        Arc::new(quotient_clone(&fixtures::group_presentation(), &limits).unwrap())
    }

    fn z2_interpretation() -> CloneHom<FreeTermClone, EndClone> {
        let source = Arc::new(free_term_clone(&fixtures::group_signature(), 3, 2));
        extend_to_clone_hom(
            source,
            Arc::new(end_clone(2, 2)),
            fixtures::z2().tables().to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn identity_and_collapsing_maps() {
        let e = Arc::new(end_clone(2, 2));
        let id = CloneHom::new(e.clone(), e.clone(), |f: &TupleFunction| Ok(f.clone()));
        assert!(is_clone_hom(&id, 2, 1 << 16));
        let first = CloneHom::new(e.clone(), e, |f: &TupleFunction| {
            Ok(if f.arity() == 0 {
                f.clone()
            } else {
                TupleFunction::projection(2, f.arity(), 1)
            })
        });
        assert!(hom_violations(&first, 2, 1 << 16)
            .iter()
            .any(|v| v.starts_with("h(p(2,2))")));
    }

    #[test]
    fn extension_agrees_with_interpretation() {
        let g = z2_interpretation();
        assert!(is_clone_hom(&g, 2, 1 << 20));
        let sig = fixtures::group_signature();
        for n in 0..=2 {
            for t in enum_terms(&sig, n, 5) {
                assert_eq!(
                    g.apply(&t).unwrap(),
                    interpret(&fixtures::z2(), &t).unwrap(),
                    "{t}"
                );
            }
        }
        assert_eq!(
            g.apply(&Term::var(2, 2).unwrap()).unwrap(),
            TupleFunction::projection(2, 2, 2)
        );
    }

    #[test]
    fn factoring_z2_and_a_non_model() {
        let q = group_quotient();
        let g = z2_interpretation();
        let h = factor_through_quotient(&g, q.clone()).unwrap();
        assert!(factorization_mismatches(&h, &g, 2).unwrap().is_empty());
        let src = Arc::new(free_term_clone(&fixtures::group_signature(), 3, 2));
        let bad = extend_to_clone_hom(
            src,
            Arc::new(end_clone(2, 2)),
            fixtures::broken_group().tables().to_vec(),
        )
        .unwrap();
        assert!(matches!(
            factor_through_quotient(&bad, q),
            Err(CloneError::HypothesisViolated { axiom: 0 })
        ));
    }

    #[test]
    fn clone_models_round_trip() {
        let q = group_quotient();
        for alg in [fixtures::z2(), fixtures::z3()] {
            let cm = clone_model_of_algebra(&alg, q.clone()).unwrap();
            assert_eq!(cm.tables().unwrap(), alg.tables());
        }
        let cm = clone_model_of_algebra(&fixtures::z2(), q.clone()).unwrap();
        let m = q
            .class_of(&Term::generic(&fixtures::group_signature().symbols()[2]))
            .unwrap();
        assert_eq!(cm.hom().apply(&m).unwrap().table(), [0, 1, 1, 0]);
        assert!(matches!(
            clone_model_of_algebra(&fixtures::broken_group(), q),
            Err(CloneError::NotAModel)
        ));
    }

    #[test]
    fn model_homs_match_algebra_homs() {
        let q = group_quotient();
        let z2 = clone_model_of_algebra(&fixtures::z2(), q.clone()).unwrap();
        for f in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let expected = is_homomorphism(&f, &fixtures::z2(), &fixtures::z2()).unwrap();
            assert_eq!(is_model_hom(&f, &z2, &z2, 2), expected, "{f:?}");
        }
    }
}
