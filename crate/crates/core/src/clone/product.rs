use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{index_tuple, table_len, TupleFunction};
use crate::clone::{check_arity, end_clone, AbstractClone, CloneError, CloneHom, EndClone};

/// Largest level [`ProductClone::carrier`] enumerates.
const MAX_LEVEL: u128 = 1 << 22;

/// `∏ End(m_i)`, computed componentwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductClone {
    factors: Vec<EndClone>,
    cap: usize,
}

impl ProductClone {
    pub fn new(sizes: &[usize], arity_cap: usize) -> Self {
        Self {
            factors: sizes.iter().map(|&m| end_clone(m, arity_cap)).collect(),
            cap: arity_cap,
        }
    }

    pub fn factor_sizes(&self) -> Vec<usize> {
        self.factors.iter().map(EndClone::carrier_size).collect()
    }
}

impl AbstractClone for ProductClone {
    type Elem = Vec<TupleFunction>;

    fn arity_cap(&self) -> usize {
        self.cap
    }

    fn arity(&self, e: &Vec<TupleFunction>) -> usize {
        e.first().map_or(0, TupleFunction::arity)
    }

    fn carrier(&self, n: usize) -> Result<Vec<Vec<TupleFunction>>, CloneError> {
        let count = self
            .factors
            .iter()
            .try_fold(1u128, |acc, f| acc.checked_mul(f.level_count(n)?))
            .filter(|&c| c <= MAX_LEVEL)
            .ok_or_else(|| CloneError::TooLarge {
                arity: n,
                reason: "product of End levels".into(),
            })?;
        let mut out: Vec<Vec<TupleFunction>> = Vec::with_capacity(count as usize);
        out.push(Vec::new());
        for f in &self.factors {
            let level = f.carrier(n)?;
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    level.iter().map(move |g| {
                        let mut p = prefix.clone();
                        p.push(g.clone());
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }

    fn proj(&self, n: usize, i: usize) -> Result<Vec<TupleFunction>, CloneError> {
        self.factors.iter().map(|f| f.proj(n, i)).collect()
    }

    fn compose(
        &self,
        phi: &Vec<TupleFunction>,
        thetas: &[Vec<TupleFunction>],
        n: usize,
    ) -> Result<Vec<TupleFunction>, CloneError> {
        check_arity(self, phi, thetas, n)?;
        let ok = |e: &Vec<TupleFunction>| e.len() == self.factors.len();
        if !ok(phi) || !thetas.iter().all(ok) {
            return Err(CloneError::NotAnElement(
                "wrong number of components".into(),
            ));
        }
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let args: Vec<TupleFunction> = thetas.iter().map(|t| t[i].clone()).collect();
                f.compose(&phi[i], &args, n)
            })
            .collect()
    }

    fn describe(&self, e: &Vec<TupleFunction>) -> String {
        let parts: Vec<String> = e.iter().map(ToString::to_string).collect();
        format!("({})@{}", parts.join(", "), self.arity(e))
    }
}

/// Elements of one level with equal images under the embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectivityReport {
    pub arity_cap: usize,
    /// Elements per arity.
    pub elements: Vec<usize>,
    /// Per arity, pairs of distinct elements with the same image.
    pub collisions: Vec<Vec<(String, String)>>,
}

impl InjectivityReport {
    pub fn injective_at(&self, n: usize) -> bool {
        self.collisions.get(n).is_some_and(Vec::is_empty)
    }

    pub fn is_injective(&self) -> bool {
        self.collisions.iter().all(Vec::is_empty)
    }
}

/// The canonical map `S -> ∏_{n ≤ cap} End(S_n)` and its injectivity on
/// levels `0..=cap`.
pub struct Embedding<S: AbstractClone> {
    pub hom: CloneHom<S, ProductClone>,
    pub report: InjectivityReport,
}

/// Sends `θ` of arity `k` to the family of maps `S_n^k -> S_n`,
/// `(θ_1,…,θ_k) ↦ θ ∘ (θ_1,…,θ_k)`, one per `n ≤ arity_cap`.
pub fn product_embedding<S>(s: Arc<S>, arity_cap: usize) -> Result<Embedding<S>, CloneError>
where
    S: AbstractClone + Send + Sync + 'static,
    S::Elem: Send + Sync,
{
    let levels: Vec<Vec<S::Elem>> = (0..=arity_cap)
        .map(|n| s.carrier(n))
        .collect::<Result<_, _>>()?;
    let index: Vec<HashMap<S::Elem, usize>> = levels
        .iter()
        .map(|l| l.iter().cloned().enumerate().map(|(j, e)| (e, j)).collect())
        .collect();
    let sizes: Vec<usize> = levels.iter().map(Vec::len).collect();
    let target = Arc::new(ProductClone::new(&sizes, arity_cap));
    let src = s.clone();
    let (lv, ix) = (Arc::new(levels), Arc::new(index));
    let (lv2, ix2) = (lv.clone(), ix.clone());
    let hom = CloneHom::new(s.clone(), target, move |theta: &S::Elem| {
        act(&*src, &lv2, &ix2, theta)
    });
    let mut elements = Vec::new();
    let mut collisions = Vec::new();
    for level in lv.iter() {
        elements.push(level.len());
        let mut seen: HashMap<Vec<TupleFunction>, &S::Elem> = HashMap::new();
        let mut found = Vec::new();
        for e in level {
            let img = hom.apply(e)?;
            if let Some(prev) = seen.get(&img) {
                found.push((s.describe(prev), s.describe(e)));
            } else {
                seen.insert(img, e);
            }
        }
        collisions.push(found);
    }
    Ok(Embedding {
        hom,
        report: InjectivityReport {
            arity_cap,
            elements,
            collisions,
        },
    })
}

fn act<S: AbstractClone>(
    s: &S,
    levels: &[Vec<S::Elem>],
    index: &[HashMap<S::Elem, usize>],
    theta: &S::Elem,
) -> Result<Vec<TupleFunction>, CloneError> {
    let k = s.arity(theta);
    let mut out = Vec::with_capacity(levels.len());
    let mut tuple = Vec::with_capacity(k);
    for (n, level) in levels.iter().enumerate() {
        let m = level.len();
        let len = table_len(m, k).ok_or_else(|| CloneError::TooLarge {
            arity: k,
            reason: format!("{m}^{k} table entries"),
        })?;
        let mut table = Vec::with_capacity(len);
        for i in 0..len {
            index_tuple(m, k, i, &mut tuple);
            let args: Vec<S::Elem> = tuple.iter().map(|&j| level[j].clone()).collect();
            let r = s.compose(theta, &args, n)?;
            let j = index[n]
                .get(&r)
                .copied()
                .ok_or_else(|| CloneError::NotAnElement(s.describe(&r)))?;
            table.push(j);
        }
        out.push(TupleFunction::new(k, m, table)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone::{
        check_clone_axioms, generated_subclone, is_clone_hom, quotient_clone, ExplicitClone,
    };
    use crate::fixtures;
    use crate::limits::Limits;

    #[test]
    fn product_is_a_clone() {
        let p = ProductClone::new(&[1, 2], 1);
        assert_eq!(p.carrier(1).unwrap().len(), 4);
        assert!(check_clone_axioms(&p, 1, 1 << 16).passed());
    }

    #[test]
    fn projections_embed() {
        let s = Arc::new(generated_subclone(&[], 2, 2, 100).unwrap());
        let emb = product_embedding(s, 2).unwrap();
        assert!(emb.report.is_injective());
        assert!(is_clone_hom(&emb.hom, 2, 1 << 16));
    }

    #[test]
    fn semilattice_quotient_embeds() {
        let q = quotient_clone(
            &fixtures::semilattice_presentation(),
            &Limits::default().with_term_size(7),
        )
        .unwrap();
        let emb = product_embedding(Arc::new(q), 2).unwrap();
        assert_eq!(emb.report.elements, [0, 1, 3]);
        assert!(emb.report.is_injective());
    }

    #[test]
    fn duplicates_collide() {
        let names = vec![vec![], vec!["id".to_string(), "dup".to_string()]];
        let mut entries = Vec::new();
        for phi in 0..2 {
            for t in 0..2 {
                entries.push(((1, phi, vec![t]), t));
            }
        }
        let s = ExplicitClone::from_parts(names, vec![vec![], vec![0]], entries).unwrap();
        let emb = product_embedding(Arc::new(s), 1).unwrap();
        assert!(!emb.report.injective_at(1));
        assert_eq!(
            emb.report.collisions[1],
            [("id@1".to_string(), "dup@1".to_string())]
        );
    }
}
