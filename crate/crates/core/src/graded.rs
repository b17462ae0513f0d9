//! Graded sets: families of finite sets indexed by arity.
//!
//! An element of a graded set is the pair `(arity, identifier)`, so the same
//! identifier may appear at several arities. Only finitely many levels are
//! stored; every level that is not stored is empty.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::union_find::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("relation is not an equivalence at arity {arity}")]
    NotAnEquivalence { arity: usize },
    #[error("relation is over a different base graded set")]
    BaseMismatch,
    #[error("target of the first morphism is not the source of the second")]
    SourceTargetMismatch,
    #[error("map is not total at arity {arity}: `{id}` has no image")]
    NotTotal { arity: usize, id: String },
    #[error("image `{image}` of `{id}` is not an element of the target at arity {arity}")]
    ImageOutsideTarget {
        arity: usize,
        id: String,
        image: String,
    },
    #[error("pair ({0}, {1}) at arity {2} is not over the base level")]
    PairOutsideBase(String, String, usize),
}

/// A graded set with finitely many nonempty levels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GradedSet {
    levels: BTreeMap<usize, BTreeSet<String>>,
    arity_bound: Option<usize>,
}

impl GradedSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graded set from `(arity, identifiers)` pairs. Empty levels are dropped.
    pub fn from_levels<I, L, S>(levels: I) -> Self
    where
        I: IntoIterator<Item = (usize, L)>,
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = Self::new();
        for (n, ids) in levels {
            for id in ids {
                g.insert(n, id);
            }
        }
        g
    }

    pub fn with_arity_bound(mut self, bound: usize) -> Self {
        self.levels.retain(|&n, _| n <= bound);
        self.arity_bound = Some(bound);
        self
    }

    pub fn arity_bound(&self) -> Option<usize> {
        self.arity_bound
    }

    /// Inserts `(n, id)`; returns false when it was already present or lies above the bound.
    pub fn insert(&mut self, n: usize, id: impl Into<String>) -> bool {
        if self.arity_bound.is_some_and(|b| n > b) {
            return false;
        }
        self.levels.entry(n).or_default().insert(id.into())
    }

    pub fn contains(&self, n: usize, id: &str) -> bool {
        self.levels.get(&n).is_some_and(|l| l.contains(id))
    }

    /// Level `n`; empty when not stored.
    pub fn level(&self, n: usize) -> impl Iterator<Item = &str> + '_ {
        self.levels
            .get(&n)
            .into_iter()
            .flat_map(|l| l.iter().map(String::as_str))
    }

    pub fn level_len(&self, n: usize) -> usize {
        self.levels.get(&n).map_or(0, BTreeSet::len)
    }

    /// Arities with at least one element, ascending.
    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels
            .iter()
            .filter(|(_, l)| !l.is_empty())
            .map(|(&n, _)| n)
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.arities().last()
    }

    /// All elements as `(arity, identifier)`, ordered by arity then identifier.
    pub fn elements(&self) -> impl Iterator<Item = (usize, &str)> + '_ {
        self.levels
            .iter()
            .flat_map(|(&n, l)| l.iter().map(move |id| (n, id.as_str())))
    }

    pub fn len(&self) -> usize {
        self.levels.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same nonempty levels, ignoring the stored bound.
    pub fn same_elements(&self, other: &GradedSet) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    pub fn is_subset_of(&self, other: &GradedSet) -> bool {
        gs_is_subset(self, other)
    }
}

impl fmt::Display for GradedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.arities().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let ids: Vec<&str> = self.level(n).collect();
            write!(f, "{n}:{{{}}}", ids.join(","))?;
        }
        write!(f, "}}")
    }
}

/// Identifier of a pair in a product level.
pub fn pair_id(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// Levelwise cartesian product.
pub fn gs_product(g: &GradedSet, h: &GradedSet) -> GradedSet {
    let mut out = GradedSet::new();
    for n in g.arities() {
        for a in g.level(n) {
            for b in h.level(n) {
                out.insert(n, pair_id(a, b));
            }
        }
    }
    match (g.arity_bound, h.arity_bound) {
        (Some(x), Some(y)) => out.with_arity_bound(x.min(y)),
        _ => out,
    }
}

pub fn gs_is_subset(g2: &GradedSet, g: &GradedSet) -> bool {
    g2.arities()
        .all(|n| g2.level(n).all(|id| g.contains(n, id)))
}

/// A levelwise total function between graded sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMorphism {
    source: GradedSet,
    target: GradedSet,
    maps: BTreeMap<usize, BTreeMap<String, String>>,
}

impl GradedMorphism {
    /// Checks totality and that every image lies in the target level of the same arity.
    pub fn new(
        source: GradedSet,
        target: GradedSet,
        maps: BTreeMap<usize, BTreeMap<String, String>>,
    ) -> Result<Self, GradedError> {
        for (n, id) in source.elements() {
            let image =
                maps.get(&n)
                    .and_then(|m| m.get(id))
                    .ok_or_else(|| GradedError::NotTotal {
                        arity: n,
                        id: id.to_string(),
                    })?;
            if !target.contains(n, image) {
                return Err(GradedError::ImageOutsideTarget {
                    arity: n,
                    id: id.to_string(),
                    image: image.clone(),
                });
            }
        }
        // Drop entries for identifiers outside the source.
        let maps = maps
            .into_iter()
            .map(|(n, m)| {
                let m: BTreeMap<_, _> = m
                    .into_iter()
                    .filter(|(k, _)| source.contains(n, k))
                    .collect();
                (n, m)
            })
            .filter(|(_, m)| !m.is_empty())
            .collect();
        Ok(Self {
            source,
            target,
            maps,
        })
    }

    /// Builds a morphism from a per-element function.
    pub fn from_fn(
        source: GradedSet,
        target: GradedSet,
        mut f: impl FnMut(usize, &str) -> String,
    ) -> Result<Self, GradedError> {
        let mut maps: BTreeMap<usize, BTreeMap<String, String>> = BTreeMap::new();
        for (n, id) in source.elements() {
            maps.entry(n).or_default().insert(id.to_string(), f(n, id));
        }
        Self::new(source, target, maps)
    }

    pub fn identity(g: &GradedSet) -> Self {
        Self::from_fn(g.clone(), g.clone(), |_, id| id.to_string()).expect("identity is total")
    }

    pub fn source(&self) -> &GradedSet {
        &self.source
    }

    pub fn target(&self) -> &GradedSet {
        &self.target
    }

    pub fn apply(&self, n: usize, id: &str) -> Option<&str> {
        self.maps.get(&n)?.get(id).map(String::as_str)
    }

    pub fn is_injective(&self) -> bool {
        self.maps.values().all(|m| {
            let images: BTreeSet<&String> = m.values().collect();
            images.len() == m.len()
        })
    }

    pub fn is_surjective(&self) -> bool {
        self.target.elements().all(|(n, id)| {
            self.maps
                .get(&n)
                .is_some_and(|m| m.values().any(|v| v == id))
        })
    }
}

/// `g ∘ f`: apply `f` first.
pub fn gm_compose(f: &GradedMorphism, g: &GradedMorphism) -> Result<GradedMorphism, GradedError> {
    if !f.target.same_elements(&g.source) {
        return Err(GradedError::SourceTargetMismatch);
    }
    GradedMorphism::from_fn(f.source.clone(), g.target.clone(), |n, id| {
        let mid = f.apply(n, id).expect("f is total");
        g.apply(n, mid)
            .expect("g is total on f's target")
            .to_string()
    })
}

/// A levelwise binary relation on a graded set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedRelation {
    base: GradedSet,
    pairs: BTreeMap<usize, BTreeSet<(String, String)>>,
}

impl GradedRelation {
    pub fn new<I, A, B>(base: GradedSet, pairs: I) -> Result<Self, GradedError>
    where
        I: IntoIterator<Item = (usize, A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut map: BTreeMap<usize, BTreeSet<(String, String)>> = BTreeMap::new();
        for (n, a, b) in pairs {
            let (a, b) = (a.into(), b.into());
            if !base.contains(n, &a) || !base.contains(n, &b) {
                return Err(GradedError::PairOutsideBase(a, b, n));
            }
            map.entry(n).or_default().insert((a, b));
        }
        Ok(Self { base, pairs: map })
    }

    pub fn diagonal(base: &GradedSet) -> Self {
        let pairs: Vec<_> = base
            .elements()
            .map(|(n, id)| (n, id.to_string(), id.to_string()))
            .collect();
        Self::new(base.clone(), pairs).expect("diagonal lies over its base")
    }

    pub fn full(base: &GradedSet) -> Self {
        let mut pairs = Vec::new();
        for n in base.arities() {
            for a in base.level(n) {
                for b in base.level(n) {
                    pairs.push((n, a.to_string(), b.to_string()));
                }
            }
        }
        Self::new(base.clone(), pairs).expect("full relation lies over its base")
    }

    pub fn base(&self) -> &GradedSet {
        &self.base
    }

    pub fn contains(&self, n: usize, a: &str, b: &str) -> bool {
        self.pairs
            .get(&n)
            .is_some_and(|p| p.contains(&(a.to_string(), b.to_string())))
    }

    pub fn pairs(&self, n: usize) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.pairs
            .get(&n)
            .into_iter()
            .flat_map(|p| p.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    }

    fn level_is_equivalence(&self, n: usize) -> bool {
        let level: Vec<&str> = self.base.level(n).collect();
        let reflexive = level.iter().all(|a| self.contains(n, a, a));
        let symmetric = self.pairs(n).all(|(a, b)| self.contains(n, b, a));
        let transitive = self.pairs(n).all(|(a, b)| {
            self.pairs(n)
                .filter(|(b2, _)| *b2 == b)
                .all(|(_, c)| self.contains(n, a, c))
        });
        reflexive && symmetric && transitive
    }
}

pub fn rel_is_equivalence(r: &GradedRelation) -> bool {
    let arities: BTreeSet<usize> = r.base.arities().chain(r.pairs.keys().copied()).collect();
    arities.into_iter().all(|n| r.level_is_equivalence(n))
}

/// Quotient by an equivalence relation, with the canonical projection.
///
/// Each class is named by its least identifier, so the quotient is a graded
/// subset of `g`.
pub fn gs_quotient(
    g: &GradedSet,
    r: &GradedRelation,
) -> Result<(GradedSet, GradedMorphism), GradedError> {
    if !r.base.same_elements(g) {
        return Err(GradedError::BaseMismatch);
    }
    if let Some(n) = g
        .arities()
        .chain(r.pairs.keys().copied())
        .find(|&n| !r.level_is_equivalence(n))
    {
        return Err(GradedError::NotAnEquivalence { arity: n });
    }
    let mut quotient = GradedSet::new();
    let mut maps: BTreeMap<usize, BTreeMap<String, String>> = BTreeMap::new();
    for n in g.arities() {
        let ids: Vec<&str> = g.level(n).collect();
        let mut uf = UnionFind::new(ids.len());
        for (a, b) in r.pairs(n) {
            // Levels are sorted, so binary search recovers the positions.
            let ia = ids.binary_search(&a).expect("pair over base");
            let ib = ids.binary_search(&b).expect("pair over base");
            uf.union(ia, ib);
        }
        // The root chosen by `union_min` would depend on merge order; pick the least member.
        let mut least: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..ids.len() {
            let root = uf.find(i);
            least
                .entry(root)
                .and_modify(|m| *m = (*m).min(i))
                .or_insert(i);
        }
        let level = maps.entry(n).or_default();
        for (i, id) in ids.iter().enumerate() {
            let rep = ids[least[&uf.find(i)]];
            quotient.insert(n, rep);
            level.insert(id.to_string(), rep.to_string());
        }
    }
    let projection = GradedMorphism::new(g.clone(), quotient.clone(), maps)?;
    Ok((quotient, projection))
}
