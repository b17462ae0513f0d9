use std::collections::BTreeMap;

use proptest::prelude::*;
use unialg::graded::{
    gm_compose, gs_is_subset, gs_quotient, GradedMorphism, GradedRelation, GradedSet,
};

fn ids(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("a{i}")).collect()
}

/// Levels of sizes `sizes[n]` named `a0, a1, …`.
fn graded(sizes: &[usize]) -> GradedSet {
    let mut g = GradedSet::new();
    for (n, &k) in sizes.iter().enumerate() {
        for id in ids(k) {
            g.insert(n, id);
        }
    }
    g
}

/// Reflexive, symmetric, transitive closure by squaring the boolean matrix
/// `I + A + Aᵀ` until it is stable.
fn closure_matrix(k: usize, pairs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; k]; k];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in pairs {
        m[a][b] = true;
        m[b][a] = true;
    }
    loop {
        let sq: Vec<Vec<bool>> = (0..k)
            .map(|i| (0..k).map(|j| (0..k).any(|l| m[i][l] && m[l][j])).collect())
            .collect();
        if sq == m {
            return m;
        }
        m = sq;
    }
}

fn level_pairs() -> impl Strategy<Value = Vec<(usize, Vec<(usize, usize)>)>> {
    prop::collection::vec(
        (1usize..=6).prop_flat_map(|k| (Just(k), prop::collection::vec((0..k, 0..k), 0..8))),
        1..4,
    )
}

proptest! {
    #[test]
    fn quotient_classes_match_closure(levels in level_pairs()) {
        let sizes: Vec<usize> = levels.iter().map(|(k, _)| *k).collect();
        let g = graded(&sizes);
        let mut rel = Vec::new();
        let mut expected = Vec::new();
        for (n, (k, pairs)) in levels.iter().enumerate() {
            let m = closure_matrix(*k, pairs);
            let names = ids(*k);
            for i in 0..*k {
                for j in 0..*k {
                    if m[i][j] {
                        rel.push((n, names[i].clone(), names[j].clone()));
                    }
                }
            }
            let mut rows = m.clone();
            rows.sort();
            rows.dedup();
            expected.push(rows.len());
        }
        let r = GradedRelation::new(g.clone(), rel).unwrap();
        let (q, proj) = gs_quotient(&g, &r).unwrap();
        for (n, &count) in expected.iter().enumerate() {
            prop_assert_eq!(q.level_len(n), count);
        }
        prop_assert!(proj.is_surjective());
    }

    #[test]
    fn subset_is_a_partial_order(
        a in prop::collection::btree_set((0usize..3, 0usize..4), 0..8),
        b in prop::collection::btree_set((0usize..3, 0usize..4), 0..8),
        c in prop::collection::btree_set((0usize..3, 0usize..4), 0..8),
    ) {
        let mk = |s: &std::collections::BTreeSet<(usize, usize)>| {
            let mut g = GradedSet::new();
            for &(n, i) in s {
                g.insert(n, format!("a{i}"));
            }
            g
        };
        let (ga, gb, gc) = (mk(&a), mk(&b), mk(&c));
        prop_assert!(gs_is_subset(&ga, &ga));
        if gs_is_subset(&ga, &gb) && gs_is_subset(&gb, &ga) {
            prop_assert!(ga.same_elements(&gb));
        }
        if gs_is_subset(&ga, &gb) && gs_is_subset(&gb, &gc) {
            prop_assert!(gs_is_subset(&ga, &gc));
        }
        // Oracle: plain set inclusion.
        prop_assert_eq!(gs_is_subset(&ga, &gb), a.is_subset(&b));
    }

    #[test]
    fn composition_is_associative_with_identities(
        sizes in prop::collection::vec(1usize..=5, 1..4),
        seeds in prop::collection::vec(any::<u64>(), 3),
    ) {
        let g = graded(&sizes);
        let names: Vec<Vec<String>> = sizes.iter().map(|&k| ids(k)).collect();
        let random_map = |seed: u64| {
            let mut maps: BTreeMap<usize, BTreeMap<String, String>> = BTreeMap::new();
            let mut x = seed | 1;
            for (n, level) in names.iter().enumerate() {
                for id in level {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    maps.entry(n).or_default().insert(id.clone(), level[(x % level.len() as u64) as usize].clone());
                }
            }
            GradedMorphism::new(g.clone(), g.clone(), maps).unwrap()
        };
        let (f, h, k) = (random_map(seeds[0]), random_map(seeds[1]), random_map(seeds[2]));
        let left = gm_compose(&gm_compose(&f, &h).unwrap(), &k).unwrap();
        let right = gm_compose(&f, &gm_compose(&h, &k).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let id = GradedMorphism::identity(&g);
        prop_assert_eq!(gm_compose(&id, &f).unwrap(), f.clone());
        prop_assert_eq!(gm_compose(&f, &id).unwrap(), f);
    }
}
