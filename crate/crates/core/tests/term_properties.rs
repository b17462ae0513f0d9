use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unialg::fixtures;
use unialg::term::{enum_terms, random_term, Term};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn terms(seed: u64, n: usize, count: usize, max_size: usize) -> Vec<Term> {
    let sig = fixtures::group_signature();
    let mut r = rng(seed);
    (0..count)
        .map(|_| random_term(&sig, n, max_size, &mut r).expect("the signature has a constant"))
        .collect()
}

proptest! {
    #[test]
    fn substitution_is_associative(seed in any::<u64>(), k in 0usize..4, m in 0usize..4, n in 0usize..4) {
        let s = &terms(seed, k, 1, 6)[0];
        let us = terms(seed ^ 1, m, k, 6);
        let ts = terms(seed ^ 2, n, m, 6);
        let left = s.subst_at(m, &us).unwrap().subst_at(n, &ts).unwrap();
        let inner: Vec<Term> = us.iter().map(|u| u.subst_at(n, &ts).unwrap()).collect();
        prop_assert_eq!(left, s.subst_at(n, &inner).unwrap());
    }

    #[test]
    fn identity_substitution(seed in any::<u64>(), n in 0usize..4) {
        let s = &terms(seed, n, 1, 8)[0];
        let vars: Vec<Term> = (1..=n).map(|i| Term::var(n, i).unwrap()).collect();
        prop_assert_eq!(&s.subst_at(n, &vars).unwrap(), s);
    }

    #[test]
    fn variables_select(seed in any::<u64>(), k in 1usize..4, n in 0usize..4) {
        let ts = terms(seed, n, k, 6);
        for (j, t) in ts.iter().enumerate() {
            prop_assert_eq!(&Term::var(k, j + 1).unwrap().subst_at(n, &ts).unwrap(), t);
        }
    }
}

#[test]
fn group_term_counts_follow_the_recurrence() {
    // c(1) = 2 (x1, e); c(s) = c(s-1) + Σ_{a+b=s-1} c(a) c(b).
    let mut c = vec![0u64, 2];
    for s in 2..=4 {
        let unary = c[s - 1];
        let binary: u64 = (1..s - 1).map(|a| c[a] * c[s - 1 - a]).sum();
        c.push(unary + binary);
    }
    let sig = fixtures::group_signature();
    for s in 1..=4 {
        let expected: u64 = c[1..=s].iter().sum();
        assert_eq!(enum_terms(&sig, 1, s).len() as u64, expected, "size {s}");
    }
    assert_eq!(&c[1..], [2, 2, 6, 14]);
}
