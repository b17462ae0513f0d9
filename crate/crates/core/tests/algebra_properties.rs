use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unialg::algebra::{interpret, is_homomorphism, satisfies, FiniteAlgebra, TupleFunction};
use unialg::fixtures;
use unialg::term::{enum_terms, random_term, Equation, Term};

fn group_models() -> Vec<FiniteAlgebra> {
    vec![
        fixtures::z2(),
        fixtures::z3(),
        fixtures::s3(),
        fixtures::broken_group(),
    ]
}

/// Every map `0..a -> 0..b`.
fn all_maps(a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..a {
        out = out
            .into_iter()
            .flat_map(|m| (0..b).map(move |v| [m.clone(), vec![v]].concat()))
            .collect();
    }
    out
}

#[test]
fn generic_terms_denote_their_tables() {
    let algs = [
        group_models(),
        vec![fixtures::semilattice_two(), fixtures::semilattice_chain3()],
    ]
    .concat();
    for alg in algs {
        for (sym, table) in alg.signature().symbols().iter().zip(alg.tables()) {
            assert_eq!(
                &interpret(&alg, &Term::generic(sym)).unwrap(),
                table,
                "{} in {}",
                sym.name(),
                alg.name()
            );
        }
    }
}

#[test]
fn interpretation_respects_substitution_on_z2() {
    let z2 = fixtures::z2();
    let sig = z2.signature().clone();
    for k in 0..=2 {
        for s in enum_terms(&sig, k, 4) {
            let outer = interpret(&z2, &s).unwrap();
            for n in 0..=2 {
                let args = enum_terms(&sig, n, 2);
                let mut tuple = vec![0; k];
                loop {
                    let ts: Vec<Term> = tuple.iter().map(|&j| args[j].clone()).collect();
                    let tables: Vec<TupleFunction> =
                        ts.iter().map(|t| interpret(&z2, t).unwrap()).collect();
                    let direct = interpret(&z2, &s.subst_at(n, &ts).unwrap()).unwrap();
                    assert_eq!(direct, outer.compose(n, &tables), "{s} under {ts:?}");
                    let Some(j) = (0..k).rev().find(|&j| tuple[j] + 1 < args.len()) else {
                        break;
                    };
                    tuple[j] += 1;
                    tuple[j + 1..].iter_mut().for_each(|t| *t = 0);
                }
            }
        }
    }
}

#[test]
fn homomorphisms_compose() {
    let algs = [fixtures::z2(), fixtures::z3(), fixtures::broken_group()];
    for a in &algs {
        let id: Vec<usize> = (0..a.size()).collect();
        assert!(is_homomorphism(&id, a, a).unwrap());
        for b in &algs {
            for c in &algs {
                for f in all_maps(a.size(), b.size()) {
                    if !is_homomorphism(&f, a, b).unwrap() {
                        continue;
                    }
                    for g in all_maps(b.size(), c.size()) {
                        if is_homomorphism(&g, b, c).unwrap() {
                            let gf: Vec<usize> = f.iter().map(|&x| g[x]).collect();
                            assert!(is_homomorphism(&gf, a, c).unwrap());
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn satisfaction_is_symmetric_and_transitive(seed in any::<u64>(), n in 0usize..3) {
        let sig = fixtures::group_signature();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = || random_term(&sig, n, 6, &mut rng).unwrap();
        let (a, b, c) = (t(), t(), t());
        let ab = Equation::new(a.clone(), b.clone()).unwrap();
        let bc = Equation::new(b, c.clone()).unwrap();
        let ac = Equation::new(a, c).unwrap();
        for alg in group_models() {
            prop_assert_eq!(satisfies(&alg, &ab).unwrap(), satisfies(&alg, &ab.flipped()).unwrap());
            if satisfies(&alg, &ab).unwrap() && satisfies(&alg, &bc).unwrap() {
                prop_assert!(satisfies(&alg, &ac).unwrap());
            }
        }
    }
}
