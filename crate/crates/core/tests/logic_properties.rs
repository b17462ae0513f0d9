use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unialg::algebra::{interpret, is_homomorphism, is_model, satisfies, FiniteAlgebra};
use unialg::fixtures;
use unialg::limits::Limits;
use unialg::logic::{check_proof, free_model, prove_bounded, random_proof, saturate_theorems};
use unialg::term::{enum_terms, Equation, Presentation, Term};

fn cases() -> Vec<(Presentation, Vec<FiniteAlgebra>)> {
    vec![
        (
            fixtures::group_presentation(),
            vec![fixtures::z2(), fixtures::z3(), fixtures::s3()],
        ),
        (
            fixtures::semilattice_presentation(),
            vec![fixtures::semilattice_two(), fixtures::semilattice_chain3()],
        ),
    ]
}

#[test]
fn random_proofs_are_sound_in_every_fixture_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut accepted = 0;
    for (pres, models) in cases() {
        for i in 0..600 {
            let n = i % 4;
            let Some(p) = random_proof(&pres, n, 7, 3, &mut rng) else {
                continue;
            };
            let eq = check_proof(&pres, &p).unwrap();
            accepted += 1;
            for alg in &models {
                assert!(satisfies(alg, &eq).unwrap(), "{eq} fails in {}", alg.name());
            }
        }
    }
    assert!(accepted >= 1000, "only {accepted} proofs generated");
}

#[test]
fn bounded_proofs_check_against_their_goals() {
    let pres = fixtures::group_presentation();
    let limits = Limits::default().with_term_size(7);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut proved = 0;
    for i in 0..40 {
        let Some(p) = random_proof(&pres, i % 2 + 1, 5, 2, &mut rng) else {
            continue;
        };
        let goal = p.conclusion().clone();
        if let Some(q) = prove_bounded(&pres, &goal, &limits) {
            assert_eq!(check_proof(&pres, &q).unwrap(), goal);
            proved += 1;
        }
    }
    assert!(proved > 0);
}

#[test]
fn theorem_sets_are_symmetric_and_contain_axiom_instances() {
    let pres = fixtures::group_presentation();
    let limits = Limits::default().with_term_size(6);
    let n = 1;
    let th = saturate_theorems(&pres, n, &limits).unwrap();
    for eq in th.nontrivial() {
        assert!(th.contains(&eq.flipped()), "{eq}");
    }
    let args = enum_terms(pres.signature(), n, 3);
    let mut instances = 0;
    for ax in pres.axioms() {
        let k = ax.context();
        let mut tuple = vec![0; k];
        loop {
            let ts: Vec<Term> = tuple.iter().map(|&j| args[j].clone()).collect();
            let l = ax.lhs().subst_at(n, &ts).unwrap();
            let r = ax.rhs().subst_at(n, &ts).unwrap();
            if l.size() <= 6 && r.size() <= 6 {
                assert!(th.contains(&Equation::new(l, r).unwrap()));
                instances += 1;
            }
            let Some(j) = (0..k).rev().find(|&j| tuple[j] + 1 < args.len()) else {
                break;
            };
            tuple[j] += 1;
            tuple[j + 1..].iter_mut().for_each(|t| *t = 0);
        }
    }
    assert!(instances > 10);
}

#[test]
fn free_model_classes_are_never_separated_by_fixtures() {
    for (pres, models) in cases() {
        for n in 1..=2 {
            let fm = free_model(&pres, n, &Limits::default().with_term_size(7)).unwrap();
            for c in 0..fm.class_count() {
                let members = fm.class_members(c);
                for alg in &models {
                    let rep = interpret(alg, &members[0]).unwrap();
                    for t in &members[1..] {
                        assert_eq!(
                            interpret(alg, t).unwrap(),
                            rep,
                            "{t} vs {} in {}",
                            members[0],
                            alg.name()
                        );
                    }
                }
            }
        }
    }
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
fn complete_free_models_are_free() {
    let runs = [
        (
            fixtures::semilattice_presentation(),
            2,
            7,
            vec![fixtures::semilattice_two(), fixtures::semilattice_chain3()],
        ),
        (
            fixtures::semilattice_presentation(),
            1,
            7,
            vec![fixtures::semilattice_two(), fixtures::semilattice_chain3()],
        ),
        (
            fixtures::group_presentation(),
            0,
            6,
            vec![fixtures::z2(), fixtures::z3()],
        ),
    ];
    for (pres, n, size, models) in runs {
        let fm = free_model(&pres, n, &Limits::default().with_term_size(size)).unwrap();
        assert!(fm.is_complete(), "{} on {n} generators", pres.name());
        let free = fm.algebra().unwrap();
        assert!(is_model(free, &pres).unwrap());
        let gens: Vec<usize> = (1..=n).map(|i| fm.generator_class(i)).collect();
        for alg in &models {
            for assignment in all_maps(n, alg.size()) {
                // Existence: evaluate representatives under the assignment.
                let g: Vec<usize> = (0..fm.class_count())
                    .map(|c| alg.eval(fm.representative(c).expr(), &assignment))
                    .collect();
                assert!(is_homomorphism(&g, free, alg).unwrap());
                assert!(gens.iter().zip(&assignment).all(|(&c, &a)| g[c] == a));
                // Uniqueness: no other homomorphism extends the assignment.
                for h in all_maps(fm.class_count(), alg.size()) {
                    let extends = gens.iter().zip(&assignment).all(|(&c, &a)| h[c] == a);
                    if extends && is_homomorphism(&h, free, alg).unwrap() {
                        assert_eq!(h, g);
                    }
                }
            }
        }
    }
}
