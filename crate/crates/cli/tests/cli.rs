mod common;

use common::{fixture, fixtures_dir, machine, scratch, unialg};
use serde_json::json;
use unialg::algebra::{is_model, satisfies};
use unialg::fixtures;
use unialg::term::Equation;
use unialg_cli::files::{load_algebra, load_presentation};

#[test]
fn fixture_files_match_the_library_fixtures() {
    let pairs = [
        ("grp.pres", fixtures::group_presentation()),
        ("grpPrime.pres", fixtures::group_prime_presentation()),
        (
            "grpDoublePrime.pres",
            fixtures::group_double_prime_presentation(),
        ),
        ("semilattice.pres", fixtures::semilattice_presentation()),
    ];
    for (file, pres) in pairs {
        let loaded = load_presentation(&fixture(file)).unwrap();
        assert_eq!(loaded.signature(), pres.signature(), "{file}");
        assert_eq!(loaded.axioms(), pres.axioms(), "{file}");
    }
    let grp = fixtures::group_signature();
    let sl = fixtures::semilattice_signature();
    let algs = [
        ("z2.alg", fixtures::z2(), &grp),
        ("z3.alg", fixtures::z3(), &grp),
        ("s3.alg", fixtures::s3(), &grp),
        ("broken.alg", fixtures::broken_group(), &grp),
        ("sl2.alg", fixtures::semilattice_two(), &sl),
        ("chain3.alg", fixtures::semilattice_chain3(), &sl),
    ];
    for (file, alg, sig) in algs {
        assert_eq!(
            load_algebra(&fixture(file), Some(sig)).unwrap().tables(),
            alg.tables(),
            "{file}"
        );
    }
}

#[test]
fn check_model_verdicts_and_exit_codes() {
    for alg in ["z2.alg", "z3.alg", "s3.alg"] {
        let (code, v) = machine(args(&[&"check-model", &fixture("grp.pres"), &fixture(alg)]));
        assert_eq!((code, v["verdict"].clone()), (0, json!("Pass")), "{alg}");
    }
    let (code, v) = machine(args(&[
        &"check-model",
        &fixture("grp.pres"),
        &fixture("broken.alg"),
    ]));
    assert_eq!(code, 2);
    assert_eq!(v["failed_axioms"], json!([0]));
    assert_eq!(v["axioms"][0]["failing"], json!([[1]]));
    let (code, _) = machine(args(&[
        &"check-model",
        &fixture("empty.pres"),
        &fixture("broken.alg"),
    ]));
    assert_eq!(code, 0);
}

fn args(parts: &[&dyn AsRef<std::ffi::OsStr>]) -> Vec<std::ffi::OsString> {
    parts.iter().map(|p| p.as_ref().to_os_string()).collect()
}

#[test]
fn input_errors_exit_one_with_a_line_number() {
    let bad = scratch("bad.pres");
    std::fs::write(&bad, "sig m 2\naxiom @1 m(x1) = x1\n").unwrap();
    let r = unialg(args(&[&"check-model", &bad, &fixture("z2.alg")]));
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("bad.pres:2:"), "{}", r.stderr);
    let r = unialg(args(&[
        &"check-model",
        &fixture("grp.pres"),
        &fixture("sl2.alg"),
    ]));
    assert_eq!(r.code, 1);
    let r = unialg(args(&[&"prove", &fixture("grp.pres"), &"m(x1,x2) = x1"]));
    assert_eq!(r.code, 1, "a goal needs its context");
    let r = unialg(args(&[
        &"--limits",
        &"max_term_size=0",
        &"prove",
        &fixture("grp.pres"),
        &"x1 = x1 @1",
    ]));
    assert_eq!(r.code, 1);
}

#[test]
fn check_proof_reports_paths() {
    let (code, v) = machine(args(&[
        &"check-proof",
        &fixture("grp.pres"),
        &fixture("left-unit.proof"),
    ]));
    assert_eq!(
        (code, v["conclusion"].clone()),
        (0, json!("m(e,x1) = x1 @1"))
    );
    let (code, v) = machine(args(&[
        &"check-proof",
        &fixture("grp.pres"),
        &fixture("bad-axiom.proof"),
    ]));
    assert_eq!(
        (code, v["error"].clone(), v["path"].clone()),
        (2, json!("InvalidAxiom"), json!("root.1"))
    );
    let (code, v) = machine(args(&[
        &"check-proof",
        &fixture("grp.pres"),
        &fixture("swapped-trans.proof"),
    ]));
    assert_eq!(
        (code, v["error"].clone(), v["path"].clone()),
        (2, json!("RuleMismatch"), json!("root"))
    );
    let (code, _) = machine(args(&[
        &"check-proof",
        &fixture("grp.pres"),
        &fixture("chained-trans.proof"),
    ]));
    assert_eq!(code, 0);
    let garbled = scratch("garbled.proof");
    std::fs::write(&garbled, "(trans\n  (ax 0)\n  (ax 1\n").unwrap();
    let r = unialg(args(&[&"check-proof", &fixture("grp.pres"), &garbled]));
    assert_eq!(r.code, 1);
}

#[test]
fn prove_emits_checkable_scripts() {
    let out = scratch("ii.proof");
    let (code, v) = machine(args(&[
        &"prove",
        &fixture("grp.pres"),
        &"i(i(x1)) = x1 @1",
        &"--emit",
        &out,
    ]));
    assert_eq!((code, v["verdict"].clone()), (0, json!("Found")));
    let (code, v) = machine(args(&[&"check-proof", &fixture("grp.pres"), &out]));
    assert_eq!(
        (code, v["conclusion"].clone()),
        (0, json!("i(i(x1)) = x1 @1"))
    );

    let (code, v) = machine(args(&[&"prove", &fixture("grp.pres"), &"x1 = e @1"]));
    assert_eq!(code, 3);
    assert!(v["suggestion"].as_str().unwrap().contains("consequence"));

    let (code, v) = machine(args(&[&"prove", &fixture("grp.pres"), &"x1 = x1 @1"]));
    assert_eq!(
        (code, v["rule"].clone(), v["nodes"].clone()),
        (0, json!("refl"), json!(1))
    );
}

#[test]
fn finite_consequence_uses_extra_fixtures() {
    let goal = "m(x1,x2) = m(x2,x1) @2";
    let (code, v) = machine(args(&[
        &"--limits",
        &"max_model_size=3",
        &"consequence",
        &fixture("grp.pres"),
        &goal,
    ]));
    assert_eq!((code, v["verdict"].clone()), (3, json!("HoldsUpTo(3)")));
    let (code, v) = machine(args(&[
        &"--fixtures",
        &fixtures_dir(),
        &"consequence",
        &fixture("grp.pres"),
        &goal,
    ]));
    assert_eq!(
        (code, v["verdict"].clone(), v["countermodel"].clone()),
        (2, json!("Countermodel"), json!("s3"))
    );
    // The certificate replays offline through check-model.
    let saved = scratch("cm.alg");
    std::fs::write(&saved, v["algebra"].as_str().unwrap()).unwrap();
    let (code, _) = machine(args(&[&"check-model", &fixture("grp.pres"), &saved]));
    assert_eq!(code, 0);
    let alg = load_algebra(&saved, Some(&fixtures::group_signature())).unwrap();
    let eq = Equation::parse(&fixtures::group_signature(), goal).unwrap();
    assert!(!satisfies(&alg, &eq).unwrap());
}

#[test]
fn clone_consequence_verdicts() {
    let (code, v) = machine(args(&[
        &"consequence",
        &fixture("grp.pres"),
        &"m(e,x1) = x1 @1",
        &"--mode",
        &"clone",
    ]));
    assert_eq!((code, v["verdict"].clone()), (0, json!("Equal")));
    assert!(v["script"].as_str().is_some());
    let (code, v) = machine(args(&[
        &"consequence",
        &fixture("semilattice.pres"),
        &"x1 = x2 @2",
        &"--mode",
        &"clone",
    ]));
    assert_eq!(
        (code, v["verdict"].clone(), v["replays"].clone()),
        (2, json!("Separated"), json!(true))
    );
}

#[test]
fn free_model_exports_a_model() {
    let out = scratch("free2.alg");
    let (code, v) = machine(args(&[
        &"free-model",
        &fixture("semilattice.pres"),
        &"2",
        &"--emit",
        &out,
    ]));
    assert_eq!(
        (code, v["classes"].clone(), v["complete"].clone()),
        (0, json!(3), json!(true))
    );
    let (code, _) = machine(args(&[&"check-model", &fixture("semilattice.pres"), &out]));
    assert_eq!(code, 0);
    let (code, v) = machine(args(&[
        &"--limits",
        &"max_term_size=11",
        &"free-model",
        &fixture("semilattice.pres"),
        &"3",
    ]));
    assert_eq!((code, v["classes"].clone()), (0, json!(7)));
    let (code, v) = machine(args(&[
        &"--limits",
        &"max_term_size=4",
        &"free-model",
        &fixture("grp.pres"),
        &"1",
    ]));
    assert_eq!((code, v["complete"].clone()), (3, json!(false)));
}

#[test]
fn clone_subcommands() {
    let (code, v) = machine(args(&[
        &"clone",
        &"end",
        &"2",
        &"--arity-cap",
        &"2",
        &"--check-axioms",
    ]));
    assert_eq!(
        (code, v["carrier_sizes"].clone(), v["exhaustive"].clone()),
        (0, json!([2, 4, 16]), json!(true))
    );

    let out = scratch("sl.clone");
    let (code, v) = machine(args(&[
        &"clone",
        &"quotient",
        &fixture("semilattice.pres"),
        &"--arity-cap",
        &"2",
        &"--emit",
        &out,
    ]));
    assert_eq!((code, v["carrier_sizes"].clone()), (0, json!([0, 1, 3])));
    let (code, v) = machine(args(&[&"clone", &"axioms", &out]));
    assert_eq!((code, v["verdict"].clone()), (0, json!("Pass")));

    let (code, v) = machine(args(&[
        &"clone",
        &"generate",
        &fixture("z2.alg"),
        &"--arity-cap",
        &"2",
    ]));
    assert_eq!(
        (code, v["verdict"].clone(), v["carrier_sizes"].clone()),
        (0, json!("Match"), json!([1, 2, 4]))
    );

    let small = [
        &"--limits" as &dyn AsRef<std::ffi::OsStr>,
        &"max_term_size=5",
    ];
    let mut a = args(&small);
    a.extend(args(&[
        &"clone",
        &"hom",
        &fixture("grp.pres"),
        &fixture("z3.alg"),
    ]));
    let (code, v) = machine(a);
    assert_eq!(
        (code, v["verdict"].clone(), v["mismatches"].clone()),
        (0, json!("Factors"), json!([]))
    );
    let mut a = args(&small);
    a.extend(args(&[
        &"clone",
        &"hom",
        &fixture("grp.pres"),
        &fixture("broken.alg"),
    ]));
    let (code, v) = machine(a);
    assert_eq!(
        (code, v["verdict"].clone(), v["failing_axiom"].clone()),
        (2, json!("HypothesisViolated"), json!(0))
    );

    let (code, v) = machine(args(&[&"clone", &"kernel", &fixture("proj2.clone")]));
    assert_eq!((code, v["verdict"].clone()), (0, json!("Reproduces")));
    let (code, v) = machine(args(&[&"clone", &"embed", &fixture("semilattice.clone")]));
    assert_eq!(
        (code, v["injective"].clone()),
        (0, json!([true, true, true]))
    );
}

#[test]
fn human_and_machine_reports_agree() {
    let cases: Vec<Vec<std::ffi::OsString>> = vec![
        args(&[&"check-model", &fixture("grp.pres"), &fixture("broken.alg")]),
        args(&[&"prove", &fixture("grp.pres"), &"x1 = e @1"]),
        args(&[
            &"consequence",
            &fixture("semilattice.pres"),
            &"x1 = x2 @2",
            &"--mode",
            &"clone",
        ]),
        args(&[&"clone", &"embed", &fixture("proj2.clone")]),
    ];
    for a in cases {
        let human = unialg(a.clone());
        let (code, v) = machine(a);
        assert_eq!(human.code, code);
        assert!(human
            .stdout
            .contains(&format!("verdict: {}\n", v["verdict"].as_str().unwrap())));
    }
}

#[test]
fn exported_free_models_satisfy_their_presentation() {
    let out = scratch("free1.alg");
    machine(args(&[
        &"free-model",
        &fixture("semilattice.pres"),
        &"1",
        &"--emit",
        &out,
    ]));
    let alg = load_algebra(&out, Some(&fixtures::semilattice_signature())).unwrap();
    assert_eq!(alg.size(), 1);
    assert!(is_model(&alg, &fixtures::semilattice_presentation()).unwrap());
}

#[test]
fn timing_is_reported_on_request() {
    let (_, v) = machine(args(&[&"--timing", &"clone", &"end", &"2"]));
    assert!(v["elapsed_ms"].is_u64());
    let (_, v) = machine(args(&[&"clone", &"end", &"2"]));
    assert!(v.get("elapsed_ms").is_none());
}
