//! The commands behind the `unialg` binary. Each returns a [`Report`]; only
//! unreadable or ill-typed input is an error.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};
use unialg::algebra::{
    first_violation, index_tuple, interpret, semantic_consequence_with_fixtures, table_len,
    Consequence, FiniteAlgebra,
};
use unialg::clone::{
    check_clone_axioms, end_clone, extend_to_clone_hom, factor_through_quotient,
    factorization_mismatches, free_term_clone, generated_subclone, is_clone_hom,
    kernel_presentation, product_embedding, quotient_clone_in, AbstractClone, AxiomReport,
    CloneError, CloneVerdict, ExplicitClone,
};
use unialg::limits::Limits;
use unialg::logic::{check_proof, free_model_in, LogicError, Proof, Prover};
use unialg::term::{enum_terms, Equation, Presentation, Signature};

use crate::files::{
    algebra_to_text, load_algebra, load_clone, load_fixture_dir, load_presentation, load_proof,
    presentation_to_text, write_file, InputError,
};
use crate::report::{Outcome, Report};

/// Instance budget for clone-law checks; larger spaces are sampled.
pub const AXIOM_BUDGET: u64 = 1 << 22;
/// Instance budget when checking that a map of clones is a homomorphism.
pub const HOM_BUDGET: u64 = 20_000;
/// Largest term slice used to compare `h ∘ q` with `g`.
pub const HOM_SLICE: usize = 5;
/// Failing tuples listed per axiom; the count is always exact.
const LISTED_FAILURES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Finite,
    Clone,
}

/// Files loaded during one run, keyed by file stem, plus the global limits
/// and fixture directory.
#[derive(Debug, Default)]
pub struct Workspace {
    pub limits: Limits,
    pub fixtures: Option<PathBuf>,
    presentations: BTreeMap<String, Presentation>,
    algebras: BTreeMap<String, FiniteAlgebra>,
}

impl Workspace {
    pub fn new(limits: Limits, fixtures: Option<PathBuf>) -> Self {
        Self {
            limits,
            fixtures,
            ..Self::default()
        }
    }

    /// Loads a presentation; two different files may not share a name.
    pub fn presentation(&mut self, path: &Path) -> Result<Presentation, InputError> {
        let p = load_presentation(path)?;
        match self.presentations.get(p.name()) {
            Some(old) if *old != p => Err(InputError::Invalid(format!(
                "two presentations are named `{}`",
                p.name()
            ))),
            _ => {
                self.presentations.insert(p.name().to_string(), p.clone());
                Ok(p)
            }
        }
    }

    pub fn algebra(
        &mut self,
        path: &Path,
        sig: Option<&Signature>,
    ) -> Result<FiniteAlgebra, InputError> {
        let a = load_algebra(path, sig)?;
        match self.algebras.get(a.name()) {
            Some(old) if *old != a => Err(InputError::Invalid(format!(
                "two algebras are named `{}`",
                a.name()
            ))),
            _ => {
                self.algebras.insert(a.name().to_string(), a.clone());
                Ok(a)
            }
        }
    }

    /// Algebras from `--fixtures` over the presentation's signature.
    pub fn fixture_algebras(&mut self, sig: &Signature) -> Result<Vec<FiniteAlgebra>, InputError> {
        let Some(dir) = self.fixtures.clone() else {
            return Ok(Vec::new());
        };
        let algs = load_fixture_dir(&dir, sig)?;
        for a in &algs {
            self.algebras
                .entry(a.name().to_string())
                .or_insert_with(|| a.clone());
        }
        Ok(algs)
    }

    pub fn check_model(&mut self, pres: &Path, alg: &Path) -> Result<Report, InputError> {
        let pres = self.presentation(pres)?;
        let alg = self.algebra(alg, Some(pres.signature()))?;
        Ok(check_model_report(&pres, &alg))
    }

    pub fn check_proof(&mut self, pres: &Path, proof: &Path) -> Result<Report, InputError> {
        let pres = self.presentation(pres)?;
        let parsed = load_proof(proof, &pres)?;
        let checked = parsed.and_then(|p| check_proof(&pres, &p).map(|eq| (p, eq)));
        Ok(match checked {
            Ok((p, eq)) => Report::new("check-proof", "Accepted", Outcome::Affirmative)
                .with("conclusion", eq.to_string())
                .with("nodes", p.dag_size()),
            Err(e) => {
                let path = e
                    .path()
                    .map_or_else(|| "root".to_string(), ToString::to_string);
                let kind = format!("{e:?}")
                    .split([' ', '{'])
                    .next()
                    .unwrap_or("")
                    .to_string();
                Report::new("check-proof", "Rejected", Outcome::Refuted)
                    .with("error", kind)
                    .with("path", path)
                    .with("message", e.to_string())
            }
        })
    }

    pub fn prove(
        &mut self,
        pres: &Path,
        goal: &str,
        emit: Option<&Path>,
    ) -> Result<Report, InputError> {
        let pres = self.presentation(pres)?;
        let eq = parse_goal(&pres, goal)?;
        let mut prover = Prover::new(pres, self.limits);
        let report = prove_report(&mut prover, &eq);
        if let (Some(path), Some(Value::String(script))) = (emit, report.get("script")) {
            write_file(path, script)?;
        }
        Ok(report)
    }

    pub fn consequence(
        &mut self,
        pres: &Path,
        goal: &str,
        mode: Mode,
    ) -> Result<Report, InputError> {
        let pres = self.presentation(pres)?;
        let eq = parse_goal(&pres, goal)?;
        let extra = self.fixture_algebras(pres.signature())?;
        match mode {
            Mode::Finite => {
                finite_consequence_report(&pres, &eq, self.limits.max_model_size, &extra)
            }
            Mode::Clone => {
                clone_consequence_report(&mut Prover::new(pres, self.limits), &eq, &extra)
            }
        }
    }

    pub fn free_model(
        &mut self,
        pres: &Path,
        n: usize,
        emit: Option<&Path>,
    ) -> Result<Report, InputError> {
        let pres = self.presentation(pres)?;
        let report = free_model_report(&mut Prover::new(pres, self.limits), n)?;
        if let (Some(path), Some(Value::String(text))) = (emit, report.get("algebra")) {
            write_file(path, text)?;
        }
        Ok(report)
    }

    pub fn clone_end(
        &mut self,
        m: usize,
        cap: Option<usize>,
        check: bool,
    ) -> Result<Report, InputError> {
        let cap = cap.unwrap_or(self.limits.arity_cap);
        let c = end_clone(m, cap);
        let sizes: Vec<Value> = (0..=cap).map(|n| count_value(c.level_count(n))).collect();
        let mut r = Report::new("clone end", "Built", Outcome::Affirmative)
            .with("carrier", m)
            .with("arity_cap", cap)
            .with("carrier_sizes", sizes);
        if check {
            add_axiom_check(&mut r, &check_clone_axioms(&c, cap, AXIOM_BUDGET));
        }
        Ok(r)
    }

    pub fn clone_axioms(&mut self, file: &Path) -> Result<Report, InputError> {
        let c = load_clone(file)?;
        let cap = c.arity_cap();
        let mut r = Report::new("clone axioms", "Pass", Outcome::Affirmative)
            .with("arity_cap", cap)
            .with("carrier_sizes", c.carrier_sizes());
        add_axiom_check(&mut r, &check_clone_axioms(&c, cap, AXIOM_BUDGET));
        r.verdict = if r.outcome == Outcome::Affirmative {
            "Pass"
        } else {
            "Fail"
        }
        .into();
        Ok(r)
    }

    pub fn clone_hom(&mut self, pres: &Path, alg: &Path) -> Result<Report, InputError> {
        let pres = self.presentation(pres)?;
        let alg = self.algebra(alg, Some(pres.signature()))?;
        clone_hom_report(&mut Prover::new(pres, self.limits), &alg)
    }

    pub fn clone_quotient(
        &mut self,
        pres: &Path,
        cap: Option<usize>,
        check: bool,
        emit: Option<&Path>,
    ) -> Result<Report, InputError> {
        let pres = self.presentation(pres)?;
        let limits = self
            .limits
            .with_arity_cap(cap.unwrap_or(self.limits.arity_cap));
        let mut prover = Prover::new(pres, limits);
        let q = match quotient_clone_in(&mut prover) {
            Ok(q) => q,
            Err(e @ LogicError::UniverseTooLarge { .. }) => {
                return Ok(exhausted("clone quotient", &e))
            }
            Err(e) => return Err(e.into()),
        };
        let cap = limits.arity_cap;
        let complete: Vec<bool> = (0..=cap).map(|n| q.is_complete(n)).collect();
        let classes: Vec<Value> = (0..=cap)
            .map(|n| {
                let fm = q.level(n).expect("level within the cap");
                Value::from(
                    fm.representatives()
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let all_complete = complete.iter().all(|&c| c);
        let (verdict, outcome) = if all_complete {
            ("Complete", Outcome::Affirmative)
        } else {
            ("Incomplete", Outcome::Exhausted)
        };
        let mut r = Report::new("clone quotient", verdict, outcome)
            .with("presentation", q.presentation().name())
            .with("arity_cap", cap)
            .with("carrier_sizes", q.carrier_sizes())
            .with("complete", complete)
            .with("representatives", classes);
        if check && all_complete {
            add_axiom_check(&mut r, &check_clone_axioms(&q, cap, AXIOM_BUDGET));
        }
        if let Some(path) = emit {
            if !all_complete {
                return Err(InputError::Invalid(
                    "only a complete quotient can be written as a clone file".into(),
                ));
            }
            write_file(path, &ExplicitClone::tabulate(&q, cap)?.to_text()?)?;
        }
        Ok(r)
    }

    pub fn clone_generate(
        &mut self,
        alg: &Path,
        pres: Option<&Path>,
        budget: usize,
        emit: Option<&Path>,
    ) -> Result<Report, InputError> {
        let sig = pres
            .map(|p| self.presentation(p))
            .transpose()?
            .map(|p| p.signature().clone());
        let alg = self.algebra(alg, sig.as_ref())?;
        let report = generate_report(
            &alg,
            self.limits.arity_cap,
            self.limits.max_term_size,
            budget,
        )?;
        if let (Some(path), Some(Value::String(text))) = (emit, report.get("clone")) {
            write_file(path, text)?;
        }
        Ok(report)
    }

    pub fn clone_kernel(&mut self, file: &Path, size_budget: usize) -> Result<Report, InputError> {
        let s = self.source_clone(file)?;
        kernel_report(&s, size_budget)
    }

    pub fn clone_embed(&mut self, file: &Path) -> Result<Report, InputError> {
        let s = self.source_clone(file)?;
        embed_report(s)
    }

    /// A clone file, or the tabulated quotient of a presentation file.
    fn source_clone(&mut self, file: &Path) -> Result<ExplicitClone, InputError> {
        if file.extension().is_some_and(|e| e == "pres") {
            let pres = self.presentation(file)?;
            let mut prover = Prover::new(pres, self.limits);
            let q = quotient_clone_in(&mut prover)?;
            if let Some(n) = (0..=self.limits.arity_cap).find(|&n| !q.is_complete(n)) {
                return Err(InputError::Invalid(format!(
                    "the quotient is incomplete at arity {n}; raise max_term_size"
                )));
            }
            return Ok(ExplicitClone::tabulate(&q, self.limits.arity_cap)?);
        }
        load_clone(file)
    }
}

pub fn parse_goal(pres: &Presentation, goal: &str) -> Result<Equation, InputError> {
    Equation::parse(pres.signature(), goal)
        .map_err(|e| InputError::Invalid(format!("goal `{goal}`: {e}")))
}

fn exhausted(command: &str, e: &LogicError) -> Report {
    Report::new(command, "BudgetExhausted", Outcome::Exhausted).with("reason", e.to_string())
}

/// Exact counts as numbers when they fit, as strings otherwise.
fn count_value(c: Option<u128>) -> Value {
    match c.map(u64::try_from) {
        Some(Ok(v)) => v.into(),
        Some(Err(_)) => c.expect("some").to_string().into(),
        None => "overflow".into(),
    }
}

fn add_axiom_check(r: &mut Report, a: &AxiomReport) {
    let violations: Vec<String> = a
        .violations
        .iter()
        .take(10)
        .map(|v| format!("{}: {}", v.law, v.witness))
        .collect();
    r.field(
        "axioms",
        if a.passed() {
            "CA1 CA2 CA3 pass"
        } else {
            "fail"
        },
    )
    .field("instances", count_value(Some(a.instances)))
    .field("checked", a.checked)
    .field("skipped", a.skipped)
    .field("exhaustive", a.exhaustive)
    .field("violations", violations);
    if !a.passed() {
        r.outcome = Outcome::Refuted;
    }
}

/// Every tuple on which the two sides of `eq` differ, in row-major order.
pub fn failing_tuples(alg: &FiniteAlgebra, eq: &Equation) -> (usize, Vec<Vec<usize>>) {
    let (m, n) = (alg.size(), eq.context());
    let total = table_len(m, n).expect("axiom tables fit in memory");
    let mut listed = Vec::new();
    let mut count = 0;
    let mut tuple = Vec::with_capacity(n);
    for idx in 0..total {
        index_tuple(m, n, idx, &mut tuple);
        if alg.eval(eq.lhs().expr(), &tuple) != alg.eval(eq.rhs().expr(), &tuple) {
            count += 1;
            if listed.len() < LISTED_FAILURES {
                listed.push(tuple.clone());
            }
        }
    }
    (count, listed)
}

pub fn check_model_report(pres: &Presentation, alg: &FiniteAlgebra) -> Report {
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (i, ax) in pres.axioms().iter().enumerate() {
        let (count, listed) = failing_tuples(alg, ax);
        if count > 0 {
            failed.push(i);
        }
        rows.push(json!({"index": i, "axiom": ax.to_string(), "holds": count == 0, "failures": count, "failing": listed}));
    }
    let (verdict, outcome) = if failed.is_empty() {
        ("Pass", Outcome::Affirmative)
    } else {
        ("Fail", Outcome::Refuted)
    };
    Report::new("check-model", verdict, outcome)
        .with("presentation", pres.name())
        .with("algebra", alg.name())
        .with("carrier", alg.size())
        .with("failed_axioms", failed)
        .with("axioms", rows)
}

fn proof_fields(r: &mut Report, p: &Proof) {
    r.field("rule", p.rule().name())
        .field("nodes", p.dag_size())
        .field("script", p.to_script());
}

/// `prove` with a caller-owned prover, so many goals can share saturated
/// contexts.
pub fn prove_report(prover: &mut Prover, eq: &Equation) -> Report {
    match prover.prove(eq) {
        Some(p) => {
            let mut r = Report::new("prove", "Found", Outcome::Affirmative).with("goal", eq.to_string());
            proof_fields(&mut r, &p);
            r
        }
        None => Report::new("prove", "NotFound", Outcome::Exhausted)
            .with("goal", eq.to_string())
            .with("limits", prover.limits().to_string())
            .with(
                "suggestion",
                format!("no proof within the limits; run `unialg consequence {} \"{eq}\" --mode finite` to look for a countermodel", prover.presentation().name()),
            ),
    }
}

fn certificate_fields(r: &mut Report, alg: &FiniteAlgebra, assignment: &[usize]) {
    r.field("countermodel", alg.name())
        .field("assignment", assignment.to_vec())
        .field("algebra", algebra_to_text(alg));
}

pub fn finite_consequence_report(
    pres: &Presentation,
    eq: &Equation,
    max_size: usize,
    extra: &[FiniteAlgebra],
) -> Result<Report, InputError> {
    let mut r = match semantic_consequence_with_fixtures(pres, eq, max_size, extra)? {
        Consequence::Countermodel(alg) => {
            let assignment = first_violation(&alg, eq)?.expect("a countermodel violates the goal");
            let mut r = Report::new("consequence", "Countermodel", Outcome::Refuted);
            certificate_fields(&mut r, &alg, &assignment);
            r
        }
        Consequence::HoldsUpTo(k) => {
            Report::new("consequence", format!("HoldsUpTo({k})"), Outcome::Exhausted)
                .with("max_model_size", k)
        }
    };
    r.field("mode", "finite").field("goal", eq.to_string());
    Ok(r)
}

/// Clone-mode consequence with a caller-owned prover.
pub fn clone_consequence_report(
    prover: &mut Prover,
    eq: &Equation,
    extra: &[FiniteAlgebra],
) -> Result<Report, InputError> {
    let verdict = match unialg::clone::clone_semantic_consequence_in(prover, eq, extra) {
        Ok(v) => v,
        Err(CloneError::Logic(e @ LogicError::UniverseTooLarge { .. })) => {
            return Ok(exhausted("consequence", &e))
        }
        Err(e) => return Err(e.into()),
    };
    let mut r = match &verdict {
        CloneVerdict::Equal(p) => {
            let mut r = Report::new("consequence", "Equal", Outcome::Affirmative);
            proof_fields(&mut r, p);
            r
        }
        CloneVerdict::Separated(c) => {
            let mut r = Report::new("consequence", "Separated", Outcome::Refuted)
                .with("source", c.source.to_string());
            certificate_fields(&mut r, &c.algebra, &c.assignment);
            r.field("replays", c.replay(prover.presentation(), eq));
            r
        }
        CloneVerdict::Unknown => Report::new("consequence", "Unknown", Outcome::Exhausted)
            .with("limits", prover.limits().to_string()),
    };
    r.field("mode", "clone").field("goal", eq.to_string());
    Ok(r)
}

pub fn free_model_report(prover: &mut Prover, n: usize) -> Result<Report, InputError> {
    let fm = match free_model_in(prover, n) {
        Ok(fm) => fm,
        Err(e @ LogicError::UniverseTooLarge { .. }) => return Ok(exhausted("free-model", &e)),
        Err(e) => return Err(e.into()),
    };
    let (verdict, outcome) = if fm.is_complete() {
        ("Complete", Outcome::Affirmative)
    } else {
        ("Incomplete", Outcome::Exhausted)
    };
    let mut r = Report::new("free-model", verdict, outcome)
        .with("presentation", fm.presentation().name())
        .with("generators", n)
        .with("classes", fm.class_count())
        .with("complete", fm.is_complete())
        .with("universe", fm.universe_len())
        .with("rounds", fm.rounds())
        .with(
            "generator_classes",
            (1..=n).map(|i| fm.generator_class(i)).collect::<Vec<_>>(),
        )
        .with(
            "representatives",
            fm.representatives()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>(),
        );
    if let Some(alg) = fm.algebra() {
        r.field("algebra", algebra_to_text(alg));
    }
    Ok(r)
}

/// The clone model of `alg` through `T(Σ) -> End(A)` and its factorization
/// through the quotient clone.
pub fn clone_hom_report(prover: &mut Prover, alg: &FiniteAlgebra) -> Result<Report, InputError> {
    let pres = prover.presentation().clone();
    let cap = prover.limits().arity_cap;
    if let Some(s) = pres.signature().symbols().iter().find(|s| s.arity() > cap) {
        return Err(InputError::Invalid(format!(
            "{} has arity {} above the arity cap {cap}",
            s.name(),
            s.arity()
        )));
    }
    let q = match quotient_clone_in(prover) {
        Ok(q) => Arc::new(q),
        Err(e @ LogicError::UniverseTooLarge { .. }) => return Ok(exhausted("clone hom", &e)),
        Err(e) => return Err(e.into()),
    };
    let slice = HOM_SLICE.min(prover.limits().max_term_size);
    let source = Arc::new(free_term_clone(pres.signature(), slice, cap));
    let target = Arc::new(end_clone(alg.size(), cap));
    let g = extend_to_clone_hom(source, target, alg.tables().to_vec())?;
    let g_hom = is_clone_hom(&g, cap, HOM_BUDGET);
    let base = |verdict: &str, outcome| {
        Report::new("clone hom", verdict, outcome)
            .with("presentation", pres.name())
            .with("algebra", alg.name())
            .with("arity_cap", cap)
            .with("quotient_sizes", q.carrier_sizes())
            .with(
                "quotient_complete",
                (0..=cap).map(|n| q.is_complete(n)).collect::<Vec<_>>(),
            )
            .with("extension_is_hom", g_hom)
    };
    match factor_through_quotient(&g, q.clone()) {
        Ok(h) => {
            let mismatches = factorization_mismatches(&h, &g, cap)?;
            let h_hom = is_clone_hom(&h, cap, HOM_BUDGET);
            let ok = g_hom && h_hom && mismatches.is_empty();
            let (verdict, outcome) = if ok {
                ("Factors", Outcome::Affirmative)
            } else {
                ("Mismatch", Outcome::Refuted)
            };
            Ok(base(verdict, outcome)
                .with("factor_is_hom", h_hom)
                .with("slice_size", slice)
                .with(
                    "mismatches",
                    mismatches
                        .iter()
                        .take(10)
                        .map(|t| format!("{t} @{}", t.context()))
                        .collect::<Vec<_>>(),
                ))
        }
        Err(CloneError::HypothesisViolated { axiom }) => {
            let ax = &pres.axioms()[axiom];
            let witness = first_violation(alg, ax)?.unwrap_or_default();
            Ok(base("HypothesisViolated", Outcome::Refuted)
                .with("failing_axiom", axiom)
                .with("axiom", ax.to_string())
                .with("witness", witness))
        }
        Err(e) => Err(e.into()),
    }
}

/// The subclone of `End(A)` generated by the operations of `alg` up to
/// `cap`, cross-checked against the tables of all terms up to `term_size`.
pub fn generate_report(
    alg: &FiniteAlgebra,
    cap: usize,
    term_size: usize,
    budget: usize,
) -> Result<Report, InputError> {
    let m = alg.size();
    let kept: Vec<(&str, usize)> = alg
        .signature()
        .symbols()
        .iter()
        .filter(|s| s.arity() <= cap)
        .map(|s| (s.name(), s.arity()))
        .collect();
    let skipped: Vec<String> = alg
        .signature()
        .symbols()
        .iter()
        .filter(|s| s.arity() > cap)
        .map(ToString::to_string)
        .collect();
    let sig = Signature::from_symbols(kept)?;
    let alg = alg.reduct(&sig)?;
    let s = match generated_subclone(alg.tables(), m, cap, budget) {
        Ok(s) => s,
        Err(e @ CloneError::BudgetExceeded { .. }) => {
            return Ok(
                Report::new("clone generate", "BudgetExhausted", Outcome::Exhausted)
                    .with("reason", e.to_string()),
            )
        }
        Err(e) => return Err(e.into()),
    };
    let mut levels = Vec::new();
    let (mut missing, mut extra) = (false, false);
    for n in 0..=cap {
        let generated: HashSet<Vec<usize>> = s
            .carrier(n)?
            .iter()
            .map(|e| {
                s.function(e)
                    .expect("generated clones store tables")
                    .table()
                    .to_vec()
            })
            .collect();
        let mut interpreted = HashSet::new();
        for t in enum_terms(&sig, n, term_size) {
            interpreted.insert(interpret(&alg, &t)?.table().to_vec());
        }
        extra |= !interpreted.is_subset(&generated);
        missing |= interpreted.len() < generated.len();
        levels.push(
            json!({"arity": n, "generated": generated.len(), "interpreted": interpreted.len()}),
        );
    }
    let (verdict, outcome) = match (extra, missing) {
        (true, _) => ("Mismatch", Outcome::Refuted),
        (false, true) => ("TermSliceTooSmall", Outcome::Exhausted),
        (false, false) => ("Match", Outcome::Affirmative),
    };
    Ok(Report::new("clone generate", verdict, outcome)
        .with("algebra", alg.name())
        .with("arity_cap", cap)
        .with("term_size", term_size)
        .with("skipped_symbols", skipped)
        .with("carrier_sizes", s.carrier_sizes())
        .with("levels", levels)
        .with("clone", s.to_text()?))
}

pub fn kernel_report(s: &ExplicitClone, size_budget: usize) -> Result<Report, InputError> {
    let k = kernel_presentation(s, size_budget)?;
    let checks: Vec<Value> = k
        .checks
        .iter()
        .map(|c| {
            json!({"arity": c.arity, "classes": c.classes, "elements": c.elements, "sound": c.sound,
                   "injective": c.injective, "surjective": c.surjective, "complete": c.complete})
        })
        .collect();
    let (verdict, outcome) = if k.reproduces() {
        ("Reproduces", Outcome::Affirmative)
    } else {
        ("Differs", Outcome::Refuted)
    };
    Ok(Report::new("clone kernel", verdict, outcome)
        .with("size_budget", size_budget)
        .with("carrier_sizes", s.carrier_sizes())
        .with("kernel_axioms", k.presentation.axioms().len())
        .with("checks", checks)
        .with("presentation", presentation_to_text(&k.presentation)))
}

pub fn embed_report(s: ExplicitClone) -> Result<Report, InputError> {
    let cap = s.arity_cap();
    let e = product_embedding(Arc::new(s), cap)?;
    let rep = &e.report;
    let injective: Vec<bool> = (0..=cap).map(|n| rep.injective_at(n)).collect();
    let collisions: Vec<String> = rep
        .collisions
        .iter()
        .flatten()
        .take(10)
        .map(|(a, b)| format!("{a} ~ {b}"))
        .collect();
    let (verdict, outcome) = if rep.is_injective() {
        ("Injective", Outcome::Affirmative)
    } else {
        ("NotInjective", Outcome::Refuted)
    };
    Ok(Report::new("clone embed", verdict, outcome)
        .with("arity_cap", cap)
        .with("factor_sizes", e.hom.target().factor_sizes())
        .with("elements", rep.elements.clone())
        .with("injective", injective)
        .with("collisions", collisions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use unialg::fixtures;

    #[test]
    fn broken_group_fails_the_right_unit_at_one() {
        let r = check_model_report(&fixtures::group_presentation(), &fixtures::broken_group());
        assert_eq!(r.outcome, Outcome::Refuted);
        assert_eq!(r.get("failed_axioms").unwrap(), &json!([0]));
        assert_eq!(r.get("axioms").unwrap()[0]["failing"], json!([[1]]));
    }

    #[test]
    fn empty_presentations_accept_everything() {
        let pres = Presentation::new("Empty", fixtures::group_signature(), Vec::new()).unwrap();
        assert_eq!(
            check_model_report(&pres, &fixtures::broken_group()).outcome,
            Outcome::Affirmative
        );
    }

    #[test]
    fn failing_tuples_count_exactly() {
        // x1 ≈ e fails at every nonzero element of Z3.
        let eq = Equation::parse(&fixtures::group_signature(), "x1 = e @1").unwrap();
        assert_eq!(
            failing_tuples(&fixtures::z3(), &eq),
            (2, vec![vec![1], vec![2]])
        );
    }

    #[test]
    fn generated_clone_of_z2_is_linear() {
        let r = generate_report(&fixtures::z2(), 2, 7, 1 << 12).unwrap();
        assert_eq!(r.verdict, "Match");
        // Inversion is the identity in Z2, so the clone is the 2^n linear
        // maps over GF(2) at each arity.
        assert_eq!(r.get("carrier_sizes").unwrap(), &json!([1, 2, 4]));
    }

    #[test]
    fn counts_that_overflow_are_strings() {
        assert_eq!(count_value(Some(16)), json!(16));
        assert_eq!(
            count_value(Some(u128::from(u64::MAX) + 1)),
            json!("18446744073709551616")
        );
        assert_eq!(count_value(None), json!("overflow"));
    }
}
