//! Proof trees over the rules Ax, Refl, Sym, Trans and Cong, a checker, and
//! a parenthesized script syntax.
//!
//! Script grammar (whitespace-insensitive, `#` starts a line comment):
//!
//! ```text
//! P ::= (ax I)
//!     | (refl @N "t")
//!     | (sym P)
//!     | (trans P P)
//!     | (cong @K @N "s" "s2" P0 P1 ... PK)
//! ```
//!
//! Conclusions are not written; they are recomputed from the leaves.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::term::{
    is_identifier, match_expr, random_term, Equation, Presentation, Term, TermError,
};

/// Position of a node: child indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProofPath(pub Vec<usize>);

impl fmt::Display for ProofPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "root.{}", parts.join("."))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofError {
    #[error("invalid axiom reference {index} at {path}: {reason}")]
    InvalidAxiom {
        path: ProofPath,
        index: usize,
        reason: String,
    },
    #[error("rule mismatch at {path}: {reason}")]
    RuleMismatch { path: ProofPath, reason: String },
    #[error("context mismatch at {path}: {reason}")]
    ContextMismatch { path: ProofPath, reason: String },
    #[error("proof script syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

impl ProofError {
    /// The tree path of the offending node, when there is one.
    pub fn path(&self) -> Option<&ProofPath> {
        match self {
            ProofError::InvalidAxiom { path, .. }
            | ProofError::RuleMismatch { path, .. }
            | ProofError::ContextMismatch { path, .. } => Some(path),
            ProofError::Syntax { .. } => None,
        }
    }

    fn prefixed(self, step: usize) -> ProofError {
        let push = |p: ProofPath| {
            let mut v = vec![step];
            v.extend(p.0);
            ProofPath(v)
        };
        match self {
            ProofError::InvalidAxiom {
                path,
                index,
                reason,
            } => ProofError::InvalidAxiom {
                path: push(path),
                index,
                reason,
            },
            ProofError::RuleMismatch { path, reason } => ProofError::RuleMismatch {
                path: push(path),
                reason,
            },
            ProofError::ContextMismatch { path, reason } => ProofError::ContextMismatch {
                path: push(path),
                reason,
            },
            e @ ProofError::Syntax { .. } => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Cites the axiom with this index.
    Ax(usize),
    Refl,
    Sym,
    Trans,
    /// `s ≈ s2` in context `k`, with `k` further premises for the arguments.
    Cong {
        s: Term,
        s2: Term,
    },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Ax(_) => "ax",
            Rule::Refl => "refl",
            Rule::Sym => "sym",
            Rule::Trans => "trans",
            Rule::Cong { .. } => "cong",
        }
    }
}

#[derive(Debug)]
struct ProofNode {
    rule: Rule,
    conclusion: Equation,
    premises: Vec<Proof>,
}

/// A proof tree. Subproofs are shared, so a proof is stored as a DAG.
#[derive(Clone)]
pub struct Proof(Arc<ProofNode>);

impl Proof {
    /// Builds a node with an explicit conclusion; nothing is validated.
    pub fn from_parts(rule: Rule, conclusion: Equation, premises: Vec<Proof>) -> Proof {
        Proof(Arc::new(ProofNode {
            rule,
            conclusion,
            premises,
        }))
    }

    pub fn ax(pres: &Presentation, index: usize) -> Result<Proof, ProofError> {
        let ax = pres
            .axioms()
            .get(index)
            .ok_or_else(|| ProofError::InvalidAxiom {
                path: ProofPath::default(),
                index,
                reason: format!("the presentation has {} axiom(s)", pres.axioms().len()),
            })?;
        Ok(Proof::from_parts(Rule::Ax(index), ax.clone(), Vec::new()))
    }

    pub fn refl(t: Term) -> Proof {
        let eq = Equation::new(t.clone(), t).expect("same context");
        Proof::from_parts(Rule::Refl, eq, Vec::new())
    }

    pub fn sym(p: Proof) -> Proof {
        let eq = p.conclusion().flipped();
        Proof::from_parts(Rule::Sym, eq, vec![p])
    }

    /// Concludes `p.lhs ≈ q.rhs`. The junction `p.rhs = q.lhs` is left to
    /// [`check_proof`].
    pub fn trans(p: Proof, q: Proof) -> Result<Proof, ProofError> {
        let eq = Equation::new(p.lhs().clone(), q.rhs().clone()).map_err(|_| {
            ProofError::ContextMismatch {
                path: ProofPath::default(),
                reason: format!(
                    "premises live in contexts {} and {}",
                    p.context(),
                    q.context()
                ),
            }
        })?;
        Ok(Proof::from_parts(Rule::Trans, eq, vec![p, q]))
    }

    /// Concludes `s[t] ≈ s2[t2]` in context `n` from `outer: s ≈ s2` and
    /// `args[j]: t_j ≈ t2_j`.
    pub fn cong(
        s: Term,
        s2: Term,
        n: usize,
        outer: Proof,
        args: Vec<Proof>,
    ) -> Result<Proof, ProofError> {
        let mismatch = |reason: String| ProofError::ContextMismatch {
            path: ProofPath::default(),
            reason,
        };
        if s.context() != s2.context() {
            return Err(mismatch(format!(
                "outer terms live in contexts {} and {}",
                s.context(),
                s2.context()
            )));
        }
        if args.len() != s.context() {
            return Err(ProofError::RuleMismatch {
                path: ProofPath::default(),
                reason: format!(
                    "cong over context {} needs {} argument premise(s), got {}",
                    s.context(),
                    s.context(),
                    args.len()
                ),
            });
        }
        if let Some((j, a)) = args.iter().enumerate().find(|(_, a)| a.context() != n) {
            return Err(mismatch(format!(
                "argument premise {} lives in context {}, expected {n}",
                j + 1,
                a.context()
            )));
        }
        let lhs: Vec<Term> = args.iter().map(|a| a.lhs().clone()).collect();
        let rhs: Vec<Term> = args.iter().map(|a| a.rhs().clone()).collect();
        let conclusion =
            Equation::new(subst(&s, n, &lhs), subst(&s2, n, &rhs)).expect("same context");
        let mut premises = Vec::with_capacity(args.len() + 1);
        premises.push(outer);
        premises.extend(args);
        Ok(Proof::from_parts(
            Rule::Cong { s, s2 },
            conclusion,
            premises,
        ))
    }

    pub fn rule(&self) -> &Rule {
        &self.0.rule
    }

    pub fn conclusion(&self) -> &Equation {
        &self.0.conclusion
    }

    pub fn premises(&self) -> &[Proof] {
        &self.0.premises
    }

    pub fn lhs(&self) -> &Term {
        self.0.conclusion.lhs()
    }

    pub fn rhs(&self) -> &Term {
        self.0.conclusion.rhs()
    }

    pub fn context(&self) -> usize {
        self.0.conclusion.context()
    }

    fn key(&self) -> *const ProofNode {
        Arc::as_ptr(&self.0)
    }

    /// Number of distinct nodes in the shared representation.
    pub fn dag_size(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(p) = stack.pop() {
            if seen.insert(p.key()) {
                stack.extend(p.premises());
            }
        }
        seen.len()
    }

    /// Number of nodes when written out as a tree, saturating.
    pub fn tree_size(&self) -> u64 {
        fn go(p: &Proof, memo: &mut HashMap<*const ProofNode, u64>) -> u64 {
            if let Some(&n) = memo.get(&p.key()) {
                return n;
            }
            let n = p
                .premises()
                .iter()
                .fold(1u64, |acc, q| acc.saturating_add(go(q, memo)));
            memo.insert(p.key(), n);
            n
        }
        go(self, &mut HashMap::new())
    }

    /// Renders the proof as a script. Subproofs used more than once are
    /// written once as `(def dN ...)` before the root and referred to by name.
    pub fn to_script(&self) -> String {
        let mut uses: HashMap<*const ProofNode, usize> = HashMap::new();
        let mut order = Vec::new();
        let mut stack = vec![(self, false)];
        while let Some((p, expanded)) = stack.pop() {
            if expanded {
                order.push(p);
                continue;
            }
            let count = uses.entry(p.key()).or_insert(0);
            *count += 1;
            if *count == 1 {
                stack.push((p, true));
                stack.extend(p.premises().iter().rev().map(|q| (q, false)));
            }
        }
        let mut names = HashMap::new();
        let mut out = String::new();
        for p in order {
            if p.key() != self.key() && uses[&p.key()] > 1 && !matches!(p.rule(), Rule::Ax(_)) {
                let name = format!("d{}", names.len() + 1);
                let _ = write!(out, "(def {name}\n  ");
                p.write_script(&mut out, 2, &names);
                out.push_str(")\n");
                names.insert(p.key(), name);
            }
        }
        self.write_script(&mut out, 0, &names);
        out
    }

    fn write_script(
        &self,
        out: &mut String,
        indent: usize,
        names: &HashMap<*const ProofNode, String>,
    ) {
        let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n(' ', k));
        let premises = |out: &mut String| {
            for p in self.premises() {
                out.push('\n');
                pad(out, indent + 2);
                match names.get(&p.key()) {
                    Some(name) => out.push_str(name),
                    None => p.write_script(out, indent + 2, names),
                }
            }
            out.push(')');
        };
        match self.rule() {
            Rule::Ax(i) => {
                let _ = write!(out, "(ax {i})");
            }
            Rule::Refl => {
                let _ = write!(out, "(refl @{} \"{}\")", self.context(), self.lhs());
            }
            Rule::Sym | Rule::Trans => {
                let _ = write!(out, "({}", self.rule().name());
                premises(out);
            }
            Rule::Cong { s, s2 } => {
                let _ = write!(
                    out,
                    "(cong @{} @{} \"{}\" \"{}\"",
                    s.context(),
                    self.context(),
                    s,
                    s2
                );
                premises(out);
            }
        }
    }
}

impl fmt::Debug for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.rule().name(), self.conclusion())
    }
}

fn subst(s: &Term, n: usize, ts: &[Term]) -> Term {
    s.subst_at(n, ts).expect("arity and contexts checked")
}

/// Validates every node and returns the root conclusion.
pub fn check_proof(pres: &Presentation, p: &Proof) -> Result<Equation, ProofError> {
    let mut ok = HashSet::new();
    check_node(pres, p, &mut ok)?;
    Ok(p.conclusion().clone())
}

/// Checks many proofs, sharing the memo of already verified nodes.
#[derive(Default)]
pub(crate) struct ProofChecker {
    ok: HashSet<*const ProofNode>,
    // Keeps checked nodes alive so their addresses stay unique.
    held: Vec<Proof>,
}

impl ProofChecker {
    pub(crate) fn check(&mut self, pres: &Presentation, p: &Proof) -> Result<Equation, ProofError> {
        check_node(pres, p, &mut self.ok)?;
        self.held.push(p.clone());
        Ok(p.conclusion().clone())
    }
}

fn check_node(
    pres: &Presentation,
    p: &Proof,
    ok: &mut HashSet<*const ProofNode>,
) -> Result<(), ProofError> {
    if ok.contains(&p.key()) {
        return Ok(());
    }
    for (i, q) in p.premises().iter().enumerate() {
        check_node(pres, q, ok).map_err(|e| e.prefixed(i))?;
    }
    check_local(pres, p)?;
    ok.insert(p.key());
    Ok(())
}

fn check_local(pres: &Presentation, p: &Proof) -> Result<(), ProofError> {
    let here = ProofPath::default;
    let rule_err = |reason: String| ProofError::RuleMismatch {
        path: here(),
        reason,
    };
    let ctx_err = |reason: String| ProofError::ContextMismatch {
        path: here(),
        reason,
    };
    let eq = p.conclusion();
    eq.check_over(pres.signature())
        .map_err(|e: TermError| rule_err(format!("conclusion is not over the signature: {e}")))?;
    let expect_premises = |k: usize| {
        if p.premises().len() == k {
            Ok(())
        } else {
            Err(rule_err(format!(
                "{} takes {k} premise(s), got {}",
                p.rule().name(),
                p.premises().len()
            )))
        }
    };
    match p.rule() {
        Rule::Ax(index) => {
            expect_premises(0)?;
            let ax = pres
                .axioms()
                .get(*index)
                .ok_or_else(|| ProofError::InvalidAxiom {
                    path: here(),
                    index: *index,
                    reason: format!("the presentation has {} axiom(s)", pres.axioms().len()),
                })?;
            if ax != eq {
                return Err(ProofError::InvalidAxiom {
                    path: here(),
                    index: *index,
                    reason: format!("axiom {index} is `{ax}`, not `{eq}`"),
                });
            }
        }
        Rule::Refl => {
            expect_premises(0)?;
            if eq.lhs() != eq.rhs() {
                return Err(rule_err(format!("refl needs identical sides, got `{eq}`")));
            }
        }
        Rule::Sym => {
            expect_premises(1)?;
            let q = p.premises()[0].conclusion();
            if q.context() != eq.context() {
                return Err(ctx_err(format!(
                    "premise is in context {}, conclusion in {}",
                    q.context(),
                    eq.context()
                )));
            }
            if q.flipped() != *eq {
                return Err(rule_err(format!("sym of `{q}` cannot conclude `{eq}`")));
            }
        }
        Rule::Trans => {
            expect_premises(2)?;
            let (a, b) = (p.premises()[0].conclusion(), p.premises()[1].conclusion());
            if a.context() != eq.context() || b.context() != eq.context() {
                return Err(ctx_err(format!(
                    "premises are in contexts {} and {}, conclusion in {}",
                    a.context(),
                    b.context(),
                    eq.context()
                )));
            }
            if a.rhs() != b.lhs() {
                return Err(rule_err(format!(
                    "premises do not chain: `{}` then `{}`",
                    a.rhs(),
                    b.lhs()
                )));
            }
            if a.lhs() != eq.lhs() || b.rhs() != eq.rhs() {
                return Err(rule_err(format!(
                    "trans of `{a}` and `{b}` cannot conclude `{eq}`"
                )));
            }
        }
        Rule::Cong { s, s2 } => {
            let k = s.context();
            if s2.context() != k {
                return Err(ctx_err(format!(
                    "outer terms live in contexts {k} and {}",
                    s2.context()
                )));
            }
            s.check_over(pres.signature())
                .and_then(|_| s2.check_over(pres.signature()))
                .map_err(|e| rule_err(format!("outer term is not over the signature: {e}")))?;
            expect_premises(k + 1)?;
            let outer = p.premises()[0].conclusion();
            if outer.context() != k {
                return Err(ctx_err(format!(
                    "outer premise is in context {}, expected {k}",
                    outer.context()
                )));
            }
            if outer.lhs() != s || outer.rhs() != s2 {
                return Err(rule_err(format!(
                    "outer premise proves `{outer}`, not `{s} = {s2} @{k}`"
                )));
            }
            let n = eq.context();
            let args = &p.premises()[1..];
            if let Some((j, a)) = args.iter().enumerate().find(|(_, a)| a.context() != n) {
                return Err(ctx_err(format!(
                    "argument premise {} is in context {}, conclusion in {n}",
                    j + 1,
                    a.context()
                )));
            }
            let lhs: Vec<Term> = args.iter().map(|a| a.lhs().clone()).collect();
            let rhs: Vec<Term> = args.iter().map(|a| a.rhs().clone()).collect();
            let (l, r) = (subst(s, n, &lhs), subst(s2, n, &rhs));
            if l != *eq.lhs() || r != *eq.rhs() {
                return Err(rule_err(format!(
                    "cong yields `{l} = {r} @{n}`, not `{eq}`"
                )));
            }
        }
    }
    Ok(())
}

/// Parses a script and recomputes every conclusion. The result still needs
/// [`check_proof`]; structural problems that prevent computing a conclusion
/// are reported here with their path.
pub fn parse_script(pres: &Presentation, text: &str) -> Result<Proof, ProofError> {
    let mut lexer = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut defs = HashMap::new();
    loop {
        let tree = lexer.sexpr()?;
        lexer.skip();
        let def = match &tree {
            Sx::List(_, items) => match items.as_slice() {
                [Sx::Atom(_, head), rest @ ..] if head == "def" => Some(rest),
                _ => None,
            },
            _ => None,
        };
        let Some(rest) = def else {
            if lexer.pos != lexer.src.len() {
                return Err(ProofError::Syntax {
                    pos: lexer.pos,
                    msg: "trailing input after the proof".into(),
                });
            }
            return elaborate(pres, &tree, &defs);
        };
        let [Sx::Atom(p, name), body] = rest else {
            return Err(syntax(tree.pos(), "expected `(def NAME PROOF)`"));
        };
        if !is_identifier(name) || defs.contains_key(name) {
            return Err(syntax(
                *p,
                format!("bad or repeated definition name `{name}`"),
            ));
        }
        let proof = elaborate(pres, body, &defs)?;
        defs.insert(name.clone(), proof);
        if lexer.pos == lexer.src.len() {
            return Err(syntax(lexer.pos, "a script must end with a proof"));
        }
    }
}

#[derive(Debug)]
enum Sx {
    Atom(usize, String),
    Str(usize, String),
    List(usize, Vec<Sx>),
}

impl Sx {
    fn pos(&self) -> usize {
        match self {
            Sx::Atom(p, _) | Sx::Str(p, _) | Sx::List(p, _) => *p,
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Lexer<'_> {
    fn skip(&mut self) {
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.src.get(self.pos) == Some(&b'#') {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn err(&self, msg: &str) -> ProofError {
        ProofError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn sexpr(&mut self) -> Result<Sx, ProofError> {
        self.skip();
        let start = self.pos;
        match self.src.get(self.pos) {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip();
                    match self.src.get(self.pos) {
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Sx::List(start, items));
                        }
                        None => return Err(self.err("unclosed `(`")),
                        _ => items.push(self.sexpr()?),
                    }
                }
            }
            Some(b')') => Err(self.err("unexpected `)`")),
            Some(b'"') => {
                self.pos += 1;
                let s = self.pos;
                while self.pos < self.src.len() && self.src[self.pos] != b'"' {
                    self.pos += 1;
                }
                if self.pos == self.src.len() {
                    return Err(ProofError::Syntax {
                        pos: start,
                        msg: "unterminated string".into(),
                    });
                }
                let text = String::from_utf8_lossy(&self.src[s..self.pos]).into_owned();
                self.pos += 1;
                Ok(Sx::Str(start, text))
            }
            Some(_) => {
                while self.pos < self.src.len()
                    && !self.src[self.pos].is_ascii_whitespace()
                    && !b"()\"".contains(&self.src[self.pos])
                {
                    self.pos += 1;
                }
                Ok(Sx::Atom(
                    start,
                    String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(),
                ))
            }
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> ProofError {
    ProofError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn context_atom(sx: &Sx) -> Result<usize, ProofError> {
    match sx {
        Sx::Atom(p, a) => a
            .strip_prefix('@')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| syntax(*p, format!("expected a context `@N`, found `{a}`"))),
        other => Err(syntax(other.pos(), "expected a context `@N`")),
    }
}

fn term_str(pres: &Presentation, n: usize, sx: &Sx) -> Result<Term, ProofError> {
    match sx {
        Sx::Str(p, s) => Term::parse(pres.signature(), n, s)
            .map_err(|e| syntax(*p, format!("bad term \"{s}\": {e}"))),
        other => Err(syntax(other.pos(), "expected a quoted term")),
    }
}

fn elaborate(
    pres: &Presentation,
    sx: &Sx,
    defs: &HashMap<String, Proof>,
) -> Result<Proof, ProofError> {
    if let Sx::Atom(p, name) = sx {
        return defs
            .get(name)
            .cloned()
            .ok_or_else(|| syntax(*p, format!("undefined proof name `{name}`")));
    }
    let Sx::List(pos, items) = sx else {
        return Err(syntax(sx.pos(), "expected `(rule ...)`"));
    };
    let Some(Sx::Atom(_, head)) = items.first() else {
        return Err(syntax(*pos, "expected a rule name"));
    };
    let rest = &items[1..];
    let arity = |k: usize| {
        if rest.len() == k {
            Ok(())
        } else {
            Err(ProofError::RuleMismatch {
                path: ProofPath::default(),
                reason: format!("`{head}` takes {k} argument(s), got {}", rest.len()),
            })
        }
    };
    let sub = |i: usize, s: &Sx| elaborate(pres, s, defs).map_err(|e| e.prefixed(i));
    match head.as_str() {
        "ax" => {
            arity(1)?;
            let index = match &rest[0] {
                Sx::Atom(p, a) => a
                    .parse::<usize>()
                    .map_err(|_| syntax(*p, format!("bad axiom index `{a}`")))?,
                other => return Err(syntax(other.pos(), "expected an axiom index")),
            };
            Proof::ax(pres, index)
        }
        "refl" => {
            arity(2)?;
            let n = context_atom(&rest[0])?;
            Ok(Proof::refl(term_str(pres, n, &rest[1])?))
        }
        "sym" => {
            arity(1)?;
            Ok(Proof::sym(sub(0, &rest[0])?))
        }
        "trans" => {
            arity(2)?;
            Proof::trans(sub(0, &rest[0])?, sub(1, &rest[1])?)
        }
        "cong" => {
            if rest.len() < 5 {
                return Err(ProofError::RuleMismatch {
                    path: ProofPath::default(),
                    reason: "cong needs @K @N \"s\" \"s2\" and premises".into(),
                });
            }
            let k = context_atom(&rest[0])?;
            let n = context_atom(&rest[1])?;
            let s = term_str(pres, k, &rest[2])?;
            let s2 = term_str(pres, k, &rest[3])?;
            let premises = rest[4..]
                .iter()
                .enumerate()
                .map(|(i, p)| sub(i, p))
                .collect::<Result<Vec<_>, _>>()?;
            let mut it = premises.into_iter();
            let outer = it.next().expect("at least one premise");
            Proof::cong(s, s2, n, outer, it.collect())
        }
        other => Err(syntax(items[0].pos(), format!("unknown rule `{other}`"))),
    }
}

/// A random proof in context `n` whose conclusion starts from a random term;
/// every node is a valid rule instance by construction. Used to exercise
/// soundness.
pub fn random_proof<R: Rng + ?Sized>(
    pres: &Presentation,
    n: usize,
    max_size: usize,
    depth: usize,
    rng: &mut R,
) -> Option<Proof> {
    let t = random_term(pres.signature(), n, max_size, rng)?;
    let start = if depth > 0 && rng.gen_bool(0.3) {
        general_cong(pres, &t, max_size, depth, rng).unwrap_or_else(|| Proof::refl(t.clone()))
    } else {
        rewrite_from(pres, t, max_size, depth, rng)
    };
    let tail = rewrite_from(
        pres,
        start.rhs().clone(),
        max_size,
        depth.saturating_sub(1),
        rng,
    );
    Some(Proof::trans(start, tail).expect("same context"))
}

/// A random proof with left-hand side `t`.
fn rewrite_from<R: Rng + ?Sized>(
    pres: &Presentation,
    t: Term,
    max_size: usize,
    depth: usize,
    rng: &mut R,
) -> Proof {
    if depth == 0 {
        return root_step(pres, &t, max_size, rng).unwrap_or_else(|| Proof::refl(t));
    }
    match rng.gen_range(0..5) {
        0 => Proof::refl(t),
        1 => {
            let p = rewrite_from(pres, t, max_size, depth - 1, rng);
            let q = rewrite_from(pres, p.rhs().clone(), max_size, depth - 1, rng);
            Proof::trans(p, q).expect("same context")
        }
        2 => {
            // A detour `t ≈ u ≈ t` through sym.
            let p = rewrite_from(pres, t, max_size, depth - 1, rng);
            Proof::trans(p.clone(), Proof::sym(p)).expect("same context")
        }
        3 => match t.symbol() {
            Some(sym) => {
                let g = Term::generic(sym);
                let args = t
                    .args()
                    .into_iter()
                    .map(|a| rewrite_from(pres, a, max_size, depth - 1, rng))
                    .collect();
                Proof::cong(g.clone(), g.clone(), t.context(), Proof::refl(g), args)
                    .expect("well-formed")
            }
            None => Proof::refl(t),
        },
        _ => root_step(pres, &t, max_size, rng).unwrap_or_else(|| Proof::refl(t)),
    }
}

/// An axiom applied at the root of `t` in either direction, when one matches.
fn root_step<R: Rng + ?Sized>(
    pres: &Presentation,
    t: &Term,
    max_size: usize,
    rng: &mut R,
) -> Option<Proof> {
    let n = t.context();
    let mut options = Vec::new();
    for (i, ax) in pres.axioms().iter().enumerate() {
        for flip in [false, true] {
            let (l, _) = if flip {
                (ax.rhs(), ax.lhs())
            } else {
                (ax.lhs(), ax.rhs())
            };
            let mut b = vec![None; ax.context()];
            if match_expr(l.expr(), t.expr(), &mut b) {
                options.push((i, flip, b));
            }
        }
    }
    if options.is_empty() {
        return None;
    }
    let (i, flip, b) = options.swap_remove(rng.gen_range(0..options.len()));
    let ax = Proof::ax(pres, i).expect("index in range");
    let ax = if flip { Proof::sym(ax) } else { ax };
    let ts: Vec<Term> = b
        .into_iter()
        .map(|e| match e {
            Some(e) => Term::from_expr(n, e).expect("subterm of t"),
            None => random_term(pres.signature(), n, (max_size / 3).max(1), rng)
                .unwrap_or_else(|| t.clone()),
        })
        .collect();
    let (s, s2) = (ax.lhs().clone(), ax.rhs().clone());
    let args = ts.into_iter().map(Proof::refl).collect();
    Some(Proof::cong(s, s2, n, ax, args).expect("well-formed"))
}

/// Cong with a random outer proof over a small context, applied to random
/// argument proofs in the context of `t`.
fn general_cong<R: Rng + ?Sized>(
    pres: &Presentation,
    t: &Term,
    max_size: usize,
    depth: usize,
    rng: &mut R,
) -> Option<Proof> {
    let n = t.context();
    let k = rng.gen_range(0..=2usize);
    let s = random_term(pres.signature(), k, (max_size / 2).max(1), rng)?;
    let outer = rewrite_from(pres, s, max_size, depth - 1, rng);
    let args = (0..k)
        .map(|_| {
            let a = random_term(pres.signature(), n, (max_size / 2).max(1), rng)
                .unwrap_or_else(|| t.clone());
            rewrite_from(pres, a, max_size, depth - 1, rng)
        })
        .collect();
    let (s, s2) = (outer.lhs().clone(), outer.rhs().clone());
    Proof::cong(s, s2, n, outer, args).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::satisfies;
    use crate::fixtures;
    use rand::SeedableRng;

    fn grp() -> Presentation {
        fixtures::group_presentation()
    }

    fn t(n: usize, s: &str) -> Term {
        Term::parse(grp().signature(), n, s).unwrap()
    }

    #[test]
    fn single_axiom() {
        let p = Proof::ax(&grp(), 0).unwrap();
        assert_eq!(
            check_proof(&grp(), &p).unwrap().to_string(),
            "m(x1,e) = x1 @1"
        );
        assert!(matches!(
            Proof::ax(&grp(), 3),
            Err(ProofError::InvalidAxiom { index: 3, .. })
        ));
    }

    #[test]
    fn refl_is_valid() {
        let p = Proof::refl(t(2, "m(x1,i(x2))"));
        assert_eq!(
            check_proof(&grp(), &p).unwrap().to_string(),
            "m(x1,i(x2)) = m(x1,i(x2)) @2"
        );
    }

    #[test]
    fn cong_with_mismatched_contexts() {
        let s = t(2, "m(x1,x2)");
        let bad = Proof::from_parts(
            Rule::Cong {
                s: s.clone(),
                s2: s.clone(),
            },
            Equation::parse(grp().signature(), "m(x1,m(x1,e)) = m(x1,x1) @2").unwrap(),
            vec![
                Proof::refl(s),
                Proof::refl(t(2, "x1")),
                Proof::ax(&grp(), 0).unwrap(),
            ],
        );
        let err = check_proof(&grp(), &bad).unwrap_err();
        assert!(
            matches!(err, ProofError::ContextMismatch { ref path, .. } if path.0.is_empty()),
            "{err}"
        );
    }

    #[test]
    fn swapped_trans_premises() {
        let pres = grp();
        let back = Proof::sym(Proof::ax(&pres, 0).unwrap());
        let m = t(1, "m(x1,e)");
        let grow = Proof::cong(
            m.clone(),
            m,
            1,
            Proof::refl(t(1, "m(x1,e)")),
            vec![back.clone()],
        )
        .unwrap();
        let good = Proof::trans(back.clone(), grow.clone()).unwrap();
        assert_eq!(
            check_proof(&pres, &good).unwrap().to_string(),
            "x1 = m(m(x1,e),e) @1"
        );
        let swapped = Proof::sym(Proof::trans(grow, back).unwrap());
        let err = check_proof(&pres, &swapped).unwrap_err();
        assert!(matches!(err, ProofError::RuleMismatch { .. }));
        assert_eq!(err.path().unwrap().to_string(), "root.0");
    }

    #[test]
    fn forged_axiom_is_rejected() {
        let eq = Equation::parse(grp().signature(), "m(e,x1) = x1 @1").unwrap();
        let p = Proof::from_parts(Rule::Ax(0), eq, vec![]);
        assert!(matches!(
            check_proof(&grp(), &p),
            Err(ProofError::InvalidAxiom { index: 0, .. })
        ));
    }

    #[test]
    fn script_round_trip() {
        let pres = grp();
        let ax = Proof::ax(&pres, 0).unwrap();
        let inst = Proof::cong(
            ax.lhs().clone(),
            ax.rhs().clone(),
            2,
            ax,
            vec![Proof::refl(t(2, "i(x2)"))],
        )
        .unwrap();
        let p = Proof::trans(inst.clone(), Proof::sym(inst)).unwrap();
        let script = p.to_script();
        let q = parse_script(&pres, &script).unwrap();
        assert_eq!(q.to_script(), script);
        assert_eq!(check_proof(&pres, &q).unwrap(), *p.conclusion());
    }

    #[test]
    fn script_errors() {
        let pres = grp();
        assert!(matches!(
            parse_script(&pres, "(ax 7)"),
            Err(ProofError::InvalidAxiom { index: 7, .. })
        ));
        assert!(matches!(
            parse_script(&pres, "(ax 1"),
            Err(ProofError::Syntax { .. })
        ));
        assert!(matches!(
            parse_script(&pres, "(frob 1)"),
            Err(ProofError::Syntax { .. })
        ));
        assert!(matches!(
            parse_script(&pres, "(trans (ax 0) (ax 2))"),
            Err(ProofError::ContextMismatch { .. })
        ));
        let err = parse_script(&pres, "(sym (trans (ax 0) (ax 9)))").unwrap_err();
        assert_eq!(err.path().unwrap().to_string(), "root.0.1");
        let p = parse_script(&pres, "# comment\n(refl @1 \"i(x1)\")").unwrap();
        assert!(check_proof(&pres, &p).is_ok());
    }

    #[test]
    fn shared_subproofs_become_definitions() {
        let pres = grp();
        let a = Proof::sym(Proof::ax(&pres, 0).unwrap());
        let p = Proof::trans(Proof::sym(a.clone()), a).unwrap();
        let script = p.to_script();
        assert!(script.starts_with("(def d1\n  (sym\n"), "{script}");
        let q = parse_script(&pres, &script).unwrap();
        assert_eq!(q.dag_size(), p.dag_size());
        assert_eq!(q.to_script(), script);
        assert!(matches!(
            parse_script(&pres, "(sym d9)"),
            Err(ProofError::Syntax { .. })
        ));
        assert!(matches!(
            parse_script(&pres, "(def d1 (ax 0))"),
            Err(ProofError::Syntax { .. })
        ));
        assert!(matches!(
            parse_script(&pres, "(def d1 (ax 0)) (def d1 (ax 1)) d1"),
            Err(ProofError::Syntax { .. })
        ));
        assert!(parse_script(&pres, "(def d1 (ax 0)) (trans d1 (sym d1))").is_ok());
    }

    #[test]
    fn random_proofs_are_accepted_and_sound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pres = grp();
        let models = [fixtures::z2(), fixtures::z3(), fixtures::s3()];
        for i in 0..200 {
            let p = random_proof(&pres, i % 3, 7, 3, &mut rng).unwrap();
            let eq = check_proof(&pres, &p).unwrap_or_else(|e| panic!("{e}\n{}", p.to_script()));
            for m in &models {
                assert!(satisfies(m, &eq).unwrap(), "{eq} fails in {}", m.name());
            }
        }
    }
}
