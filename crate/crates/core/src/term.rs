//! Signatures, context-indexed terms, equations, and presentations.
//!
//! A [`Term`] lives in a fixed context of `n` variables `x1..xn`; `x1` in
//! context 1 and `x1` in context 2 are different terms. Variables are
//! positional, so structural equality is the only term equality.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graded::GradedSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("variable x{index} is out of context {context}")]
    IndexOutOfContext { index: usize, context: usize },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` takes {expected} argument(s), got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("substitution needs {expected} term(s), got {found}")]
    SubstitutionArity { expected: usize, found: usize },
    #[error("arguments live in different contexts")]
    MixedContexts,
    #[error("`{0}` is not a valid symbol name")]
    InvalidIdentifier(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("symbol `{0}` is not in the signature")]
    ForeignSymbol(String),
}

/// An operation symbol together with its arity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        Self {
            name: name.into(),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(&other.name)
            .then(self.arity.cmp(&other.arity))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `x` followed by digits; such names are reserved for variables.
fn is_variable_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('x') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

/// A graded set of operation symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    graded: GradedSet,
    /// Ordered by arity, then name.
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(graded: GradedSet) -> Result<Self, TermError> {
        let mut symbols = Vec::with_capacity(graded.len());
        for (n, id) in graded.elements() {
            if !is_identifier(id) || is_variable_name(id) {
                return Err(TermError::InvalidIdentifier(id.to_string()));
            }
            symbols.push(Symbol::new(id, n));
        }
        Ok(Self { graded, symbols })
    }

    /// Builds a signature from `(name, arity)` pairs.
    pub fn from_symbols<'a>(
        symbols: impl IntoIterator<Item = (&'a str, usize)>,
    ) -> Result<Self, TermError> {
        let mut g = GradedSet::new();
        for (name, arity) in symbols {
            g.insert(arity, name);
        }
        Self::new(g)
    }

    pub fn empty() -> Self {
        Self {
            graded: GradedSet::new(),
            symbols: Vec::new(),
        }
    }

    pub fn graded(&self) -> &GradedSet {
        &self.graded
    }

    /// All symbols, ordered by arity then name.
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbols_of_arity(&self, k: usize) -> impl Iterator<Item = &Symbol> + '_ {
        self.symbols.iter().filter(move |s| s.arity == k)
    }

    pub fn lookup(&self, name: &str, arity: usize) -> Option<&Symbol> {
        self.symbols
            .iter()
            .find(|s| s.arity == arity && &*s.name == name)
    }

    /// Position of `sym` in [`Signature::symbols`].
    pub fn index_of(&self, sym: &Symbol) -> Option<usize> {
        self.symbols.iter().position(|s| s == sym)
    }

    pub fn contains(&self, sym: &Symbol) -> bool {
        self.graded.contains(sym.arity, &sym.name)
    }

    pub fn has_nullary(&self) -> bool {
        self.symbols.iter().any(|s| s.arity == 0)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    fn resolve(&self, name: &str, arity: usize) -> Result<Symbol, TermError> {
        if let Some(s) = self.lookup(name, arity) {
            return Ok(s.clone());
        }
        match self.symbols.iter().find(|s| &*s.name == name) {
            Some(s) => Err(TermError::ArityMismatch {
                symbol: name.to_string(),
                expected: s.arity,
                found: arity,
            }),
            None => Err(TermError::UnknownSymbol(name.to_string())),
        }
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct App {
    sym: Symbol,
    args: Vec<Expr>,
    size: usize,
}

/// The context-free body of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// 1-based variable index.
    Var(usize),
    App(Arc<App>),
}

impl Expr {
    pub fn app(sym: Symbol, args: Vec<Expr>) -> Self {
        debug_assert_eq!(sym.arity, args.len());
        let size = 1 + args.iter().map(Expr::size).sum::<usize>();
        Expr::App(Arc::new(App { sym, args, size }))
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) => 1,
            Expr::App(a) => a.size,
        }
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        match self {
            Expr::Var(_) => None,
            Expr::App(a) => Some(&a.sym),
        }
    }

    pub fn args(&self) -> &[Expr] {
        match self {
            Expr::Var(_) => &[],
            Expr::App(a) => &a.args,
        }
    }

    pub fn max_var(&self) -> usize {
        match self {
            Expr::Var(i) => *i,
            Expr::App(a) => a.args.iter().map(Expr::max_var).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Var(_) => 0,
            Expr::App(a) => 1 + a.args.iter().map(Expr::depth).max().unwrap_or(0),
        }
    }

    /// Replaces `x_i` by `ts[i-1]`. Indices must be in range.
    pub fn substitute(&self, ts: &[Expr]) -> Expr {
        match self {
            Expr::Var(i) => ts[i - 1].clone(),
            Expr::App(a) => Expr::app(
                a.sym.clone(),
                a.args.iter().map(|e| e.substitute(ts)).collect(),
            ),
        }
    }

    fn symbols_into<'a>(&'a self, out: &mut Vec<&'a Symbol>) {
        if let Expr::App(a) = self {
            out.push(&a.sym);
            for e in &a.args {
                e.symbols_into(out);
            }
        }
    }

    pub fn symbols(&self) -> Vec<&Symbol> {
        let mut out = Vec::new();
        self.symbols_into(&mut out);
        out
    }

    fn preorder(&self) -> Preorder<'_> {
        Preorder { stack: vec![self] }
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Token<'a> {
    Var(usize),
    Sym(&'a Symbol),
}

struct Preorder<'a> {
    stack: Vec<&'a Expr>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = Token<'a>;

    fn next(&mut self) -> Option<Token<'a>> {
        let e = self.stack.pop()?;
        Some(match e {
            Expr::Var(i) => Token::Var(*i),
            Expr::App(a) => {
                self.stack.extend(a.args.iter().rev());
                Token::Sym(&a.sym)
            }
        })
    }
}

/// Node count first, then the preorder token sequence with variables
/// (by index) before symbols (by name).
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.preorder().cmp(other.preorder()))
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::App(a) => {
                f.write_str(&a.sym.name)?;
                if !a.args.is_empty() {
                    f.write_str("(")?;
                    for (i, e) in a.args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{e}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// A term in the context of `context` variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    context: usize,
    expr: Expr,
}

impl Term {
    /// `x_i` in context `n`.
    pub fn var(n: usize, i: usize) -> Result<Self, TermError> {
        if i == 0 || i > n {
            return Err(TermError::IndexOutOfContext {
                index: i,
                context: n,
            });
        }
        Ok(Self {
            context: n,
            expr: Expr::Var(i),
        })
    }

    /// `sym(args)` in context `n`. The context is explicit so that nullary
    /// applications have one.
    pub fn app(sig: &Signature, sym: &str, n: usize, args: Vec<Term>) -> Result<Self, TermError> {
        let sym = sig.resolve(sym, args.len())?;
        if args.iter().any(|t| t.context != n) {
            return Err(TermError::MixedContexts);
        }
        Ok(Self {
            context: n,
            expr: Expr::app(sym, args.into_iter().map(|t| t.expr).collect()),
        })
    }

    /// `sym(args)` with the context taken from the arguments.
    pub fn apply(sig: &Signature, sym: &str, args: Vec<Term>) -> Result<Self, TermError> {
        let Some(n) = args.first().map(|t| t.context) else {
            return Err(TermError::Syntax {
                pos: 0,
                msg: "nullary application needs an explicit context".into(),
            });
        };
        Self::app(sig, sym, n, args)
    }

    /// Wraps an expression; fails when a variable falls outside the context.
    pub fn from_expr(context: usize, expr: Expr) -> Result<Self, TermError> {
        let m = expr.max_var();
        if m > context {
            return Err(TermError::IndexOutOfContext { index: m, context });
        }
        Ok(Self { context, expr })
    }

    pub(crate) fn from_expr_unchecked(context: usize, expr: Expr) -> Self {
        debug_assert!(expr.max_var() <= context);
        Self { context, expr }
    }

    /// `sym(x1, ..., xk)` in context `k`.
    pub fn generic(sym: &Symbol) -> Self {
        let args = (1..=sym.arity).map(Expr::Var).collect();
        Self {
            context: sym.arity,
            expr: Expr::app(sym.clone(), args),
        }
    }

    pub fn context(&self) -> usize {
        self.context
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn into_expr(self) -> Expr {
        self.expr
    }

    pub fn size(&self) -> usize {
        self.expr.size()
    }

    pub fn is_var(&self) -> Option<usize> {
        match self.expr {
            Expr::Var(i) => Some(i),
            Expr::App(_) => None,
        }
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        self.expr.symbol()
    }

    /// Immediate subterms, in the same context.
    pub fn args(&self) -> Vec<Term> {
        self.expr
            .args()
            .iter()
            .map(|e| Term {
                context: self.context,
                expr: e.clone(),
            })
            .collect()
    }

    /// Simultaneous substitution `self[x1 := ts[0], ...]`; the result lives in
    /// the context shared by `ts`. A ground term (context 0) needs
    /// [`Term::subst_at`] since `ts` is empty.
    pub fn subst(&self, ts: &[Term]) -> Result<Term, TermError> {
        match ts.first() {
            Some(t) => self.subst_at(t.context, ts),
            None if self.context == 0 => Err(TermError::Syntax {
                pos: 0,
                msg: "empty substitution needs an explicit target context".into(),
            }),
            None => Err(TermError::SubstitutionArity {
                expected: self.context,
                found: 0,
            }),
        }
    }

    /// Simultaneous substitution into context `n`.
    pub fn subst_at(&self, n: usize, ts: &[Term]) -> Result<Term, TermError> {
        if ts.len() != self.context {
            return Err(TermError::SubstitutionArity {
                expected: self.context,
                found: ts.len(),
            });
        }
        if ts.iter().any(|t| t.context != n) {
            return Err(TermError::MixedContexts);
        }
        let exprs: Vec<Expr> = ts.iter().map(|t| t.expr.clone()).collect();
        Ok(Term {
            context: n,
            expr: self.expr.substitute(&exprs),
        })
    }

    /// Every symbol occurring in the term belongs to `sig`.
    pub fn check_over(&self, sig: &Signature) -> Result<(), TermError> {
        match self.expr.symbols().into_iter().find(|s| !sig.contains(s)) {
            Some(s) => Err(TermError::ForeignSymbol(s.name().to_string())),
            None => Ok(()),
        }
    }

    pub fn parse(sig: &Signature, n: usize, text: &str) -> Result<Term, TermError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            sig,
            context: n,
        };
        let expr = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(Term { context: n, expr })
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.context
            .cmp(&other.context)
            .then_with(|| self.expr.cmp(&other.expr))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.expr, self.context)
    }
}

pub fn mk_var(n: usize, i: usize) -> Result<Term, TermError> {
    Term::var(n, i)
}

pub fn subst(s: &Term, ts: &[Term]) -> Result<Term, TermError> {
    s.subst(ts)
}

pub fn parse_term(sig: &Signature, n: usize, text: &str) -> Result<Term, TermError> {
    Term::parse(sig, n, text)
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    sig: &'a Signature,
    context: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> TermError {
        TermError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<&str, TermError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if !is_identifier(s) {
            self.pos = start;
            return Err(self.error("expected a variable or symbol"));
        }
        Ok(s)
    }

    fn term(&mut self) -> Result<Expr, TermError> {
        let name = self.ident()?.to_string();
        if is_variable_name(&name) {
            let index: usize = name[1..]
                .parse()
                .map_err(|_| self.error("variable index too large"))?;
            if index == 0 || index > self.context {
                return Err(TermError::IndexOutOfContext {
                    index,
                    context: self.context,
                });
            }
            return Ok(Expr::Var(index));
        }
        let mut args = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        let sym = self.sig.resolve(&name, args.len())?;
        Ok(Expr::app(sym, args))
    }
}

/// All terms in context `n` with at most `max_size` nodes, in term order.
pub fn enum_terms(sig: &Signature, n: usize, max_size: usize) -> Vec<Term> {
    let by_size = exprs_by_size(sig, n, max_size);
    let mut out: Vec<Term> = by_size
        .into_iter()
        .flatten()
        .map(|expr| Term { context: n, expr })
        .collect();
    out.sort();
    out
}

/// `result[s]` holds every expression with exactly `s` nodes.
pub(crate) fn exprs_by_size(sig: &Signature, n: usize, max_size: usize) -> Vec<Vec<Expr>> {
    let mut by_size: Vec<Vec<Expr>> = vec![Vec::new(); max_size + 1];
    if max_size == 0 {
        return by_size;
    }
    by_size[1].extend((1..=n).map(Expr::Var));
    by_size[1].extend(
        sig.symbols_of_arity(0)
            .map(|s| Expr::app(s.clone(), Vec::new())),
    );
    for size in 2..=max_size {
        let mut level = Vec::new();
        for sym in sig.symbols().iter().filter(|s| s.arity > 0) {
            for parts in compositions(size - 1, sym.arity) {
                let mut acc: Vec<Vec<Expr>> = vec![Vec::new()];
                for &p in &parts {
                    let mut next = Vec::with_capacity(acc.len() * by_size[p].len());
                    for prefix in &acc {
                        for e in &by_size[p] {
                            let mut v = prefix.clone();
                            v.push(e.clone());
                            next.push(v);
                        }
                    }
                    acc = next;
                }
                level.extend(acc.into_iter().map(|args| Expr::app(sym.clone(), args)));
            }
        }
        by_size[size] = level;
    }
    by_size
}

/// Ordered ways of writing `total` as `parts` positive summands.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `lhs ≈ rhs` in a shared context.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    context: usize,
    lhs: Term,
    rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Result<Self, TermError> {
        if lhs.context != rhs.context {
            return Err(TermError::MixedContexts);
        }
        Ok(Self {
            context: lhs.context,
            lhs,
            rhs,
        })
    }

    pub fn context(&self) -> usize {
        self.context
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn flipped(&self) -> Equation {
        Equation {
            context: self.context,
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn check_over(&self, sig: &Signature) -> Result<(), TermError> {
        self.lhs.check_over(sig)?;
        self.rhs.check_over(sig)
    }

    /// Parses `LHS = RHS @N`; the `@N` suffix is required.
    pub fn parse(sig: &Signature, text: &str) -> Result<Equation, TermError> {
        let (body, ctx) = text.rsplit_once('@').ok_or(TermError::Syntax {
            pos: text.len(),
            msg: "expected `@N` context suffix".into(),
        })?;
        let n: usize = ctx.trim().parse().map_err(|_| TermError::Syntax {
            pos: body.len() + 1,
            msg: "context must be a natural number".into(),
        })?;
        Self::parse_in(sig, n, body)
    }

    /// Parses `LHS = RHS` in context `n`.
    pub fn parse_in(sig: &Signature, n: usize, text: &str) -> Result<Equation, TermError> {
        let (l, r) = text.split_once('=').ok_or(TermError::Syntax {
            pos: 0,
            msg: "expected `=`".into(),
        })?;
        let lhs = Term::parse(sig, n, l).map_err(|e| shift(e, 0))?;
        let rhs = Term::parse(sig, n, r).map_err(|e| shift(e, l.len() + 1))?;
        Equation::new(lhs, rhs)
    }
}

fn shift(e: TermError, by: usize) -> TermError {
    match e {
        TermError::Syntax { pos, msg } => TermError::Syntax { pos: pos + by, msg },
        other => other,
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} @{}", self.lhs, self.rhs, self.context)
    }
}

impl fmt::Debug for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A signature with equational axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    name: String,
    signature: Signature,
    axioms: Vec<Equation>,
}

impl Presentation {
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        axioms: Vec<Equation>,
    ) -> Result<Self, TermError> {
        for ax in &axioms {
            ax.check_over(&signature)?;
        }
        Ok(Self {
            name: name.into(),
            signature,
            axioms,
        })
    }

    /// Parses each axiom as `LHS = RHS @N`.
    pub fn from_text(
        name: impl Into<String>,
        signature: Signature,
        axioms: &[&str],
    ) -> Result<Self, TermError> {
        let axioms = axioms
            .iter()
            .map(|a| Equation::parse(&signature, a))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, signature, axioms)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn axioms(&self) -> &[Equation] {
        &self.axioms
    }

    pub fn axiom_index(&self, eq: &Equation) -> Option<usize> {
        self.axioms.iter().position(|a| a == eq)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Matches `pattern` against `target`, extending `bindings` (indexed by
/// variable, 0-based). Returns false on a clash; `bindings` may then hold
/// partial assignments.
pub fn match_expr(pattern: &Expr, target: &Expr, bindings: &mut [Option<Expr>]) -> bool {
    match pattern {
        Expr::Var(i) => match &bindings[i - 1] {
            Some(b) => b == target,
            None => {
                bindings[i - 1] = Some(target.clone());
                true
            }
        },
        Expr::App(a) => match target {
            Expr::App(b) if a.sym == b.sym => a
                .args
                .iter()
                .zip(&b.args)
                .all(|(p, t)| match_expr(p, t, bindings)),
            _ => false,
        },
    }
}

/// A random term in context `n` with at most `max_size` nodes, or `None`
/// when no such term exists.
pub fn random_term<R: rand::Rng + ?Sized>(
    sig: &Signature,
    n: usize,
    max_size: usize,
    rng: &mut R,
) -> Option<Term> {
    random_expr(sig, n, max_size, rng).map(|expr| Term { context: n, expr })
}

fn random_expr<R: rand::Rng + ?Sized>(
    sig: &Signature,
    n: usize,
    budget: usize,
    rng: &mut R,
) -> Option<Expr> {
    if budget == 0 {
        return None;
    }
    let leaves = n + sig.symbols_of_arity(0).count();
    // Compound symbols whose arguments can all be filled within the budget.
    let compound: Vec<&Symbol> = sig
        .symbols()
        .iter()
        .filter(|s| s.arity > 0 && s.arity < budget && leaves > 0)
        .collect();
    let choose_leaf = compound.is_empty() || (leaves > 0 && rng.gen_bool(0.4));
    if choose_leaf {
        if leaves == 0 {
            return None;
        }
        let k = rng.gen_range(0..leaves);
        return Some(if k < n {
            Expr::Var(k + 1)
        } else {
            let c = sig.symbols_of_arity(0).nth(k - n).expect("in range");
            Expr::app(c.clone(), Vec::new())
        });
    }
    let sym = compound[rng.gen_range(0..compound.len())].clone();
    let mut remaining = budget - 1;
    let mut args = Vec::with_capacity(sym.arity);
    for j in 0..sym.arity {
        // Keep at least one node for every argument still to come.
        let reserve = sym.arity - j - 1;
        let arg = random_expr(sig, n, remaining - reserve, rng)?;
        remaining -= arg.size();
        args.push(arg);
    }
    Some(Expr::app(sym, args))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn grp() -> Signature {
        fixtures::group_signature()
    }

    fn t(n: usize, s: &str) -> Term {
        Term::parse(&grp(), n, s).unwrap()
    }

    #[test]
    fn variables() {
        assert_eq!(Term::var(3, 1).unwrap().to_string(), "x1");
        assert_eq!(Term::var(1, 1).unwrap().context(), 1);
        assert_eq!(
            Term::var(2, 3),
            Err(TermError::IndexOutOfContext {
                index: 3,
                context: 2
            })
        );
        assert!(Term::var(2, 0).is_err());
    }

    #[test]
    fn contexts_distinguish_terms() {
        assert_ne!(Term::var(1, 1).unwrap(), Term::var(2, 1).unwrap());
    }

    #[test]
    fn applications() {
        let sig = grp();
        let m = Term::app(
            &sig,
            "m",
            2,
            vec![Term::var(2, 1).unwrap(), Term::var(2, 2).unwrap()],
        )
        .unwrap();
        assert_eq!(format!("{m:?}"), "m(x1,x2)@2");
        let e = Term::app(&sig, "e", 1, vec![]).unwrap();
        assert_eq!(format!("{e:?}"), "e@1");
        assert_eq!(
            Term::app(
                &sig,
                "m",
                1,
                vec![Term::var(1, 1).unwrap(), Term::var(2, 1).unwrap()]
            ),
            Err(TermError::MixedContexts)
        );
        assert!(matches!(
            Term::app(&sig, "q", 1, vec![]),
            Err(TermError::UnknownSymbol(_))
        ));
        assert!(matches!(
            Term::app(&sig, "m", 1, vec![Term::var(1, 1).unwrap()]),
            Err(TermError::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn substitution_examples() {
        let s = t(1, "x1");
        assert_eq!(s.subst(&[t(2, "m(x1,x2)")]).unwrap(), t(2, "m(x1,x2)"));
        let s = t(1, "m(x1,i(x1))");
        assert_eq!(s.subst(&[t(2, "x2")]).unwrap(), t(2, "m(x2,i(x2))"));
        assert!(matches!(
            s.subst(&[t(2, "x2"), t(2, "x1")]),
            Err(TermError::SubstitutionArity { .. })
        ));
        assert_eq!(
            t(2, "m(x1,x2)").subst(&[t(2, "x1"), t(1, "x1")]),
            Err(TermError::MixedContexts)
        );
    }

    #[test]
    fn ground_substitution_needs_context() {
        let e = t(0, "e");
        assert_eq!(e.subst_at(3, &[]).unwrap(), t(3, "e"));
        assert!(e.subst(&[]).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let names = |v: Vec<Term>| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        assert_eq!(names(enum_terms(&grp(), 1, 1)), ["x1", "e"]);
        assert_eq!(
            names(enum_terms(&grp(), 1, 2)),
            ["x1", "e", "i(x1)", "i(e)"]
        );
        assert!(enum_terms(&Signature::empty(), 0, 5).is_empty());
    }

    #[test]
    fn parse_and_print() {
        let sig = grp();
        let term = Term::parse(&sig, 1, "m(x1, i(x1))").unwrap();
        assert_eq!(term.to_string(), "m(x1,i(x1))");
        assert_eq!(term.size(), 4);
        assert_eq!(
            Term::parse(&sig, 2, "x3"),
            Err(TermError::IndexOutOfContext {
                index: 3,
                context: 2
            })
        );
        assert_eq!(
            Term::parse(&sig, 3, "m(m(x1,x2),x3)").unwrap().to_string(),
            "m(m(x1,x2),x3)"
        );
        assert!(matches!(
            Term::parse(&sig, 1, "m(x1"),
            Err(TermError::Syntax { .. })
        ));
        assert!(matches!(
            Term::parse(&sig, 1, "m(x1,x1) x1"),
            Err(TermError::Syntax { .. })
        ));
        assert!(matches!(
            Term::parse(&sig, 1, "i"),
            Err(TermError::ArityMismatch { .. })
        ));
        assert!(matches!(
            Term::parse(&sig, 1, "e()"),
            Err(TermError::Syntax { .. })
        ));
    }

    #[test]
    fn signature_rejects_bad_names() {
        assert!(Signature::from_symbols([("x1", 0)]).is_err());
        assert!(Signature::from_symbols([("1a", 0)]).is_err());
        assert!(Signature::from_symbols([("x", 1), ("e_prime", 0)]).is_ok());
    }

    #[test]
    fn term_order() {
        // size first, then preorder with variables before symbols.
        assert!(t(2, "x2") < t(2, "e"));
        assert!(t(2, "x1") < t(2, "x2"));
        assert!(t(3, "m(x1,m(x2,x3))") < t(3, "m(m(x1,x2),x3)"));
        assert!(t(1, "i(x1)") < t(1, "m(x1,x1)"));
    }

    #[test]
    fn equation_parsing() {
        let eq = Equation::parse(&grp(), "m(x1,e) = x1 @1").unwrap();
        assert_eq!(eq.context(), 1);
        assert_eq!(eq.to_string(), "m(x1,e) = x1 @1");
        assert!(Equation::parse(&grp(), "m(x1,e) = x1").is_err());
        assert!(Equation::parse(&grp(), "x2 = x1 @1").is_err());
    }

    #[test]
    fn matching_binds_repeated_variables() {
        let pat = t(1, "m(x1,i(x1))");
        let mut b = vec![None];
        assert!(match_expr(pat.expr(), t(2, "m(x2,i(x2))").expr(), &mut b));
        assert_eq!(b[0], Some(Expr::Var(2)));
        let mut b = vec![None];
        assert!(!match_expr(pat.expr(), t(2, "m(x2,i(x1))").expr(), &mut b));
    }

    #[test]
    fn random_terms_respect_bounds() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let term = random_term(&grp(), 2, 7, &mut rng).unwrap();
            assert!(term.size() <= 7);
            assert!(term.expr().max_var() <= 2);
        }
        assert!(random_term(&Signature::empty(), 0, 5, &mut rng).is_none());
    }

    #[test]
    fn compositions_cover_all_splits() {
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
        assert!(compositions(1, 2).is_empty());
    }
}
