//! Finite Σ-algebras given by operation tables.
//!
//! Carrier elements are `0..m`. A table for a `k`-ary operation is a flat
//! array of length `m^k` in row-major order of the argument tuple: the last
//! argument varies fastest.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::term::{Equation, Expr, Presentation, Signature, Symbol, Term, TermError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("map is not a total function into the target carrier")]
    NotATotalMap,
    #[error("an empty carrier cannot interpret the nullary symbol `{0}`")]
    EmptyCarrierWithNullary(String),
    #[error("table for `{symbol}`: {reason}")]
    BadTable { symbol: String, reason: String },
    #[error("carrier size {size} with arity {arity} overflows the table size")]
    TooLarge { size: usize, arity: usize },
}

impl From<TermError> for AlgebraError {
    fn from(e: TermError) -> Self {
        AlgebraError::SignatureMismatch(e.to_string())
    }
}

/// `m^k`, or `None` on overflow.
pub fn table_len(m: usize, k: usize) -> Option<usize> {
    m.checked_pow(u32::try_from(k).ok()?)
}

/// Row-major position of `tuple` over a carrier of size `m`.
pub fn tuple_index(m: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * m + a)
}

/// Inverse of [`tuple_index`] for tuples of length `n`.
pub fn index_tuple(m: usize, n: usize, mut index: usize, out: &mut Vec<usize>) {
    out.clear();
    out.resize(n, 0);
    for slot in out.iter_mut().rev() {
        *slot = index % m;
        index /= m;
    }
}

/// A function `A^n -> A` on a finite carrier, as a lookup table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleFunction {
    arity: usize,
    carrier: usize,
    table: Vec<usize>,
}

impl TupleFunction {
    pub fn new(arity: usize, carrier: usize, table: Vec<usize>) -> Result<Self, AlgebraError> {
        let len = table_len(carrier, arity).ok_or(AlgebraError::TooLarge {
            size: carrier,
            arity,
        })?;
        if table.len() != len {
            return Err(AlgebraError::BadTable {
                symbol: format!("<arity {arity}>"),
                reason: format!("expected {len} entries, got {}", table.len()),
            });
        }
        if let Some(&v) = table.iter().find(|&&v| v >= carrier) {
            return Err(AlgebraError::BadTable {
                symbol: format!("<arity {arity}>"),
                reason: format!("entry {v} is outside the carrier 0..{carrier}"),
            });
        }
        Ok(Self {
            arity,
            carrier,
            table,
        })
    }

    pub fn from_fn(carrier: usize, arity: usize, mut f: impl FnMut(&[usize]) -> usize) -> Self {
        let len = table_len(carrier, arity).expect("table size fits in memory");
        let mut tuple = Vec::with_capacity(arity);
        let table = (0..len)
            .map(|i| {
                index_tuple(carrier, arity, i, &mut tuple);
                f(&tuple)
            })
            .collect();
        Self {
            arity,
            carrier,
            table,
        }
    }

    /// `(a1..an) -> a_i`, 1-based.
    pub fn projection(carrier: usize, n: usize, i: usize) -> Self {
        assert!(1 <= i && i <= n, "projection index out of range");
        Self::from_fn(carrier, n, |t| t[i - 1])
    }

    pub fn constant(carrier: usize, n: usize, value: usize) -> Self {
        Self::from_fn(carrier, n, |_| value)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity);
        self.table[tuple_index(self.carrier, tuple)]
    }

    /// `self ∘ (args)`: the function `a ↦ self(args[0](a), ..., args[k-1](a))`
    /// of arity `n`. `n` is explicit because `args` may be empty.
    pub fn compose(&self, n: usize, args: &[TupleFunction]) -> TupleFunction {
        assert_eq!(
            args.len(),
            self.arity,
            "composition needs one argument per input"
        );
        debug_assert!(args
            .iter()
            .all(|g| g.arity == n && g.carrier == self.carrier));
        let m = self.carrier;
        let len = table_len(m, n).expect("table size fits in memory");
        let table = (0..len)
            .map(|i| {
                let idx = args.iter().fold(0, |acc, g| acc * m + g.table[i]);
                self.table[idx]
            })
            .collect();
        TupleFunction {
            arity: n,
            carrier: m,
            table,
        }
    }

    /// `f ∘ self`, postcomposition with a map `A -> B`.
    pub fn postcompose(&self, f: &[usize], target: usize) -> TupleFunction {
        TupleFunction {
            arity: self.arity,
            carrier: target,
            table: self.table.iter().map(|&v| f[v]).collect(),
        }
    }

    /// `self ∘ f^n` where `f: A' -> A` and `self: A^n -> B`; the result is
    /// `A'^n -> B`. `self`'s carrier is the domain size; values may range
    /// over a different set, so only the table is rebuilt.
    pub fn precompose(&self, f: &[usize], source: usize) -> Vec<usize> {
        let n = self.arity;
        let len = table_len(source, n).expect("table size fits in memory");
        let mut tuple = Vec::with_capacity(n);
        (0..len)
            .map(|i| {
                index_tuple(source, n, i, &mut tuple);
                let idx = tuple.iter().fold(0, |acc, &a| acc * self.carrier + f[a]);
                self.table[idx]
            })
            .collect()
    }
}

impl fmt::Debug for TupleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fn{}/{}{:?}", self.arity, self.carrier, self.table)
    }
}

impl fmt::Display for TupleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.table.iter().map(usize::to_string).collect();
        write!(f, "[{}]", cells.join(" "))
    }
}

/// A Σ-algebra on the carrier `0..size`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    signature: Signature,
    size: usize,
    /// One table per symbol, in signature order.
    tables: Vec<TupleFunction>,
}

impl FiniteAlgebra {
    /// `tables` are given in signature order.
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        size: usize,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self, AlgebraError> {
        if tables.len() != signature.len() {
            return Err(AlgebraError::SignatureMismatch(format!(
                "expected {} tables, got {}",
                signature.len(),
                tables.len()
            )));
        }
        let tables = signature
            .symbols()
            .iter()
            .zip(tables)
            .map(|(sym, table)| {
                if size == 0 && sym.arity() == 0 {
                    return Err(AlgebraError::EmptyCarrierWithNullary(
                        sym.name().to_string(),
                    ));
                }
                TupleFunction::new(sym.arity(), size, table).map_err(|e| match e {
                    AlgebraError::BadTable { reason, .. } => AlgebraError::BadTable {
                        symbol: sym.name().to_string(),
                        reason,
                    },
                    other => other,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            name: name.into(),
            signature,
            size,
            tables,
        })
    }

    /// Tables keyed by symbol name; every symbol needs exactly one.
    pub fn from_named(
        name: impl Into<String>,
        signature: Signature,
        size: usize,
        named: &[(&str, Vec<usize>)],
    ) -> Result<Self, AlgebraError> {
        let mut tables = Vec::with_capacity(signature.len());
        for sym in signature.symbols() {
            let mut found = named.iter().filter(|(n, _)| *n == sym.name());
            let (_, table) = found.next().ok_or_else(|| AlgebraError::BadTable {
                symbol: sym.name().to_string(),
                reason: "missing table".into(),
            })?;
            tables.push(table.clone());
        }
        if let Some((n, _)) = named
            .iter()
            .find(|(n, _)| !signature.symbols().iter().any(|s| s.name() == *n))
        {
            return Err(AlgebraError::SignatureMismatch(format!(
                "`{n}` is not in the signature"
            )));
        }
        Self::new(name, signature, size, tables)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tables(&self) -> &[TupleFunction] {
        &self.tables
    }

    pub fn table(&self, sym: &Symbol) -> Option<&TupleFunction> {
        let i = self.signature.symbols().iter().position(|s| s == sym)?;
        Some(&self.tables[i])
    }

    fn symbol_index(&self, sym: &Symbol) -> usize {
        self.signature
            .symbols()
            .iter()
            .position(|s| s == sym)
            .expect("term was checked against the signature")
    }

    /// Evaluates a term at one argument tuple.
    pub fn eval(&self, expr: &Expr, tuple: &[usize]) -> usize {
        match expr {
            Expr::Var(i) => tuple[i - 1],
            Expr::App(_) => {
                let sym = expr.symbol().expect("application");
                let table = &self.tables[self.symbol_index(sym)];
                let idx = expr
                    .args()
                    .iter()
                    .fold(0, |acc, a| acc * self.size + self.eval(a, tuple));
                table.table[idx]
            }
        }
    }

    /// Forgets every symbol outside `sig`.
    pub fn reduct(&self, sig: &Signature) -> Result<FiniteAlgebra, AlgebraError> {
        let tables = sig
            .symbols()
            .iter()
            .map(|s| {
                self.table(s).map(|t| t.table.clone()).ok_or_else(|| {
                    AlgebraError::SignatureMismatch(format!("`{}` is not interpreted", s.name()))
                })
            })
            .collect::<Result<_, _>>()?;
        FiniteAlgebra::new(self.name.clone(), sig.clone(), self.size, tables)
    }
}

impl fmt::Debug for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(size {}", self.name, self.size)?;
        for (s, t) in self.signature.symbols().iter().zip(&self.tables) {
            write!(f, ", {}={}", s.name(), t)?;
        }
        write!(f, ")")
    }
}

fn check_signature(alg: &FiniteAlgebra, sig: &Signature) -> Result<(), AlgebraError> {
    if alg.signature != *sig {
        return Err(AlgebraError::SignatureMismatch(format!(
            "algebra `{}` is over {} but {} was expected",
            alg.name,
            alg.signature.graded(),
            sig.graded()
        )));
    }
    Ok(())
}

/// `⟦t⟧`, computed bottom-up with one table per distinct subterm.
pub fn interpret(alg: &FiniteAlgebra, t: &Term) -> Result<TupleFunction, AlgebraError> {
    t.check_over(&alg.signature)?;
    let mut memo: HashMap<Expr, TupleFunction> = HashMap::new();
    Ok(interpret_expr(alg, t.context(), t.expr(), &mut memo))
}

fn interpret_expr(
    alg: &FiniteAlgebra,
    n: usize,
    e: &Expr,
    memo: &mut HashMap<Expr, TupleFunction>,
) -> TupleFunction {
    if let Some(f) = memo.get(e) {
        return f.clone();
    }
    let f = match e {
        Expr::Var(i) => TupleFunction::projection(alg.size, n, *i),
        Expr::App(_) => {
            let sym = e.symbol().expect("application");
            let args: Vec<TupleFunction> = e
                .args()
                .iter()
                .map(|a| interpret_expr(alg, n, a, memo))
                .collect();
            alg.tables[alg.symbol_index(sym)].compose(n, &args)
        }
    };
    memo.insert(e.clone(), f.clone());
    f
}

/// First argument tuple (in row-major order) where the two sides differ.
pub fn first_violation(
    alg: &FiniteAlgebra,
    eq: &Equation,
) -> Result<Option<Vec<usize>>, AlgebraError> {
    eq.check_over(&alg.signature)?;
    let n = eq.context();
    let len = table_len(alg.size, n).ok_or(AlgebraError::TooLarge {
        size: alg.size,
        arity: n,
    })?;
    let mut tuple = Vec::with_capacity(n);
    for i in 0..len {
        index_tuple(alg.size, n, i, &mut tuple);
        if alg.eval(eq.lhs().expr(), &tuple) != alg.eval(eq.rhs().expr(), &tuple) {
            return Ok(Some(tuple));
        }
    }
    Ok(None)
}

/// `alg ⊨ eq`: both sides denote the same table.
pub fn satisfies(alg: &FiniteAlgebra, eq: &Equation) -> Result<bool, AlgebraError> {
    Ok(first_violation(alg, eq)?.is_none())
}

pub fn is_model(alg: &FiniteAlgebra, pres: &Presentation) -> Result<bool, AlgebraError> {
    check_signature(alg, pres.signature())?;
    for ax in pres.axioms() {
        if !satisfies(alg, ax)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `f(σ^A(a)) = σ^B(f(a))` for every symbol and tuple.
pub fn is_homomorphism(
    f: &[usize],
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
) -> Result<bool, AlgebraError> {
    check_signature(b, &a.signature)?;
    if f.len() != a.size || f.iter().any(|&v| v >= b.size) {
        return Err(AlgebraError::NotATotalMap);
    }
    for (ta, tb) in a.tables.iter().zip(&b.tables) {
        let k = ta.arity;
        let mut tuple = Vec::with_capacity(k);
        for (i, &v) in ta.table.iter().enumerate() {
            index_tuple(a.size, k, i, &mut tuple);
            let idx = tuple.iter().fold(0, |acc, &x| acc * b.size + f[x]);
            if f[v] != tb.table[idx] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Number of Σ-algebras on a carrier of size `m`, or `None` on overflow.
pub fn algebra_count(sig: &Signature, m: usize) -> Option<u128> {
    if m == 0 && sig.has_nullary() {
        return Some(0);
    }
    let mut count: u128 = 1;
    for sym in sig.symbols() {
        let cells = table_len(m, sym.arity())?;
        count = count.checked_mul((m as u128).checked_pow(u32::try_from(cells).ok()?)?)?;
    }
    Some(count)
}

/// Every Σ-algebra on `0..m`, lexicographic in the concatenated tables
/// (symbols in signature order).
pub fn enumerate_algebras(sig: &Signature, m: usize) -> Result<AlgebraIter, AlgebraError> {
    if m == 0 {
        if let Some(s) = sig.symbols_of_arity(0).next() {
            return Err(AlgebraError::EmptyCarrierWithNullary(s.name().to_string()));
        }
    }
    let space = TableSpace::new(sig, m)?;
    let digits = vec![0; space.width];
    Ok(AlgebraIter {
        space,
        digits,
        done: false,
        counter: 0,
    })
}

/// Layout of the concatenated tables of all symbols.
#[derive(Debug, Clone)]
struct TableSpace {
    signature: Signature,
    m: usize,
    offsets: Vec<usize>,
    width: usize,
}

impl TableSpace {
    fn new(sig: &Signature, m: usize) -> Result<Self, AlgebraError> {
        let mut offsets = Vec::with_capacity(sig.len());
        let mut width = 0usize;
        for sym in sig.symbols() {
            offsets.push(width);
            let len = table_len(m, sym.arity()).ok_or(AlgebraError::TooLarge {
                size: m,
                arity: sym.arity(),
            })?;
            width = width.checked_add(len).ok_or(AlgebraError::TooLarge {
                size: m,
                arity: sym.arity(),
            })?;
        }
        Ok(Self {
            signature: sig.clone(),
            m,
            offsets,
            width,
        })
    }

    fn build(&self, digits: &[usize], name: String) -> FiniteAlgebra {
        let tables = self
            .signature
            .symbols()
            .iter()
            .zip(&self.offsets)
            .map(|(s, &off)| {
                let len = table_len(self.m, s.arity()).expect("checked");
                TupleFunction {
                    arity: s.arity(),
                    carrier: self.m,
                    table: digits[off..off + len].to_vec(),
                }
            })
            .collect();
        FiniteAlgebra {
            name,
            signature: self.signature.clone(),
            size: self.m,
            tables,
        }
    }
}

pub struct AlgebraIter {
    space: TableSpace,
    digits: Vec<usize>,
    done: bool,
    counter: u64,
}

impl AlgebraIter {
    /// Advances the odometer; the last digit moves fastest.
    fn advance(&mut self) {
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.space.m {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }
}

impl Iterator for AlgebraIter {
    type Item = FiniteAlgebra;

    fn next(&mut self) -> Option<FiniteAlgebra> {
        if self.done {
            return None;
        }
        let alg = self.space.build(
            &self.digits,
            format!("enum{}_{}", self.space.m, self.counter),
        );
        self.counter += 1;
        self.advance();
        Some(alg)
    }
}

/// A term flattened to symbol indices for fast evaluation over raw digits.
#[derive(Debug, Clone)]
struct CompiledTerm {
    /// Postorder: children precede their parent.
    nodes: Vec<CNode>,
}

#[derive(Debug, Clone, Copy)]
enum CNode {
    Var(usize),
    App {
        sym: usize,
        first: usize,
        arity: usize,
    },
}

impl CompiledTerm {
    /// Appends `e` in postorder; `refs` receives the child node positions
    /// that each application's `first..first+arity` range points into.
    fn push(sig: &Signature, e: &Expr, nodes: &mut Vec<CNode>, refs: &mut Vec<usize>) -> usize {
        match e {
            Expr::Var(i) => {
                nodes.push(CNode::Var(*i - 1));
            }
            Expr::App(_) => {
                let sym = e.symbol().expect("application");
                let idx = sig
                    .symbols()
                    .iter()
                    .position(|s| s == sym)
                    .expect("symbol in signature");
                let mut kids = Vec::with_capacity(sym.arity());
                for a in e.args() {
                    kids.push(Self::push(sig, a, nodes, refs));
                }
                let first = refs.len();
                refs.extend(kids);
                nodes.push(CNode::App {
                    sym: idx,
                    first,
                    arity: sym.arity(),
                });
            }
        }
        nodes.len() - 1
    }

    /// Evaluates with tables read from `digits` laid out by `offsets`.
    fn eval(
        &self,
        refs: &[usize],
        m: usize,
        offsets: &[usize],
        digits: &[usize],
        tuple: &[usize],
        scratch: &mut Vec<usize>,
    ) -> usize {
        scratch.clear();
        for node in &self.nodes {
            let v = match *node {
                CNode::Var(i) => tuple[i],
                CNode::App { sym, first, arity } => {
                    let idx = refs[first..first + arity]
                        .iter()
                        .fold(0, |acc, &c| acc * m + scratch[c]);
                    digits[offsets[sym] + idx]
                }
            };
            scratch.push(v);
        }
        *scratch.last().expect("nonempty term")
    }
}

/// A compiled equation with its child-reference table.
struct CompiledEquation {
    context: usize,
    sides: [(CompiledTerm, Vec<usize>); 2],
}

impl CompiledEquation {
    fn new(sig: &Signature, eq: &Equation) -> Self {
        let side = |t: &Term| {
            let mut nodes = Vec::new();
            let mut refs = Vec::new();
            CompiledTerm::push(sig, t.expr(), &mut nodes, &mut refs);
            (CompiledTerm { nodes }, refs)
        };
        Self {
            context: eq.context(),
            sides: [side(eq.lhs()), side(eq.rhs())],
        }
    }

    fn holds(
        &self,
        space: &TableSpace,
        digits: &[usize],
        tuple: &mut Vec<usize>,
        scratch: &mut Vec<usize>,
    ) -> bool {
        let m = space.m;
        let n = self.context;
        let len = table_len(m, n).expect("checked by caller");
        for i in 0..len {
            index_tuple(m, n, i, tuple);
            let [(l, lr), (r, rr)] = &self.sides;
            let a = l.eval(lr, m, &space.offsets, digits, tuple, scratch);
            let b = r.eval(rr, m, &space.offsets, digits, tuple, scratch);
            if a != b {
                return false;
            }
        }
        true
    }
}

/// Outcome of a bounded search for a countermodel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consequence {
    /// A model of the presentation that violates the equation.
    Countermodel(FiniteAlgebra),
    /// No countermodel on any carrier of size `1..=k`.
    HoldsUpTo(usize),
}

/// Searches carriers of size `1..=max_size` in enumeration order and returns
/// the first model of `pres` that violates `eq`.
///
/// A countermodel refutes `pres ⊨ eq`; `HoldsUpTo` is only evidence.
pub fn semantic_consequence_bounded(
    pres: &Presentation,
    eq: &Equation,
    max_size: usize,
) -> Result<Consequence, AlgebraError> {
    semantic_consequence_with_fixtures(pres, eq, max_size, &[])
}

/// Like [`semantic_consequence_bounded`], but first tries the given fixture
/// algebras (those that are models of `pres`).
pub fn semantic_consequence_with_fixtures(
    pres: &Presentation,
    eq: &Equation,
    max_size: usize,
    fixtures: &[FiniteAlgebra],
) -> Result<Consequence, AlgebraError> {
    eq.check_over(pres.signature())?;
    for alg in fixtures.iter().filter(|a| a.signature == *pres.signature()) {
        if is_model(alg, pres)? && !satisfies(alg, eq)? {
            return Ok(Consequence::Countermodel(alg.clone()));
        }
    }
    for m in 1..=max_size {
        if let Some(alg) = find_model(pres, m, |alg_holds| !alg_holds(eq))? {
            return Ok(Consequence::Countermodel(alg));
        }
    }
    Ok(Consequence::HoldsUpTo(max_size))
}

/// Every model of `pres` on a carrier of size `m`, in enumeration order.
pub fn models(pres: &Presentation, m: usize) -> Result<Vec<FiniteAlgebra>, AlgebraError> {
    let sig = pres.signature();
    if m == 0 && sig.has_nullary() {
        return Ok(Vec::new());
    }
    let space = TableSpace::new(sig, m)?;
    let axioms: Vec<CompiledEquation> = pres
        .axioms()
        .iter()
        .map(|a| CompiledEquation::new(sig, a))
        .collect();
    let mut out = Vec::new();
    let mut it = AlgebraIter {
        space: space.clone(),
        digits: vec![0; space.width],
        done: false,
        counter: 0,
    };
    let (mut tuple, mut scratch) = (Vec::new(), Vec::new());
    while !it.done {
        if axioms
            .iter()
            .all(|a| a.holds(&space, &it.digits, &mut tuple, &mut scratch))
        {
            out.push(space.build(&it.digits, format!("model{}_{}", m, it.counter)));
        }
        it.counter += 1;
        it.advance();
    }
    Ok(out)
}

/// First model of `pres` on `0..m` accepted by `accept`, which receives a
/// checker for arbitrary equations over the candidate.
fn find_model(
    pres: &Presentation,
    m: usize,
    mut accept: impl FnMut(&mut dyn FnMut(&Equation) -> bool) -> bool,
) -> Result<Option<FiniteAlgebra>, AlgebraError> {
    let sig = pres.signature();
    if m == 0 && sig.has_nullary() {
        return Ok(None);
    }
    let space = TableSpace::new(sig, m)?;
    let axioms: Vec<CompiledEquation> = pres
        .axioms()
        .iter()
        .map(|a| CompiledEquation::new(sig, a))
        .collect();
    let mut cache: HashMap<Equation, CompiledEquation> = HashMap::new();
    let mut it = AlgebraIter {
        space: space.clone(),
        digits: vec![0; space.width],
        done: false,
        counter: 0,
    };
    let (mut tuple, mut scratch) = (Vec::new(), Vec::new());
    while !it.done {
        if axioms
            .iter()
            .all(|a| a.holds(&space, &it.digits, &mut tuple, &mut scratch))
        {
            let digits = it.digits.clone();
            let mut check = |eq: &Equation| {
                let c = cache
                    .entry(eq.clone())
                    .or_insert_with(|| CompiledEquation::new(sig, eq));
                c.holds(&space, &digits, &mut tuple, &mut scratch)
            };
            if accept(&mut check) {
                return Ok(Some(
                    space.build(&it.digits, format!("countermodel{}_{}", m, it.counter)),
                ));
            }
        }
        it.counter += 1;
        it.advance();
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn eq(sig: &Signature, s: &str) -> Equation {
        Equation::parse(sig, s).unwrap()
    }

    #[test]
    fn interpret_examples() {
        let z2 = fixtures::z2();
        let sig = z2.signature().clone();
        let t = Term::parse(&sig, 1, "m(x1,i(x1))").unwrap();
        assert_eq!(interpret(&z2, &t).unwrap().table(), &[0, 0]);
        let p = interpret(&z2, &Term::var(3, 2).unwrap()).unwrap();
        assert_eq!(p, TupleFunction::projection(2, 3, 2));
        let e = Term::parse(&sig, 1, "e").unwrap();
        assert_eq!(interpret(&z2, &e).unwrap().table(), &[0, 0]);
    }

    #[test]
    fn interpret_rejects_foreign_terms() {
        let sl = fixtures::semilattice_presentation();
        let t = Term::parse(sl.signature(), 2, "m(x1,x2)").unwrap();
        let z2 = fixtures::z2();
        // `m/2` exists in both signatures, but the algebra's check is by signature.
        assert!(interpret(&z2, &t).is_ok());
        let other = Signature::from_symbols([("j", 2)]).unwrap();
        let t = Term::parse(&other, 2, "j(x1,x2)").unwrap();
        assert!(matches!(
            interpret(&z2, &t),
            Err(AlgebraError::SignatureMismatch(_))
        ));
    }

    #[test]
    fn satisfies_examples() {
        let sig = fixtures::group_signature();
        let z2 = fixtures::z2();
        assert!(satisfies(&z2, &eq(&sig, "m(x1,e) = x1 @1")).unwrap());
        assert!(satisfies(&z2, &eq(&sig, "m(x1,x2) = m(x2,x1) @2")).unwrap());
        let s3 = fixtures::s3();
        assert!(!satisfies(&s3, &eq(&sig, "m(x1,x2) = m(x2,x1) @2")).unwrap());
    }

    #[test]
    fn is_model_examples() {
        let grp = fixtures::group_presentation();
        assert!(is_model(&fixtures::z2(), &grp).unwrap());
        assert!(!is_model(&fixtures::broken_group(), &grp).unwrap());
        let empty = Presentation::new("free", grp.signature().clone(), vec![]).unwrap();
        assert!(is_model(&fixtures::broken_group(), &empty).unwrap());
    }

    #[test]
    fn broken_group_fails_right_unit_at_one() {
        let grp = fixtures::group_presentation();
        let v = first_violation(&fixtures::broken_group(), &grp.axioms()[0]).unwrap();
        assert_eq!(v, Some(vec![1]));
    }

    #[test]
    fn homomorphism_examples() {
        let z2 = fixtures::z2();
        assert!(is_homomorphism(&[0, 1], &z2, &z2).unwrap());
        assert!(is_homomorphism(&[0, 0], &z2, &z2).unwrap());
        assert!(!is_homomorphism(&[1, 0], &z2, &z2).unwrap());
        assert_eq!(
            is_homomorphism(&[0], &z2, &z2),
            Err(AlgebraError::NotATotalMap)
        );
        assert_eq!(
            is_homomorphism(&[0, 2], &z2, &z2),
            Err(AlgebraError::NotATotalMap)
        );
    }

    #[test]
    fn enumeration_counts() {
        let sig = fixtures::group_signature();
        assert_eq!(enumerate_algebras(&sig, 1).unwrap().count(), 1);
        assert_eq!(enumerate_algebras(&sig, 2).unwrap().count(), 128);
        assert_eq!(algebra_count(&sig, 2), Some(128));
        let unary = Signature::from_symbols([("f", 1)]).unwrap();
        assert_eq!(enumerate_algebras(&unary, 3).unwrap().count(), 27);
        assert!(matches!(
            enumerate_algebras(&sig, 0),
            Err(AlgebraError::EmptyCarrierWithNullary(_))
        ));
        assert_eq!(enumerate_algebras(&unary, 0).unwrap().count(), 1);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let sig = fixtures::group_signature();
        let algs: Vec<_> = enumerate_algebras(&sig, 2).unwrap().collect();
        let keys: Vec<Vec<usize>> = algs
            .iter()
            .map(|a| a.tables().iter().flat_map(|t| t.table().to_vec()).collect())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_carrier_conventions() {
        let sig = Signature::from_symbols([("f", 1)]).unwrap();
        let alg = FiniteAlgebra::new("empty", sig.clone(), 0, vec![vec![]]).unwrap();
        let t = Term::parse(&sig, 2, "f(x1)").unwrap();
        assert!(interpret(&alg, &t).unwrap().table().is_empty());
        assert!(satisfies(&alg, &eq(&sig, "f(x1) = x2 @2")).unwrap());
        let grp = fixtures::group_signature();
        assert!(matches!(
            FiniteAlgebra::new("bad", grp, 0, vec![vec![], vec![], vec![]]),
            Err(AlgebraError::EmptyCarrierWithNullary(_))
        ));
    }

    #[test]
    fn consequence_examples() {
        let grp = fixtures::group_presentation();
        let sig = grp.signature().clone();
        assert_eq!(
            semantic_consequence_bounded(&grp, &eq(&sig, "m(e,x1) = x1 @1"), 3).unwrap(),
            Consequence::HoldsUpTo(3)
        );
        match semantic_consequence_bounded(&grp, &eq(&sig, "x1 = x2 @2"), 2).unwrap() {
            Consequence::Countermodel(alg) => assert_eq!(alg.tables(), fixtures::z2().tables()),
            other => panic!("expected Z2, got {other:?}"),
        }
        let free = Presentation::new("none", sig.clone(), vec![]).unwrap();
        match semantic_consequence_bounded(&free, &eq(&sig, "m(x1,e) = x1 @1"), 2).unwrap() {
            Consequence::Countermodel(alg) => {
                assert!(!satisfies(&alg, &eq(&sig, "m(x1,e) = x1 @1")).unwrap())
            }
            other => panic!("expected a countermodel, got {other:?}"),
        }
    }

    #[test]
    fn fixtures_are_tried_first() {
        let grp = fixtures::group_presentation();
        let comm = eq(grp.signature(), "m(x1,x2) = m(x2,x1) @2");
        assert_eq!(
            semantic_consequence_bounded(&grp, &comm, 3).unwrap(),
            Consequence::HoldsUpTo(3)
        );
        match semantic_consequence_with_fixtures(&grp, &comm, 3, &[fixtures::z3(), fixtures::s3()])
            .unwrap()
        {
            Consequence::Countermodel(alg) => assert_eq!(alg.name(), "s3"),
            other => panic!("expected S3, got {other:?}"),
        }
    }

    #[test]
    fn compiled_models_match_interpreted_check() {
        let grp = fixtures::group_presentation();
        let fast = models(&grp, 2).unwrap();
        let slow: Vec<_> = enumerate_algebras(grp.signature(), 2)
            .unwrap()
            .filter(|a| is_model(a, &grp).unwrap())
            .collect();
        assert_eq!(fast.len(), slow.len());
        assert!(fast
            .iter()
            .zip(&slow)
            .all(|(a, b)| a.tables() == b.tables()));
        assert_eq!(fast.len(), 2);
    }

    #[test]
    fn tuple_function_compose_and_index() {
        let and = TupleFunction::from_fn(2, 2, |t| t[0] & t[1]);
        let p1 = TupleFunction::projection(2, 2, 1);
        assert_eq!(and.compose(2, &[p1.clone(), p1.clone()]), p1);
        let mut out = Vec::new();
        index_tuple(3, 3, tuple_index(3, &[2, 0, 1]), &mut out);
        assert_eq!(out, vec![2, 0, 1]);
        let c = TupleFunction::constant(2, 0, 1);
        assert_eq!(c.compose(2, &[]).table(), &[1, 1, 1, 1]);
    }
}
