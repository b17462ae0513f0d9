//! Bounded congruence closure over a finite slice of the term algebra.
//!
//! The universe holds every term of context `n` up to a size bound, hash-consed
//! into an arena. Equations are instantiated by matching their sides against
//! the current classes (rounds of e-matching over a frozen snapshot), and the
//! resulting merges are propagated by congruence. Every union records its
//! reason in a proof forest, so any two merged terms have an explanation as a
//! proof tree.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::hash::{BuildHasher, Hash, Hasher};

use hashbrown::hash_table::{Entry, HashTable};
use hashbrown::DefaultHashBuilder;

use crate::logic::proof::Proof;
use crate::term::{compositions, Equation, Expr, Signature, Symbol, Term};

pub(crate) const NONE: u32 = u32::MAX;

/// Outcome of building a universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct UniverseTooLarge;

/// Hash-consed terms of one context. Node kinds `0..n` are the variables,
/// `n + s` is the `s`-th symbol of the signature.
pub(crate) struct Universe {
    sig: Signature,
    n: usize,
    kinds: Vec<u32>,
    first_child: Vec<u32>,
    children: Vec<u32>,
    sizes: Vec<u32>,
    index: HashTable<u32>,
    hasher: DefaultHashBuilder,
    /// Rank of each symbol under (name, arity), for the term order.
    sym_rank: Vec<u32>,
}

impl Universe {
    /// All terms of context `n` with at most `max_size` nodes, plus every
    /// subterm of `extra`.
    pub(crate) fn build(
        sig: &Signature,
        n: usize,
        max_size: usize,
        extra: &[&Expr],
        max_nodes: usize,
    ) -> Result<Self, UniverseTooLarge> {
        let mut sorted: Vec<(usize, &Symbol)> = sig.symbols().iter().enumerate().collect();
        sorted.sort_by(|a, b| a.1.cmp(b.1));
        let mut sym_rank = vec![0; sig.len()];
        for (rank, (i, _)) in sorted.into_iter().enumerate() {
            sym_rank[i] = rank as u32;
        }
        let mut u = Universe {
            sig: sig.clone(),
            n,
            kinds: Vec::new(),
            first_child: vec![0],
            children: Vec::new(),
            sizes: Vec::new(),
            index: HashTable::new(),
            hasher: DefaultHashBuilder::default(),
            sym_rank,
        };
        // Index 0 holds the empty range: no term has size 0.
        #[allow(clippy::single_range_in_vec_init)]
        let mut by_size: Vec<std::ops::Range<u32>> = vec![0..0];
        if max_size >= 1 {
            let start = u.len() as u32;
            for v in 0..n {
                u.intern(v as u32, &[]);
            }
            for (s, sym) in sig.symbols().iter().enumerate() {
                if sym.arity() == 0 {
                    u.intern((n + s) as u32, &[]);
                }
            }
            by_size.push(start..u.len() as u32);
        }
        let mut args = Vec::new();
        for size in 2..=max_size {
            let start = u.len() as u32;
            for (s, sym) in sig.symbols().iter().enumerate() {
                let k = sym.arity();
                if k == 0 {
                    continue;
                }
                for parts in compositions(size - 1, k) {
                    let ranges: Vec<std::ops::Range<u32>> =
                        parts.iter().map(|&p| by_size[p].clone()).collect();
                    if ranges.iter().any(|r| r.is_empty()) {
                        continue;
                    }
                    // Odometer over the argument ranges.
                    args.clear();
                    args.extend(ranges.iter().map(|r| r.start));
                    loop {
                        u.intern((n + s) as u32, &args);
                        if u.len() > max_nodes {
                            return Err(UniverseTooLarge);
                        }
                        let mut j = k;
                        loop {
                            if j == 0 {
                                break;
                            }
                            j -= 1;
                            args[j] += 1;
                            if args[j] < ranges[j].end {
                                break;
                            }
                            args[j] = ranges[j].start;
                            if j == 0 {
                                j = usize::MAX;
                                break;
                            }
                        }
                        if j == usize::MAX {
                            break;
                        }
                    }
                }
            }
            by_size.push(start..u.len() as u32);
        }
        for e in extra {
            u.insert_expr(e);
        }
        Ok(u)
    }

    pub(crate) fn len(&self) -> usize {
        self.kinds.len()
    }

    pub(crate) fn context(&self) -> usize {
        self.n
    }

    pub(crate) fn signature(&self) -> &Signature {
        &self.sig
    }

    pub(crate) fn kind(&self, x: u32) -> u32 {
        self.kinds[x as usize]
    }

    pub(crate) fn children(&self, x: u32) -> &[u32] {
        let (a, b) = (
            self.first_child[x as usize],
            self.first_child[x as usize + 1],
        );
        &self.children[a as usize..b as usize]
    }

    pub(crate) fn size(&self, x: u32) -> u32 {
        self.sizes[x as usize]
    }

    fn hash_key(&self, kind: u32, args: &[u32]) -> u64 {
        let mut h = self.hasher.build_hasher();
        kind.hash(&mut h);
        args.hash(&mut h);
        h.finish()
    }

    fn intern(&mut self, kind: u32, args: &[u32]) -> u32 {
        let hash = self.hash_key(kind, args);
        let Universe {
            index,
            kinds,
            first_child,
            children,
            sizes,
            hasher,
            ..
        } = self;
        let eq = |&x: &u32| {
            let x = x as usize;
            kinds[x] == kind
                && children[first_child[x] as usize..first_child[x + 1] as usize] == *args
        };
        if let Some(&x) = index.find(hash, eq) {
            return x;
        }
        let id = kinds.len() as u32;
        kinds.push(kind);
        children.extend_from_slice(args);
        first_child.push(children.len() as u32);
        sizes.push(1 + args.iter().map(|&a| sizes[a as usize]).sum::<u32>());
        let rehash = |&x: &u32| {
            let x = x as usize;
            let mut h = hasher.build_hasher();
            kinds[x].hash(&mut h);
            children[first_child[x] as usize..first_child[x + 1] as usize].hash(&mut h);
            h.finish()
        };
        index.insert_unique(hash, id, rehash);
        id
    }

    fn kind_of(&self, e: &Expr) -> u32 {
        match e {
            Expr::Var(i) => (*i - 1) as u32,
            Expr::App(_) => {
                let sym = e.symbol().expect("application");
                let s = self
                    .sig
                    .symbols()
                    .iter()
                    .position(|t| t == sym)
                    .expect("symbol in signature");
                (self.n + s) as u32
            }
        }
    }

    pub(crate) fn insert_expr(&mut self, e: &Expr) -> u32 {
        let args: Vec<u32> = e.args().iter().map(|a| self.insert_expr(a)).collect();
        let kind = self.kind_of(e);
        self.intern(kind, &args)
    }

    pub(crate) fn lookup_expr(&self, e: &Expr) -> Option<u32> {
        let args: Vec<u32> = e
            .args()
            .iter()
            .map(|a| self.lookup_expr(a))
            .collect::<Option<_>>()?;
        let kind = self.kind_of(e);
        let hash = self.hash_key(kind, &args);
        self.index
            .find(hash, |&x| {
                self.kinds[x as usize] == kind && self.children(x) == &args[..]
            })
            .copied()
    }

    pub(crate) fn symbol_of_kind(&self, kind: u32) -> Option<&Symbol> {
        (kind as usize)
            .checked_sub(self.n)
            .map(|s| &self.sig.symbols()[s])
    }

    pub(crate) fn expr(&self, x: u32, memo: &mut HashMap<u32, Expr>) -> Expr {
        if let Some(e) = memo.get(&x) {
            return e.clone();
        }
        let k = self.kind(x);
        let e = match self.symbol_of_kind(k) {
            None => Expr::Var(k as usize + 1),
            Some(sym) => {
                let sym = sym.clone();
                let args = self
                    .children(x)
                    .to_vec()
                    .into_iter()
                    .map(|c| self.expr(c, memo))
                    .collect();
                Expr::app(sym, args)
            }
        };
        memo.insert(x, e.clone());
        e
    }

    /// The term of node `x`, built without sharing a memo.
    pub(crate) fn term(&self, x: u32) -> Term {
        Term::from_expr_unchecked(self.n, self.expr(x, &mut HashMap::new()))
    }

    fn token(&self, x: u32) -> (u32, u32) {
        let k = self.kind(x);
        match (k as usize).checked_sub(self.n) {
            None => (0, k),
            Some(s) => (1, self.sym_rank[s]),
        }
    }

    /// The term order: node count, then preorder tokens.
    pub(crate) fn cmp_nodes(&self, a: u32, b: u32) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.size(a)
            .cmp(&self.size(b))
            .then_with(|| self.cmp_lex(a, b))
    }

    fn cmp_lex(&self, a: u32, b: u32) -> Ordering {
        // Preorder sequences are prefix-free, so comparing node by node in
        // lockstep decides the order at the first differing token.
        let mut sa = vec![a];
        let mut sb = vec![b];
        while let (Some(x), Some(y)) = (sa.pop(), sb.pop()) {
            if x == y {
                continue;
            }
            match self.token(x).cmp(&self.token(y)) {
                Ordering::Equal => {
                    sa.extend(self.children(x).iter().rev());
                    sb.extend(self.children(y).iter().rev());
                }
                other => return other,
            }
        }
        sa.len().cmp(&sb.len())
    }
}

/// A pattern node in preorder; children follow their parent.
#[derive(Debug, Clone)]
enum PNode {
    Var(usize),
    App { kind: u32, children: Vec<usize> },
}

#[derive(Debug, Clone)]
struct Pattern {
    nodes: Vec<PNode>,
}

impl Pattern {
    fn compile(u: &Universe, e: &Expr) -> Pattern {
        let mut nodes = Vec::new();
        Self::push(u, e, &mut nodes);
        Pattern { nodes }
    }

    fn push(u: &Universe, e: &Expr, nodes: &mut Vec<PNode>) -> usize {
        let at = nodes.len();
        match e {
            Expr::Var(i) => nodes.push(PNode::Var(*i - 1)),
            Expr::App(_) => {
                let sym = e.symbol().expect("application");
                let s = u
                    .sig
                    .symbols()
                    .iter()
                    .position(|t| t == sym)
                    .expect("symbol in signature");
                nodes.push(PNode::App {
                    kind: (u.n + s) as u32,
                    children: Vec::new(),
                });
                let kids: Vec<usize> = e.args().iter().map(|a| Self::push(u, a, nodes)).collect();
                if let PNode::App { children, .. } = &mut nodes[at] {
                    *children = kids;
                }
            }
        }
        at
    }
}

/// An oriented rewrite used for instantiation, with a proof of `lhs ≈ rhs`.
pub(crate) struct RuleSpec {
    lhs: Pattern,
    rhs: Pattern,
    lhs_term: Term,
    rhs_term: Term,
    proof: Proof,
    /// Variables of the rule that the left side does not bind.
    free_vars: Vec<usize>,
}

impl RuleSpec {
    fn new(u: &Universe, eq: &Equation, proof: Proof) -> RuleSpec {
        let vars = |e: &Expr| {
            let mut v = Vec::new();
            collect_vars(e, &mut v);
            v
        };
        let (vl, vr) = (vars(eq.lhs().expr()), vars(eq.rhs().expr()));
        let covers = |a: &[usize], b: &[usize]| b.iter().all(|x| a.contains(x));
        // Match the side that binds more variables.
        let (l, r, proof) = if !covers(&vl, &vr) && covers(&vr, &vl) {
            (eq.rhs(), eq.lhs(), Proof::sym(proof))
        } else {
            (eq.lhs(), eq.rhs(), proof)
        };
        let bound = vars(l.expr());
        let free_vars = vars(r.expr())
            .into_iter()
            .filter(|v| !bound.contains(v))
            .collect();
        RuleSpec {
            lhs: Pattern::compile(u, l.expr()),
            rhs: Pattern::compile(u, r.expr()),
            lhs_term: l.clone(),
            rhs_term: r.clone(),
            proof,
            free_vars,
        }
    }

    fn arity(&self) -> usize {
        self.lhs_term.context()
    }
}

fn collect_vars(e: &Expr, out: &mut Vec<usize>) {
    match e {
        Expr::Var(i) => {
            if !out.contains(&(i - 1)) {
                out.push(i - 1)
            }
        }
        Expr::App(_) => e.args().iter().for_each(|a| collect_vars(a, out)),
    }
}

/// Why two nodes were merged.
#[derive(Debug, Clone, Copy)]
enum Reason {
    Congruence,
    /// Index into `instances`.
    Instance(u32),
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    a: u32,
    b: u32,
    reason: Reason,
}

/// A recorded rule instance: `data[start..]` holds the variable bindings,
/// then one witness per left pattern node, then one per right pattern node
/// (`NONE` at variable positions).
#[derive(Debug, Clone, Copy)]
struct Instance {
    rule: u32,
    start: u32,
}

pub(crate) struct Engine {
    pub(crate) u: Universe,
    repr: Vec<u32>,
    next_member: Vec<u32>,
    class_size: Vec<u32>,
    parent_of_slot: Vec<u32>,
    use_next: Vec<u32>,
    use_head: Vec<u32>,
    use_tail: Vec<u32>,
    sigtab: HashTable<u32>,
    in_sigtab: Vec<bool>,
    fparent: Vec<u32>,
    fedge: Vec<u32>,
    edges: Vec<Edge>,
    instances: Vec<Instance>,
    inst_data: Vec<u32>,
    pending: Vec<(u32, u32, Reason)>,
    classes: usize,
    rules: Vec<RuleSpec>,
    edge_proofs: HashMap<u32, Proof>,
    expr_memo: HashMap<u32, Expr>,
    rep_cache: Option<Vec<u32>>,
}

impl Engine {
    pub(crate) fn new(u: Universe) -> Engine {
        let len = u.len();
        let slots = u.children.len();
        let mut parent_of_slot = vec![0u32; slots];
        for x in 0..len {
            let (a, b) = (u.first_child[x] as usize, u.first_child[x + 1] as usize);
            for slot in &mut parent_of_slot[a..b] {
                *slot = x as u32;
            }
        }
        let mut e = Engine {
            repr: (0..len as u32).collect(),
            next_member: (0..len as u32).collect(),
            class_size: vec![1; len],
            parent_of_slot,
            use_next: vec![NONE; slots],
            use_head: vec![NONE; len],
            use_tail: vec![NONE; len],
            sigtab: HashTable::with_capacity(len),
            in_sigtab: vec![false; len],
            fparent: vec![NONE; len],
            fedge: vec![NONE; len],
            edges: Vec::new(),
            instances: Vec::new(),
            inst_data: Vec::new(),
            pending: Vec::new(),
            classes: len,
            rules: Vec::new(),
            edge_proofs: HashMap::new(),
            expr_memo: HashMap::new(),
            rep_cache: None,
            u,
        };
        for slot in 0..slots {
            let child = e.u.children[slot];
            e.push_use(child, slot as u32);
        }
        for x in 0..len as u32 {
            if !e.u.children(x).is_empty() {
                let inserted = e.sig_insert(x);
                debug_assert!(inserted.is_none(), "universe nodes are hash-consed");
            }
        }
        e
    }

    pub(crate) fn class_count(&self) -> usize {
        self.classes
    }

    pub(crate) fn find(&self, x: u32) -> u32 {
        self.repr[x as usize]
    }

    pub(crate) fn same(&self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    pub(crate) fn add_rule(&mut self, eq: &Equation, proof: Proof) {
        let rule = RuleSpec::new(&self.u, eq, proof);
        self.rules.push(rule);
    }

    fn push_use(&mut self, class: u32, slot: u32) {
        let c = class as usize;
        if self.use_head[c] == NONE {
            self.use_head[c] = slot;
        } else {
            self.use_next[self.use_tail[c] as usize] = slot;
        }
        self.use_tail[c] = slot;
    }

    fn sig_hash(&self, x: u32) -> u64 {
        let mut h = self.u.hasher.build_hasher();
        self.u.kind(x).hash(&mut h);
        for &c in self.u.children(x) {
            self.repr[c as usize].hash(&mut h);
        }
        h.finish()
    }

    /// Inserts `x` under its current signature; returns the existing node
    /// with the same signature, if any.
    fn sig_insert(&mut self, x: u32) -> Option<u32> {
        let hash = self.sig_hash(x);
        let Engine {
            sigtab, u, repr, ..
        } = self;
        let same = |&y: &u32| {
            u.kind(x) == u.kind(y)
                && u.children(x)
                    .iter()
                    .zip(u.children(y))
                    .all(|(&a, &b)| repr[a as usize] == repr[b as usize])
        };
        let rehash = |&y: &u32| {
            let mut h = u.hasher.build_hasher();
            u.kind(y).hash(&mut h);
            for &c in u.children(y) {
                repr[c as usize].hash(&mut h);
            }
            h.finish()
        };
        match sigtab.entry(hash, same, rehash) {
            Entry::Occupied(o) => Some(*o.get()),
            Entry::Vacant(v) => {
                v.insert(x);
                self.in_sigtab[x as usize] = true;
                None
            }
        }
    }

    fn sig_remove(&mut self, x: u32) {
        if !self.in_sigtab[x as usize] {
            return;
        }
        let hash = self.sig_hash(x);
        if let Ok(o) = self.sigtab.find_entry(hash, |&y| y == x) {
            o.remove();
        }
        self.in_sigtab[x as usize] = false;
    }

    /// The canonical node with head `kind` over the given classes.
    fn sig_lookup(&self, kind: u32, classes: &[u32]) -> Option<u32> {
        let mut h = self.u.hasher.build_hasher();
        kind.hash(&mut h);
        for c in classes {
            c.hash(&mut h);
        }
        let hash = h.finish();
        self.sigtab
            .find(hash, |&y| {
                self.u.kind(y) == kind
                    && self.u.children(y).len() == classes.len()
                    && self
                        .u
                        .children(y)
                        .iter()
                        .zip(classes)
                        .all(|(&a, &b)| self.repr[a as usize] == b)
            })
            .copied()
    }

    /// The node `kind(classes)` or a leaf, as a class.
    fn lookup_class(&self, kind: u32, classes: &[u32]) -> Option<u32> {
        if classes.is_empty() {
            return self.leaf(kind).map(|x| self.find(x));
        }
        self.sig_lookup(kind, classes).map(|x| self.find(x))
    }

    fn leaf(&self, kind: u32) -> Option<u32> {
        let hash = self.u.hash_key(kind, &[]);
        self.u
            .index
            .find(hash, |&x| {
                self.u.kind(x) == kind && self.u.children(x).is_empty()
            })
            .copied()
    }

    fn enqueue(&mut self, a: u32, b: u32, reason: Reason) {
        self.pending.push((a, b, reason));
    }

    /// Processes pending merges with congruence propagation. Returns the
    /// number of unions performed.
    fn propagate(&mut self) -> usize {
        let mut unions = 0;
        while let Some((a, b, reason)) = self.pending.pop() {
            if self.union(a, b, reason) {
                unions += 1;
            }
        }
        unions
    }

    fn reroot(&mut self, x: u32) {
        let (mut prev, mut prev_edge, mut cur) = (NONE, NONE, x);
        while cur != NONE {
            let (next, ne) = (self.fparent[cur as usize], self.fedge[cur as usize]);
            self.fparent[cur as usize] = prev;
            self.fedge[cur as usize] = prev_edge;
            prev = cur;
            prev_edge = ne;
            cur = next;
        }
    }

    fn union(&mut self, a: u32, b: u32, reason: Reason) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.rep_cache = None;
        // Merge the smaller class into the larger one.
        let (small, large, from, to) =
            if self.class_size[ra as usize] <= self.class_size[rb as usize] {
                (ra, rb, a, b)
            } else {
                (rb, ra, b, a)
            };
        let e = self.edges.len() as u32;
        self.edges.push(Edge { a, b, reason });
        self.reroot(from);
        self.fparent[from as usize] = to;
        self.fedge[from as usize] = e;

        // Parents of the small class change signature.
        let mut parents = Vec::new();
        let mut slot = self.use_head[small as usize];
        while slot != NONE {
            let p = self.parent_of_slot[slot as usize];
            self.sig_remove(p);
            parents.push(p);
            slot = self.use_next[slot as usize];
        }
        // Relabel members.
        let mut x = small;
        loop {
            self.repr[x as usize] = large;
            x = self.next_member[x as usize];
            if x == small {
                break;
            }
        }
        self.next_member.swap(small as usize, large as usize);
        self.class_size[large as usize] += self.class_size[small as usize];
        self.classes -= 1;
        for p in parents {
            if self.in_sigtab[p as usize] {
                continue;
            }
            if let Some(q) = self.sig_insert(p) {
                if !self.same(p, q) {
                    self.enqueue(p, q, Reason::Congruence);
                }
            }
        }
        // Splice the use list.
        let (sh, st) = (self.use_head[small as usize], self.use_tail[small as usize]);
        if sh != NONE {
            if self.use_head[large as usize] == NONE {
                self.use_head[large as usize] = sh;
            } else {
                let lt = self.use_tail[large as usize];
                self.use_next[lt as usize] = sh;
            }
            self.use_tail[large as usize] = st;
            self.use_head[small as usize] = NONE;
            self.use_tail[small as usize] = NONE;
        }
        true
    }

    /// Smallest member of every class under the term order, indexed by class.
    pub(crate) fn reps(&mut self) -> &[u32] {
        if self.rep_cache.is_none() {
            let mut rep = vec![NONE; self.u.len()];
            for x in 0..self.u.len() as u32 {
                let c = self.find(x) as usize;
                if rep[c] == NONE || self.u.cmp_nodes(x, rep[c]) == Ordering::Less {
                    rep[c] = x;
                }
            }
            self.rep_cache = Some(rep);
        }
        self.rep_cache.as_deref().expect("just computed")
    }

    /// Class ids (one per class), ordered by their representatives.
    pub(crate) fn class_ids(&mut self) -> Vec<u32> {
        let mut ids: Vec<u32> = (0..self.u.len() as u32)
            .filter(|&x| self.find(x) == x)
            .collect();
        let reps = self.reps().to_vec();
        ids.sort_by(|&a, &b| self.u.cmp_nodes(reps[a as usize], reps[b as usize]));
        ids
    }

    /// One round of instantiation against a snapshot of the classes, with
    /// congruence propagation after each batch of matches. Returns whether
    /// the round ran to completion (it stops early once `MAX_MATCHES`
    /// instances have been considered).
    ///
    /// Batches applied mid-round leave the snapshot stale; that only hides
    /// matches, because classes never split.
    pub(crate) fn round(&mut self) -> bool {
        let reps = self.reps().to_vec();
        // Canonical nodes grouped by class.
        let len = self.u.len();
        let mut start = vec![0u32; len + 1];
        for x in 0..len {
            if self.is_enode(x as u32) {
                start[self.repr[x] as usize + 1] += 1;
            }
        }
        for i in 0..len {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut bucket = vec![0u32; start[len] as usize];
        for x in 0..len {
            if self.is_enode(x as u32) {
                let c = self.repr[x] as usize;
                bucket[fill[c] as usize] = x as u32;
                fill[c] += 1;
            }
        }
        let class_list: Vec<u32> = (0..len as u32).filter(|&x| self.find(x) == x).collect();
        let snap = Snapshot {
            start,
            bucket,
            reps,
            class_list,
        };

        let mut buf = MatchBuffer::default();
        let mut considered = 0usize;
        for r in 0..self.rules.len() {
            for roots in snap.class_list.chunks(1024) {
                self.match_rule(r, &snap, roots, &mut buf);
                if buf.meta.len() >= FLUSH_AT {
                    considered += buf.meta.len();
                    self.apply(&mut buf);
                    if considered >= MAX_MATCHES {
                        return false;
                    }
                }
            }
        }
        self.apply(&mut buf);
        true
    }

    fn apply(&mut self, buf: &mut MatchBuffer) {
        for &[lhs, rhs, at] in &buf.meta {
            if self.same(lhs, rhs) {
                continue;
            }
            let at = at as usize;
            let rule = buf.data[at] as usize;
            let width = self.rules[rule].arity()
                + self.rules[rule].lhs.nodes.len()
                + self.rules[rule].rhs.nodes.len();
            let id = self.instances.len() as u32;
            self.instances.push(Instance {
                rule: rule as u32,
                start: self.inst_data.len() as u32,
            });
            self.inst_data
                .extend_from_slice(&buf.data[at + 1..at + 1 + width]);
            self.enqueue(lhs, rhs, Reason::Instance(id));
            self.propagate();
        }
        buf.meta.clear();
        buf.data.clear();
    }

    fn is_enode(&self, x: u32) -> bool {
        self.u.children(x).is_empty() || self.in_sigtab[x as usize]
    }

    fn match_rule(&self, r: usize, snap: &Snapshot, roots: &[u32], out: &mut MatchBuffer) {
        let rule = &self.rules[r];
        let k = rule.arity();
        let mut st = MatchState {
            bound: vec![NONE; k],
            witness: vec![NONE; rule.lhs.nodes.len()],
            todo: Vec::new(),
        };
        for &c in roots {
            st.todo.clear();
            st.todo.push((0, c));
            self.search(rule, snap, &mut st, &mut |st: &MatchState| {
                self.emit(r as u32, rule, snap, st, out);
            });
        }
    }

    fn search(
        &self,
        rule: &RuleSpec,
        snap: &Snapshot,
        st: &mut MatchState,
        emit: &mut dyn FnMut(&MatchState),
    ) {
        let Some((pi, c)) = st.todo.pop() else {
            emit(st);
            return;
        };
        match &rule.lhs.nodes[pi] {
            PNode::Var(j) => {
                let j = *j;
                if st.bound[j] == NONE {
                    st.bound[j] = c;
                    self.search(rule, snap, st, emit);
                    st.bound[j] = NONE;
                } else if st.bound[j] == c {
                    self.search(rule, snap, st, emit);
                }
            }
            PNode::App { kind, children } => {
                let (a, b) = (
                    snap.start[c as usize] as usize,
                    snap.start[c as usize + 1] as usize,
                );
                for &x in &snap.bucket[a..b] {
                    if self.u.kind(x) != *kind {
                        continue;
                    }
                    st.witness[pi] = x;
                    let base = st.todo.len();
                    for (&pc, &xc) in children.iter().zip(self.u.children(x)).rev() {
                        st.todo.push((pc, self.find(xc)));
                    }
                    self.search(rule, snap, st, emit);
                    st.todo.truncate(base);
                }
                st.witness[pi] = NONE;
            }
        }
        st.todo.push((pi, c));
    }

    fn emit(
        &self,
        r: u32,
        rule: &RuleSpec,
        snap: &Snapshot,
        st: &MatchState,
        out: &mut MatchBuffer,
    ) {
        let mut bound = st.bound.clone();
        let free = &rule.free_vars;
        if free.is_empty() {
            self.emit_bound(r, rule, snap, &bound, &st.witness, out);
            return;
        }
        // Variables only on the right range over all classes.
        let total = (snap.class_list.len() as f64).powi(free.len() as i32);
        if total > 1e5 {
            return;
        }
        let mut idx = vec![0usize; free.len()];
        loop {
            for (i, &v) in free.iter().enumerate() {
                bound[v] = snap.class_list[idx[i]];
            }
            self.emit_bound(r, rule, snap, &bound, &st.witness, out);
            let mut j = free.len();
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < snap.class_list.len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    fn emit_bound(
        &self,
        r: u32,
        rule: &RuleSpec,
        snap: &Snapshot,
        bound: &[u32],
        lw: &[u32],
        out: &mut MatchBuffer,
    ) {
        let mut rw = vec![NONE; rule.rhs.nodes.len()];
        let Some(rc) = self.eval_rhs(&rule.rhs, 0, bound, &mut rw) else {
            return;
        };
        let lhs_node = match rule.lhs.nodes[0] {
            PNode::Var(j) => snap.reps[bound[j] as usize],
            PNode::App { .. } => lw[0],
        };
        let rhs_node = match rule.rhs.nodes[0] {
            PNode::Var(j) => snap.reps[bound[j] as usize],
            PNode::App { .. } => rw[0],
        };
        if self.find(lhs_node) == rc {
            return;
        }
        out.meta.push([lhs_node, rhs_node, out.data.len() as u32]);
        out.data.push(r);
        // Bindings as concrete nodes: the class representative, or any node
        // for a variable the rule does not use.
        out.data.extend(
            bound
                .iter()
                .map(|&c| if c == NONE { 0 } else { snap.reps[c as usize] }),
        );
        out.data.extend_from_slice(lw);
        out.data.extend_from_slice(&rw);
    }

    /// Class of the right side under `bound`, recording the canonical node
    /// used at each application position.
    fn eval_rhs(&self, pat: &Pattern, pi: usize, bound: &[u32], rw: &mut [u32]) -> Option<u32> {
        match &pat.nodes[pi] {
            PNode::Var(j) => Some(bound[*j]),
            PNode::App { kind, children } => {
                let classes: Vec<u32> = children
                    .iter()
                    .map(|&c| self.eval_rhs(pat, c, bound, rw))
                    .collect::<Option<_>>()?;
                let x = if classes.is_empty() {
                    self.leaf(*kind)?
                } else {
                    self.sig_lookup(*kind, &classes)?
                };
                rw[pi] = x;
                Some(self.find(x))
            }
        }
    }

    /// Every symbol applied to every tuple of classes has a class.
    pub(crate) fn closed_under_operations(&self, max_checks: u64) -> bool {
        let classes: Vec<u32> = (0..self.u.len() as u32)
            .filter(|&x| self.find(x) == x)
            .collect();
        let n = self.u.context();
        for (s, sym) in self.u.signature().symbols().iter().enumerate() {
            let k = sym.arity();
            let kind = (n + s) as u32;
            let Some(count) = (classes.len() as u64).checked_pow(k as u32) else {
                return false;
            };
            if count > max_checks {
                return false;
            }
            let mut idx = vec![0usize; k];
            let mut tuple = vec![0u32; k];
            for _ in 0..count {
                for (t, &i) in tuple.iter_mut().zip(&idx) {
                    *t = classes[i];
                }
                if self.lookup_class(kind, &tuple).is_none() {
                    return false;
                }
                for j in (0..k).rev() {
                    idx[j] += 1;
                    if idx[j] < classes.len() {
                        break;
                    }
                    idx[j] = 0;
                }
            }
        }
        true
    }

    /// The canonical node `kind(classes)`, if that application exists.
    pub(crate) fn apply_node(&self, kind: u32, classes: &[u32]) -> Option<u32> {
        if classes.is_empty() {
            return self.leaf(kind);
        }
        self.sig_lookup(kind, classes)
    }

    pub(crate) fn term(&mut self, x: u32) -> Term {
        let e = self.u.expr(x, &mut self.expr_memo);
        Term::from_expr_unchecked(self.u.context(), e)
    }

    /// A proof of `a ≈ b`; the nodes must be in one class.
    pub(crate) fn explain(&mut self, a: u32, b: u32) -> Proof {
        match self.explain_opt(a, b) {
            Some(p) => p,
            None => Proof::refl(self.term(a)),
        }
    }

    /// `None` when `a` and `b` are the same node.
    pub(crate) fn explain_opt(&mut self, a: u32, b: u32) -> Option<Proof> {
        assert!(self.same(a, b), "explain needs merged nodes");
        if a == b {
            return None;
        }
        // Ancestors of a, with their depth.
        let mut up_a = vec![a];
        let mut x = a;
        while self.fparent[x as usize] != NONE {
            x = self.fparent[x as usize];
            up_a.push(x);
        }
        let pos: HashMap<u32, usize> = up_a.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut up_b = vec![b];
        let mut y = b;
        while !pos.contains_key(&y) {
            y = self.fparent[y as usize];
            up_b.push(y);
        }
        let lca_at = pos[&y];
        let mut steps = Vec::new();
        for w in up_a[..=lca_at].windows(2) {
            steps.push(self.step(w[0]));
        }
        let mut back = Vec::new();
        for w in up_b.windows(2) {
            back.push(Proof::sym(self.step(w[0])));
        }
        steps.extend(back.into_iter().rev());
        Some(chain(steps))
    }

    /// Proof of `x ≈ parent(x)` along the forest.
    fn step(&mut self, x: u32) -> Proof {
        let e = self.fedge[x as usize];
        let edge = self.edges[e as usize];
        let p = self.edge_proof(e);
        if edge.a == x {
            p
        } else {
            debug_assert_eq!(edge.b, x);
            Proof::sym(p)
        }
    }

    /// Proof of `edge.a ≈ edge.b`.
    fn edge_proof(&mut self, e: u32) -> Proof {
        if let Some(p) = self.edge_proofs.get(&e) {
            return p.clone();
        }
        let edge = self.edges[e as usize];
        let p = match edge.reason {
            Reason::Congruence => self.congruence_proof(edge.a, edge.b),
            Reason::Instance(i) => self.instance_proof(i, edge.a, edge.b),
        };
        self.edge_proofs.insert(e, p.clone());
        p
    }

    fn congruence_proof(&mut self, a: u32, b: u32) -> Proof {
        let kind = self.u.kind(a);
        let sym = self.u.symbol_of_kind(kind).expect("application").clone();
        let (ca, cb) = (self.u.children(a).to_vec(), self.u.children(b).to_vec());
        let args: Vec<Option<Proof>> = ca
            .iter()
            .zip(&cb)
            .map(|(&x, &y)| self.explain_opt(x, y))
            .collect();
        self.cong_generic(&sym, &ca, args)
            .expect("distinct nodes differ in some argument")
    }

    /// `σ(t..) ≈ σ(t2..)` from argument proofs; `None` when all are trivial.
    fn cong_generic(
        &mut self,
        sym: &Symbol,
        lhs_args: &[u32],
        args: Vec<Option<Proof>>,
    ) -> Option<Proof> {
        if args.iter().all(Option::is_none) {
            return None;
        }
        let g = Term::generic(sym);
        let args = args
            .into_iter()
            .zip(lhs_args)
            .map(|(p, &x)| p.unwrap_or_else(|| Proof::refl(self.term(x))))
            .collect();
        let n = self.u.context();
        Some(Proof::cong(g.clone(), g.clone(), n, Proof::refl(g), args).expect("well-formed"))
    }

    fn instance_proof(&mut self, i: u32, a: u32, b: u32) -> Proof {
        let inst = self.instances[i as usize];
        let r = inst.rule as usize;
        let k = self.rules[r].arity();
        let nl = self.rules[r].lhs.nodes.len();
        let nr = self.rules[r].rhs.nodes.len();
        let s = inst.start as usize;
        let data = self.inst_data[s..s + k + nl + nr].to_vec();
        let (bind, rest) = data.split_at(k);
        let (lw, rw) = rest.split_at(nl);
        let lhs_pat = self.rules[r].lhs.clone();
        let rhs_pat = self.rules[r].rhs.clone();
        // a ≈ L[t]
        let p1 = self.match_proof(&lhs_pat, 0, a, bind, lw);
        // L[t] ≈ R[t]
        let p2 = self.rule_instance(r, bind);
        // R[t] ≈ b
        let p3 = self.match_proof(&rhs_pat, 0, b, bind, rw).map(Proof::sym);
        let parts: Vec<Proof> = [p1, p2, p3].into_iter().flatten().collect();
        if parts.is_empty() {
            unreachable!("an instance edge joins distinct nodes");
        }
        chain(parts)
    }

    /// Proof of `x ≈ P[t]` where `x` sits in the class matched by pattern
    /// node `pi`; `None` when they coincide.
    fn match_proof(
        &mut self,
        pat: &Pattern,
        pi: usize,
        x: u32,
        bind: &[u32],
        w: &[u32],
    ) -> Option<Proof> {
        match &pat.nodes[pi] {
            PNode::Var(j) => self.explain_opt(x, bind[*j]),
            PNode::App { children, .. } => {
                let y = w[pi];
                let to_witness = self.explain_opt(x, y);
                let kids = self.u.children(y).to_vec();
                let args: Vec<Option<Proof>> = children
                    .iter()
                    .zip(&kids)
                    .map(|(&pc, &c)| self.match_proof(pat, pc, c, bind, w))
                    .collect();
                let sym = self
                    .u
                    .symbol_of_kind(self.u.kind(y))
                    .expect("application")
                    .clone();
                let inner = self.cong_generic(&sym, &kids, args);
                match (to_witness, inner) {
                    (None, None) => None,
                    (Some(p), None) | (None, Some(p)) => Some(p),
                    (Some(p), Some(q)) => Some(Proof::trans(p, q).expect("same context")),
                }
            }
        }
    }

    /// `L[t] ≈ R[t]` for rule `r`.
    fn rule_instance(&mut self, r: usize, bind: &[u32]) -> Option<Proof> {
        let n = self.u.context();
        let ts: Vec<Term> = bind.iter().map(|&x| self.term(x)).collect();
        let rule = &self.rules[r];
        let identity = rule.arity() == n
            && ts
                .iter()
                .enumerate()
                .all(|(j, t)| t.is_var() == Some(j + 1));
        if identity {
            return if rule.lhs_term == rule.rhs_term {
                None
            } else {
                Some(rule.proof.clone())
            };
        }
        let (s, s2, outer) = (
            rule.lhs_term.clone(),
            rule.rhs_term.clone(),
            rule.proof.clone(),
        );
        if s == s2 {
            return None;
        }
        let args = ts.into_iter().map(Proof::refl).collect();
        Some(Proof::cong(s, s2, n, outer, args).expect("well-formed"))
    }
}

impl Engine {
    /// `x ≈ rep(x)` for every non-representative canonical application
    /// whose arguments are all representatives, with proofs.
    pub(crate) fn reduced_lemmas(&mut self) -> Vec<(Equation, Proof)> {
        let reps = self.reps().to_vec();
        let mut out = Vec::new();
        for x in 0..self.u.len() as u32 {
            if self.u.children(x).is_empty() || !self.in_sigtab[x as usize] {
                continue;
            }
            let r = reps[self.find(x) as usize];
            if r == x {
                continue;
            }
            if !self
                .u
                .children(x)
                .iter()
                .all(|&c| reps[self.find(c) as usize] == c)
            {
                continue;
            }
            let eq = Equation::new(self.term(x), self.term(r)).expect("same context");
            let p = self.explain(x, r);
            out.push((eq, p));
        }
        out
    }
}

const FLUSH_AT: usize = 1 << 16;
const MAX_MATCHES: usize = 1 << 26;

#[derive(Default)]
struct MatchBuffer {
    /// `[lhs node, rhs node, offset into data]`.
    meta: Vec<[u32; 3]>,
    /// Rule index, bindings, left witnesses, right witnesses.
    data: Vec<u32>,
}

struct Snapshot {
    start: Vec<u32>,
    bucket: Vec<u32>,
    reps: Vec<u32>,
    class_list: Vec<u32>,
}

struct MatchState {
    bound: Vec<u32>,
    witness: Vec<u32>,
    todo: Vec<(usize, u32)>,
}

/// Balanced Trans tree over a chain of proofs.
pub(crate) fn chain(mut steps: Vec<Proof>) -> Proof {
    assert!(!steps.is_empty());
    while steps.len() > 1 {
        let mut next = Vec::with_capacity(steps.len().div_ceil(2));
        let mut it = steps.into_iter();
        while let Some(p) = it.next() {
            match it.next() {
                Some(q) => next.push(Proof::trans(p, q).expect("same context")),
                None => next.push(p),
            }
        }
        steps = next;
    }
    steps.pop().expect("one left")
}
