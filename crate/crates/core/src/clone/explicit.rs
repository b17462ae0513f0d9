use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::algebra::TupleFunction;
use crate::clone::{check_arity, check_proj, AbstractClone, CloneError, Indexed};
use crate::term::Signature;

/// A composition `(n, φ, θs)` and the index of its result.
pub type CompositionEntry = ((usize, usize, Vec<usize>), usize);

/// Compose is stored as a lookup table when the levels hold at most this
/// many elements in total.
pub const TABULATE_ELEMENTS: usize = 512;

/// ... and the table has at most this many entries.
const TABULATE_ENTRIES: u128 = 1 << 20;

/// `(n, k, φ, θs)`: `φ` of arity `k` applied to `θs` of arity `n`.
type ComposeKey = (usize, usize, usize, Vec<usize>);

/// Operations on `0..m` backing a clone, with a reverse index per level.
#[derive(Debug, Clone)]
struct Functions {
    m: usize,
    levels: Vec<Vec<TupleFunction>>,
    index: Vec<HashMap<TupleFunction, usize>>,
}

/// A clone with finitely many named elements in each arity up to the cap.
///
/// Composition is either a stored table or computed from operation tables.
/// The clone laws are not enforced on construction; see
/// [`check_clone_axioms`](crate::clone::check_clone_axioms).
#[derive(Debug, Clone)]
pub struct ExplicitClone {
    cap: usize,
    names: Vec<Vec<String>>,
    projections: Vec<Vec<usize>>,
    functions: Option<Functions>,
    table: Option<HashMap<ComposeKey, usize>>,
}

fn default_names(levels: &[Vec<Option<usize>>]) -> Vec<Vec<String>> {
    levels
        .iter()
        .enumerate()
        .map(|(n, level)| {
            level
                .iter()
                .enumerate()
                .map(|(j, p)| match p {
                    Some(i) => format!("p{n}_{i}"),
                    None => format!("c{n}_{j}"),
                })
                .collect()
        })
        .collect()
}

fn mixed_radix_count(sizes: &[Vec<String>], cap: usize) -> u128 {
    let mut total: u128 = 0;
    for k in 0..=cap {
        for n in 0..=cap {
            let phis = sizes[k].len() as u128;
            let thetas = (sizes[n].len() as u128)
                .checked_pow(k as u32)
                .unwrap_or(u128::MAX);
            total = total.saturating_add(phis.saturating_mul(thetas));
        }
    }
    total
}

impl ExplicitClone {
    /// A clone whose level `n` is `levels[n]`, a list of distinct operations of
    /// arity `n` on `0..m` containing the projections.
    pub fn from_functions(m: usize, levels: Vec<Vec<TupleFunction>>) -> Result<Self, CloneError> {
        let cap = levels
            .len()
            .checked_sub(1)
            .ok_or(CloneError::ArityMismatch("no levels given".into()))?;
        let mut index = Vec::with_capacity(levels.len());
        let mut projections = Vec::with_capacity(levels.len());
        let mut marks = Vec::with_capacity(levels.len());
        for (n, level) in levels.iter().enumerate() {
            let mut map = HashMap::with_capacity(level.len());
            for (j, f) in level.iter().enumerate() {
                if f.arity() != n || f.carrier() != m {
                    return Err(CloneError::NotAnElement(format!(
                        "{f:?} in level {n} on {m} elements"
                    )));
                }
                if map.insert(f.clone(), j).is_some() {
                    return Err(CloneError::NotAnElement(format!(
                        "{f:?} occurs twice in level {n}"
                    )));
                }
            }
            let ps = (1..=n)
                .map(|i| {
                    map.get(&TupleFunction::projection(m, n, i))
                        .copied()
                        .ok_or_else(|| {
                            CloneError::NotAnElement(format!("projection p({n},{i}) is missing"))
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut mark = vec![None; level.len()];
            for (i, &j) in ps.iter().enumerate() {
                mark[j] = Some(i + 1);
            }
            marks.push(mark);
            projections.push(ps);
            index.push(map);
        }
        let mut c = ExplicitClone {
            cap,
            names: default_names(&marks),
            projections,
            functions: Some(Functions { m, levels, index }),
            table: None,
        };
        if c.total_elements() <= TABULATE_ELEMENTS
            && mixed_radix_count(&c.names, cap) <= TABULATE_ENTRIES
        {
            c.materialize()?;
        }
        Ok(c)
    }

    /// A clone given by element names per level, the positions of the
    /// projections, and composition entries `((n, φ, θs), result)` with `φ`
    /// indexed in level `θs.len()` and everything else in level `n`.
    pub fn from_parts(
        names: Vec<Vec<String>>,
        projections: Vec<Vec<usize>>,
        entries: Vec<CompositionEntry>,
    ) -> Result<Self, CloneError> {
        let cap = names
            .len()
            .checked_sub(1)
            .ok_or(CloneError::ArityMismatch("no levels given".into()))?;
        if projections.len() != names.len() {
            return Err(CloneError::ArityMismatch(
                "one projection list per level is required".into(),
            ));
        }
        for (n, ps) in projections.iter().enumerate() {
            if ps.len() != n || ps.iter().any(|&j| j >= names[n].len()) {
                return Err(CloneError::NotAnElement(format!(
                    "bad projections for level {n}"
                )));
            }
        }
        for (n, level) in names.iter().enumerate() {
            let mut seen = HashSet::new();
            if let Some(dup) = level.iter().find(|s| !seen.insert(s.as_str())) {
                return Err(CloneError::NotAnElement(format!(
                    "`{dup}` occurs twice in level {n}"
                )));
            }
        }
        let mut table = HashMap::with_capacity(entries.len());
        for ((n, phi, thetas), r) in entries {
            let k = thetas.len();
            let ok = n <= cap
                && k <= cap
                && phi < names[k].len()
                && r < names[n].len()
                && thetas.iter().all(|&t| t < names[n].len());
            if !ok {
                return Err(CloneError::NotAnElement(format!(
                    "composition entry ({n}, {phi}, {thetas:?}) -> {r}"
                )));
            }
            table.insert((n, k, phi, thetas), r);
        }
        Ok(ExplicitClone {
            cap,
            names,
            projections,
            functions: None,
            table: Some(table),
        })
    }

    /// Copies levels `0..=cap` of any clone, with its full composition table.
    pub fn tabulate<C: AbstractClone>(c: &C, cap: usize) -> Result<Self, CloneError> {
        let levels: Vec<Vec<C::Elem>> =
            (0..=cap).map(|n| c.carrier(n)).collect::<Result<_, _>>()?;
        let index: Vec<HashMap<&C::Elem, usize>> = levels
            .iter()
            .map(|l| l.iter().enumerate().map(|(j, e)| (e, j)).collect())
            .collect();
        let find = |n: usize, e: &C::Elem| {
            index[n]
                .get(e)
                .copied()
                .ok_or_else(|| CloneError::NotAnElement(c.describe(e)))
        };
        let projections: Vec<Vec<usize>> = (0..=cap)
            .map(|n| {
                (1..=n)
                    .map(|i| find(n, &c.proj(n, i)?))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        let mut marks: Vec<Vec<Option<usize>>> =
            levels.iter().map(|l| vec![None; l.len()]).collect();
        for (n, ps) in projections.iter().enumerate() {
            for (i, &j) in ps.iter().enumerate() {
                marks[n][j] = Some(i + 1);
            }
        }
        let names = default_names(&marks);
        let mut entries = Vec::new();
        for k in 0..=cap {
            for n in 0..=cap {
                for_each_tuple(levels[n].len(), k, |tuple| {
                    let thetas: Vec<C::Elem> =
                        tuple.iter().map(|&t| levels[n][t].clone()).collect();
                    for (phi, e) in levels[k].iter().enumerate() {
                        let r = find(n, &c.compose(e, &thetas, n)?)?;
                        entries.push(((n, phi, tuple.to_vec()), r));
                    }
                    Ok(())
                })?;
            }
        }
        Self::from_parts(names, projections, entries)
    }

    /// Replaces generated names; `names[n]` must have one entry per element.
    pub fn with_names(mut self, names: Vec<Vec<String>>) -> Result<Self, CloneError> {
        if names.len() != self.names.len()
            || names
                .iter()
                .zip(&self.names)
                .any(|(a, b)| a.len() != b.len())
        {
            return Err(CloneError::ArityMismatch(
                "name lists do not match the levels".into(),
            ));
        }
        self.names = names;
        Ok(self)
    }

    /// Stores composition as a table (a no-op if it already is one).
    pub fn materialize(&mut self) -> Result<(), CloneError> {
        if self.table.is_some() {
            return Ok(());
        }
        let mut table = HashMap::new();
        for k in 0..=self.cap {
            for n in 0..=self.cap {
                let len = self.names[n].len();
                for_each_tuple(len, k, |tuple| {
                    let thetas: Vec<Indexed> = tuple.iter().map(|&t| Indexed::new(n, t)).collect();
                    for phi in 0..self.names[k].len() {
                        // Composites outside the levels stay undefined.
                        match self.compose(&Indexed::new(k, phi), &thetas, n) {
                            Ok(r) => {
                                table.insert((n, k, phi, tuple.to_vec()), r.index);
                            }
                            Err(CloneError::Undefined(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                    Ok(())
                })?;
            }
        }
        self.table = Some(table);
        Ok(())
    }

    /// Overrides one composition entry, e.g. to plant a defect.
    pub fn set_compose(
        &mut self,
        phi: Indexed,
        thetas: &[Indexed],
        result: Indexed,
    ) -> Result<(), CloneError> {
        check_arity(self, &phi, thetas, result.arity)?;
        for e in thetas.iter().chain([&phi, &result]) {
            self.check(e)?;
        }
        self.materialize()?;
        let key = (
            result.arity,
            phi.arity,
            phi.index,
            thetas.iter().map(|t| t.index).collect(),
        );
        self.table
            .as_mut()
            .expect("materialized")
            .insert(key, result.index);
        Ok(())
    }

    pub fn is_tabulated(&self) -> bool {
        self.table.is_some()
    }

    pub fn carrier_sizes(&self) -> Vec<usize> {
        self.names.iter().map(Vec::len).collect()
    }

    pub fn total_elements(&self) -> usize {
        self.names.iter().map(Vec::len).sum()
    }

    pub fn name(&self, e: &Indexed) -> &str {
        &self.names[e.arity][e.index]
    }

    pub fn names(&self) -> &[Vec<String>] {
        &self.names
    }

    pub fn lookup(&self, arity: usize, name: &str) -> Option<Indexed> {
        let j = self.names.get(arity)?.iter().position(|s| s == name)?;
        Some(Indexed::new(arity, j))
    }

    /// The operation behind an element, for clones built from operations.
    pub fn function(&self, e: &Indexed) -> Option<&TupleFunction> {
        self.functions.as_ref()?.levels.get(e.arity)?.get(e.index)
    }

    /// Carrier size of the underlying operations, if any.
    pub fn base_size(&self) -> Option<usize> {
        self.functions.as_ref().map(|f| f.m)
    }

    /// The element names as a signature (level `n` becomes the `n`-ary
    /// symbols).
    pub fn signature(&self) -> Result<Signature, CloneError> {
        let pairs: Vec<(&str, usize)> = self
            .names
            .iter()
            .enumerate()
            .flat_map(|(n, level)| level.iter().map(move |s| (s.as_str(), n)))
            .collect();
        Ok(Signature::from_symbols(pairs)?)
    }

    fn check(&self, e: &Indexed) -> Result<(), CloneError> {
        if e.arity > self.cap {
            return Err(CloneError::ArityCapExceeded {
                arity: e.arity,
                cap: self.cap,
            });
        }
        if e.index >= self.names[e.arity].len() {
            return Err(CloneError::NotAnElement(e.to_string()));
        }
        Ok(())
    }

    /// The text form read by [`ExplicitClone::parse`].
    pub fn to_text(&self) -> Result<String, CloneError> {
        let mut clone = self.clone();
        clone.materialize()?;
        let mut out = String::new();
        writeln!(out, "clone {}", self.cap).expect("write to string");
        for (n, level) in self.names.iter().enumerate() {
            writeln!(
                out,
                "level {n}{}",
                level.iter().map(|s| format!(" {s}")).collect::<String>()
            )
            .expect("write to string");
        }
        for (n, ps) in self.projections.iter().enumerate() {
            for (i, &j) in ps.iter().enumerate() {
                writeln!(out, "proj {n} {} {}", i + 1, self.names[n][j]).expect("write to string");
            }
        }
        let mut entries: Vec<(&ComposeKey, &usize)> =
            clone.table.as_ref().expect("materialized").iter().collect();
        entries.sort();
        for ((n, k, phi, thetas), r) in entries {
            let args: String = thetas
                .iter()
                .map(|&t| format!(" {}", self.names[*n][t]))
                .collect();
            writeln!(
                out,
                "compose {n} {}{args} -> {}",
                self.names[*k][*phi], self.names[*n][*r]
            )
            .expect("write to string");
        }
        Ok(out)
    }

    /// Reads the text form:
    ///
    /// ```text
    /// clone CAP
    /// level N NAME...          # one line per arity 0..=CAP
    /// proj N I NAME            # NAME is p^(N)_I
    /// compose N PHI ARG... -> RESULT
    /// ```
    ///
    /// `PHI` lives in the level given by the number of arguments, the
    /// arguments and the result in level `N`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CloneError> {
        let err = |line: usize, msg: String| CloneError::Parse { line, msg };
        let mut cap = None;
        let mut names: Vec<Option<Vec<String>>> = Vec::new();
        let mut projections: Vec<Vec<Option<usize>>> = Vec::new();
        let mut entries = Vec::new();
        let num = |line: usize, s: Option<&str>| -> Result<usize, CloneError> {
            s.and_then(|s| s.parse().ok())
                .ok_or_else(|| err(line, "expected a number".into()))
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut words = content.split_whitespace();
            let head = words.next().expect("non-empty line");
            if head != "clone" && cap.is_none() {
                return Err(err(line, "the first line must be `clone CAP`".into()));
            }
            let level_names =
                |names: &Vec<Option<Vec<String>>>, n: usize| -> Result<Vec<String>, CloneError> {
                    names
                        .get(n)
                        .cloned()
                        .flatten()
                        .ok_or_else(|| err(line, format!("level {n} is not declared")))
                };
            let position = |level: &[String], name: &str, n: usize| -> Result<usize, CloneError> {
                level
                    .iter()
                    .position(|s| s == name)
                    .ok_or_else(|| err(line, format!("no element `{name}` of arity {n}")))
            };
            match head {
                "clone" => {
                    if cap.is_some() {
                        return Err(err(line, "duplicate `clone` line".into()));
                    }
                    let c = num(line, words.next())?;
                    cap = Some(c);
                    names = vec![None; c + 1];
                    projections = (0..=c).map(|n| vec![None; n]).collect();
                }
                "level" => {
                    let n = num(line, words.next())?;
                    let slot = names
                        .get_mut(n)
                        .ok_or_else(|| err(line, format!("level {n} exceeds the cap")))?;
                    if slot.is_some() {
                        return Err(err(line, format!("level {n} declared twice")));
                    }
                    *slot = Some(words.map(str::to_string).collect());
                    continue;
                }
                "proj" => {
                    let n = num(line, words.next())?;
                    let i = num(line, words.next())?;
                    let name = words
                        .next()
                        .ok_or_else(|| err(line, "expected an element name".into()))?;
                    let level = level_names(&names, n)?;
                    if i == 0 || i > n {
                        return Err(err(
                            line,
                            format!("projection index {i} out of range for arity {n}"),
                        ));
                    }
                    projections[n][i - 1] = Some(position(&level, name, n)?);
                }
                "compose" => {
                    let n = num(line, words.next())?;
                    let rest: Vec<&str> = words.collect();
                    let arrow = rest
                        .iter()
                        .position(|&w| w == "->")
                        .ok_or_else(|| err(line, "expected `->`".into()))?;
                    if arrow == 0 || arrow + 2 != rest.len() {
                        return Err(err(
                            line,
                            "expected `compose N PHI ARG... -> RESULT`".into(),
                        ));
                    }
                    let k = arrow - 1;
                    let phi = position(&level_names(&names, k)?, rest[0], k)?;
                    let level = level_names(&names, n)?;
                    let thetas = rest[1..arrow]
                        .iter()
                        .map(|a| position(&level, a, n))
                        .collect::<Result<Vec<_>, _>>()?;
                    let r = position(&level, rest[arrow + 1], n)?;
                    entries.push(((n, phi, thetas), r));
                }
                other => return Err(err(line, format!("unknown directive `{other}`"))),
            }
        }
        let Some(_) = cap else {
            return Err(err(0, "empty clone description".into()));
        };
        let names: Vec<Vec<String>> = names
            .into_iter()
            .enumerate()
            .map(|(n, l)| l.ok_or_else(|| err(0, format!("level {n} is not declared"))))
            .collect::<Result<_, _>>()?;
        let projections: Vec<Vec<usize>> = projections
            .into_iter()
            .enumerate()
            .map(|(n, ps)| {
                ps.into_iter()
                    .enumerate()
                    .map(|(i, p)| {
                        p.ok_or_else(|| {
                            err(0, format!("projection p({n},{}) is not declared", i + 1))
                        })
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Self::from_parts(names, projections, entries)
    }
}

/// Calls `f` on every `k`-tuple over `0..len`, in row-major order.
pub(crate) fn for_each_tuple(
    len: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> Result<(), CloneError>,
) -> Result<(), CloneError> {
    if len == 0 && k > 0 {
        return Ok(());
    }
    let mut t = vec![0usize; k];
    loop {
        f(&t)?;
        let mut j = k;
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            t[j] += 1;
            if t[j] < len {
                break;
            }
            t[j] = 0;
        }
    }
}

impl AbstractClone for ExplicitClone {
    type Elem = Indexed;

    fn arity_cap(&self) -> usize {
        self.cap
    }

    fn arity(&self, e: &Indexed) -> usize {
        e.arity
    }

    fn carrier(&self, n: usize) -> Result<Vec<Indexed>, CloneError> {
        if n > self.cap {
            return Err(CloneError::ArityCapExceeded {
                arity: n,
                cap: self.cap,
            });
        }
        Ok((0..self.names[n].len())
            .map(|j| Indexed::new(n, j))
            .collect())
    }

    fn proj(&self, n: usize, i: usize) -> Result<Indexed, CloneError> {
        check_proj(n, i)?;
        if n > self.cap {
            return Err(CloneError::ArityCapExceeded {
                arity: n,
                cap: self.cap,
            });
        }
        Ok(Indexed::new(n, self.projections[n][i - 1]))
    }

    fn compose(&self, phi: &Indexed, thetas: &[Indexed], n: usize) -> Result<Indexed, CloneError> {
        check_arity(self, phi, thetas, n)?;
        if n > self.cap {
            return Err(CloneError::ArityCapExceeded {
                arity: n,
                cap: self.cap,
            });
        }
        self.check(phi)?;
        for t in thetas {
            self.check(t)?;
        }
        let undefined = || {
            let args: Vec<&str> = thetas.iter().map(|t| self.name(t)).collect();
            CloneError::Undefined(format!("{}({})", self.name(phi), args.join(",")))
        };
        if let Some(table) = &self.table {
            let key = (
                n,
                phi.arity,
                phi.index,
                thetas.iter().map(|t| t.index).collect(),
            );
            return table
                .get(&key)
                .map(|&r| Indexed::new(n, r))
                .ok_or_else(undefined);
        }
        let fs = self
            .functions
            .as_ref()
            .expect("either a table or functions");
        let args: Vec<TupleFunction> = thetas
            .iter()
            .map(|t| fs.levels[n][t.index].clone())
            .collect();
        let r = fs.levels[phi.arity][phi.index].compose(n, &args);
        fs.index[n]
            .get(&r)
            .map(|&j| Indexed::new(n, j))
            .ok_or_else(undefined)
    }

    fn describe(&self, e: &Indexed) -> String {
        match self.names.get(e.arity).and_then(|l| l.get(e.index)) {
            Some(s) => format!("{s}@{}", e.arity),
            None => e.to_string(),
        }
    }
}

/// The least subclone of `End(m)` up to `arity_cap` containing `ops`, by
/// worklist closure. Levels are sorted by table. Fails once more than
/// `size_budget` elements exist.
pub fn generated_subclone(
    ops: &[TupleFunction],
    m: usize,
    arity_cap: usize,
    size_budget: usize,
) -> Result<ExplicitClone, CloneError> {
    let mut levels: Vec<Vec<TupleFunction>> = vec![Vec::new(); arity_cap + 1];
    let mut seen: Vec<HashSet<TupleFunction>> = vec![HashSet::new(); arity_cap + 1];
    let mut total = 0usize;
    let mut add =
        |levels: &mut Vec<Vec<TupleFunction>>, f: TupleFunction| -> Result<bool, CloneError> {
            let n = f.arity();
            if !seen[n].insert(f.clone()) {
                return Ok(false);
            }
            total += 1;
            if total > size_budget {
                return Err(CloneError::BudgetExceeded {
                    budget: size_budget,
                });
            }
            levels[n].push(f);
            Ok(true)
        };
    for n in 0..=arity_cap {
        for i in 1..=n {
            add(&mut levels, TupleFunction::projection(m, n, i))?;
        }
    }
    for f in ops {
        if f.arity() > arity_cap {
            return Err(CloneError::ArityCapExceeded {
                arity: f.arity(),
                cap: arity_cap,
            });
        }
        if f.carrier() != m {
            return Err(CloneError::NotAnElement(format!(
                "{f:?} is not an operation on {m} elements"
            )));
        }
        add(&mut levels, f.clone())?;
    }
    // Semi-naive: a composite is new only if it involves an element found in
    // the previous pass.
    let mut done: Vec<usize> = vec![0; arity_cap + 1];
    loop {
        let frontier: Vec<usize> = levels.iter().map(Vec::len).collect();
        if frontier == done {
            break;
        }
        for k in 0..=arity_cap {
            for n in 0..=arity_cap {
                let (phis, thetas) = (frontier[k], frontier[n]);
                let mut found = Vec::new();
                for_each_tuple(thetas, k, |tuple| {
                    let old_args = tuple.iter().all(|&t| t < done[n]);
                    let start = if old_args { done[k] } else { 0 };
                    let args: Vec<TupleFunction> =
                        tuple.iter().map(|&t| levels[n][t].clone()).collect();
                    for phi in &levels[k][start..phis] {
                        found.push(phi.compose(n, &args));
                    }
                    Ok(())
                })?;
                for f in found {
                    add(&mut levels, f)?;
                }
            }
        }
        done = frontier;
    }
    for level in &mut levels {
        level.sort();
    }
    ExplicitClone::from_functions(m, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone::{check_clone_axioms, end_clone};

    fn tf(n: usize, t: &[usize]) -> TupleFunction {
        TupleFunction::new(n, 2, t.to_vec()).unwrap()
    }

    #[test]
    fn projections_only() {
        let c = generated_subclone(&[], 2, 2, 100).unwrap();
        assert_eq!(c.carrier_sizes(), [0, 1, 2]);
        assert!(c.is_tabulated());
        assert!(check_clone_axioms(&c, 2, 1 << 20).violations.is_empty());
    }

    #[test]
    fn nand_generates_every_binary_table() {
        let c = generated_subclone(&[tf(2, &[1, 1, 1, 0])], 2, 2, 100).unwrap();
        assert_eq!(c.carrier_sizes(), [0, 4, 16]);
        let all = end_clone(2, 2).carrier(2).unwrap();
        for f in all {
            assert!(c
                .carrier(2)
                .unwrap()
                .iter()
                .any(|e| c.function(e) == Some(&f)));
        }
        assert!(matches!(
            generated_subclone(&[tf(2, &[1, 1, 1, 0])], 2, 2, 10),
            Err(CloneError::BudgetExceeded { budget: 10 })
        ));
    }

    #[test]
    fn text_round_trip() {
        let c = generated_subclone(&[tf(1, &[1, 0])], 2, 2, 100).unwrap();
        let text = c.to_text().unwrap();
        let d = ExplicitClone::parse(&text).unwrap();
        assert_eq!(d.names(), c.names());
        for n in 0..=2 {
            for k in 0..=2 {
                for phi in c.carrier(k).unwrap() {
                    for_each_tuple(c.carrier_sizes()[n], k, |t| {
                        let ts: Vec<Indexed> = t.iter().map(|&j| Indexed::new(n, j)).collect();
                        assert_eq!(
                            c.compose(&phi, &ts, n).unwrap(),
                            d.compose(&phi, &ts, n).unwrap()
                        );
                        Ok(())
                    })
                    .unwrap();
                }
            }
        }
        assert_eq!(d.to_text().unwrap(), text);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad = "clone 1\nlevel 0\nlevel 1 id\nproj 1 1 id\ncompose 1 id id -> nope\n";
        assert!(matches!(
            ExplicitClone::parse(bad),
            Err(CloneError::Parse { line: 5, .. })
        ));
        assert!(matches!(
            ExplicitClone::parse("level 0\n"),
            Err(CloneError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn compose_from_functions() {
        let id = tf(1, &[0, 1]);
        let not = tf(1, &[1, 0]);
        let c = ExplicitClone::from_functions(2, vec![vec![], vec![id, not.clone()]]).unwrap();
        let n = c.lookup(1, "c1_1").unwrap();
        assert_eq!(c.function(&n), Some(&not));
        assert_eq!(c.compose(&n, &[n], 1).unwrap(), c.proj(1, 1).unwrap());
        // Level 1 alone is not closed once a constant is added at level 0.
        let zero = TupleFunction::constant(2, 0, 0);
        let c = ExplicitClone::from_functions(2, vec![vec![zero], vec![tf(1, &[0, 1])]]).unwrap();
        let z = c.carrier(0).unwrap()[0];
        assert!(matches!(
            c.compose(&z, &[], 1),
            Err(CloneError::Undefined(_))
        ));
    }
}
