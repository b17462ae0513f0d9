use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clone::{AbstractClone, CloneError};

/// The three clone laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Law {
    /// `p^{(k)}_j ∘ (θ_1,…,θ_k) = θ_j`.
    Ca1,
    /// `θ ∘ (p^{(n)}_1,…,p^{(n)}_n) = θ`.
    Ca2,
    /// `(θ ∘ ψ) ∘ ξ = θ ∘ (ψ_1 ∘ ξ, …, ψ_k ∘ ξ)`.
    Ca3,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::Ca1 => "CA1",
            Law::Ca2 => "CA2",
            Law::Ca3 => "CA3",
        })
    }
}

/// One failed instance of a law, with the elements involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub law: Law,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.law, self.witness)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    /// Instances checked.
    pub checked: u64,
    /// Instances in the space up to the cap.
    pub instances: u128,
    /// Visited instances whose composites leave a bounded clone.
    pub skipped: u64,
    /// Every instance was checked (otherwise a random sample was).
    pub exhaustive: bool,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A family of instances: one law at fixed arities.
#[derive(Debug, Clone, Copy)]
enum Block {
    Ca1 { k: usize, j: usize, n: usize },
    Ca2 { n: usize },
    Ca3 { k: usize, l: usize, n: usize },
}

fn pow(b: usize, e: usize) -> u128 {
    (b as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}

fn block_size(b: Block, sizes: &[usize]) -> u128 {
    match b {
        Block::Ca1 { k, n, .. } => pow(sizes[n], k),
        Block::Ca2 { n } => sizes[n] as u128,
        Block::Ca3 { k, l, n } => (sizes[k] as u128)
            .saturating_mul(pow(sizes[l], k))
            .saturating_mul(pow(sizes[n], l)),
    }
}

/// Splits `index` into `len` digits of base `base`, last digit fastest.
fn digits(mut index: u128, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for d in out.iter_mut().rev() {
        *d = (index % base as u128) as usize;
        index /= base as u128;
    }
    out
}

/// Checks CA1–CA3 on levels `0..=arity_cap`: exhaustively when the instance
/// space has at most `sample_budget` elements, otherwise on `sample_budget`
/// random instances (fixed seed). Instances whose composites fail to exist
/// are reported as violations too.
pub fn check_clone_axioms<C: AbstractClone>(
    c: &C,
    arity_cap: usize,
    sample_budget: u64,
) -> AxiomReport {
    let mut violations = Vec::new();
    let mut levels = Vec::with_capacity(arity_cap + 1);
    for n in 0..=arity_cap {
        match c.carrier(n) {
            Ok(l) => levels.push(l),
            Err(e) => {
                violations.push(Violation {
                    law: Law::Ca2,
                    witness: format!("level {n} cannot be enumerated: {e}"),
                });
                return AxiomReport {
                    checked: 0,
                    skipped: 0,
                    instances: 0,
                    exhaustive: false,
                    violations,
                };
            }
        }
    }
    let sizes: Vec<usize> = levels.iter().map(Vec::len).collect();
    let mut blocks = Vec::new();
    for k in 1..=arity_cap {
        for j in 1..=k {
            for n in 0..=arity_cap {
                blocks.push(Block::Ca1 { k, j, n });
            }
        }
    }
    for n in 0..=arity_cap {
        blocks.push(Block::Ca2 { n });
    }
    for k in 0..=arity_cap {
        for l in 0..=arity_cap {
            for n in 0..=arity_cap {
                blocks.push(Block::Ca3 { k, l, n });
            }
        }
    }
    let counts: Vec<u128> = blocks.iter().map(|&b| block_size(b, &sizes)).collect();
    let total: u128 = counts.iter().fold(0u128, |a, &b| a.saturating_add(b));
    let mut skipped = 0u64;
    let mut check = |b: Block, idx: u128| match check_instance(c, &levels, b, idx) {
        Ok(()) => {}
        Err(Some(v)) => violations.push(v),
        Err(None) => skipped += 1,
    };
    let exhaustive = total <= sample_budget as u128;
    let checked = if exhaustive {
        for (&b, &count) in blocks.iter().zip(&counts) {
            for idx in 0..count {
                check(b, idx);
            }
        }
        total as u64
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c10e);
        for _ in 0..sample_budget {
            let mut r = rng.gen_range(0..total);
            let mut at = 0;
            while r >= counts[at] {
                r -= counts[at];
                at += 1;
            }
            check(blocks[at], r);
        }
        sample_budget
    };
    AxiomReport {
        checked,
        skipped,
        instances: total,
        exhaustive,
        violations,
    }
}

/// `Err(None)` marks an instance whose composites leave a bounded clone;
/// such instances are skipped.
fn check_instance<C: AbstractClone>(
    c: &C,
    levels: &[Vec<C::Elem>],
    b: Block,
    idx: u128,
) -> Result<(), Option<Violation>> {
    let show = |es: &[C::Elem]| {
        es.iter()
            .map(|e| c.describe(e))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let fail = |law: Law, witness: String| Some(Violation { law, witness });
    let err = |law: Law, e: CloneError, ctx: String| match e {
        CloneError::UniverseEscape => None,
        e => fail(law, format!("{ctx}: {e}")),
    };
    match b {
        Block::Ca1 { k, j, n } => {
            let thetas: Vec<C::Elem> = digits(idx, levels[n].len(), k)
                .into_iter()
                .map(|d| levels[n][d].clone())
                .collect();
            let ctx = || format!("p({k},{j}) ∘ ({})", show(&thetas));
            let p = c.proj(k, j).map_err(|e| err(Law::Ca1, e, ctx()))?;
            let r = c
                .compose(&p, &thetas, n)
                .map_err(|e| err(Law::Ca1, e, ctx()))?;
            if !c.equal(&r, &thetas[j - 1]) {
                return Err(fail(
                    Law::Ca1,
                    format!(
                        "{} = {}, expected {}",
                        ctx(),
                        c.describe(&r),
                        c.describe(&thetas[j - 1])
                    ),
                ));
            }
        }
        Block::Ca2 { n } => {
            let theta = &levels[n][idx as usize];
            let ctx = || format!("{} ∘ projections({n})", c.describe(theta));
            let ps = (1..=n)
                .map(|i| c.proj(n, i))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(Law::Ca2, e, ctx()))?;
            let r = c
                .compose(theta, &ps, n)
                .map_err(|e| err(Law::Ca2, e, ctx()))?;
            if !c.equal(&r, theta) {
                return Err(fail(Law::Ca2, format!("{} = {}", ctx(), c.describe(&r))));
            }
        }
        Block::Ca3 { k, l, n } => {
            let xi_count = pow(levels[n].len(), l);
            let psi_count = pow(levels[l].len(), k);
            let xi_idx = idx % xi_count.max(1);
            let rest = idx / xi_count.max(1);
            let psi_idx = rest % psi_count.max(1);
            let theta_idx = (rest / psi_count.max(1)) as usize;
            let theta = &levels[k][theta_idx];
            let psi: Vec<C::Elem> = digits(psi_idx, levels[l].len(), k)
                .into_iter()
                .map(|d| levels[l][d].clone())
                .collect();
            let xi: Vec<C::Elem> = digits(xi_idx, levels[n].len(), l)
                .into_iter()
                .map(|d| levels[n][d].clone())
                .collect();
            let ctx = || {
                format!(
                    "θ = {}, ψ = ({}), ξ = ({})",
                    c.describe(theta),
                    show(&psi),
                    show(&xi)
                )
            };
            let left = c
                .compose(theta, &psi, l)
                .and_then(|tp| c.compose(&tp, &xi, n))
                .map_err(|e| err(Law::Ca3, e, ctx()))?;
            let inner = psi
                .iter()
                .map(|p| c.compose(p, &xi, n))
                .collect::<Result<Vec<_>, _>>();
            let right = inner
                .and_then(|ps| c.compose(theta, &ps, n))
                .map_err(|e| err(Law::Ca3, e, ctx()))?;
            if !c.equal(&left, &right) {
                return Err(fail(
                    Law::Ca3,
                    format!(
                        "{}: (θ∘ψ)∘ξ = {} but θ∘(ψ∘ξ) = {}",
                        ctx(),
                        c.describe(&left),
                        c.describe(&right)
                    ),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone::{end_clone, free_term_clone, ExplicitClone, Indexed};
    use crate::fixtures;

    #[test]
    fn end_clones_satisfy_the_laws() {
        let r = check_clone_axioms(&end_clone(2, 1), 1, 1 << 20);
        assert!(r.exhaustive && r.passed(), "{:?}", r.violations);
        let r = check_clone_axioms(&end_clone(3, 1), 1, 1 << 20);
        assert!(r.exhaustive && r.passed());
        assert_eq!(r.checked as u128, r.instances);
    }

    #[test]
    fn sampling_when_over_budget() {
        let r = check_clone_axioms(&end_clone(2, 2), 2, 500);
        assert!(!r.exhaustive && r.passed());
        assert_eq!(r.checked, 500);
        assert!(r.instances > 1_000_000);
    }

    #[test]
    fn free_term_slices_satisfy_the_laws() {
        let c = free_term_clone(&fixtures::group_signature(), 3, 2);
        let r = check_clone_axioms(&c, 2, 1 << 22);
        assert!(r.exhaustive && r.passed(), "{:?}", r.violations.first());
    }

    #[test]
    fn planted_defect_is_reported() {
        let mut c = ExplicitClone::tabulate(&end_clone(2, 1), 1).unwrap();
        // p(1,1) ∘ (not) should be `not`; make it the identity instead.
        let not = c
            .carrier(1)
            .unwrap()
            .into_iter()
            .find(|e| c.name(e) == "c1_2")
            .unwrap();
        let id = c.proj(1, 1).unwrap();
        c.set_compose(id, &[not], id).unwrap();
        let r = check_clone_axioms(&c, 1, 1 << 20);
        assert!(
            r.violations
                .iter()
                .any(|v| v.law == Law::Ca1 && v.witness.contains("c1_2")),
            "{:?}",
            r.violations
        );
        let _ = Indexed::new(0, 0);
    }
}
