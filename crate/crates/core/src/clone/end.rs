use crate::algebra::{table_len, TupleFunction};
use crate::clone::{check_arity, check_proj, AbstractClone, CloneError};

/// Largest level [`EndClone::carrier`] and [`GradedHomSet::level`] enumerate.
const MAX_LEVEL: u128 = 1 << 22;

/// Largest table a composite may have.
const MAX_TABLE: usize = 1 << 24;

/// `End(A)` for `A = {0,…,m-1}`: all operations on `A` under composition.
///
/// Levels above the cap cannot be enumerated, but projections and composites
/// of any arity are computed on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndClone {
    m: usize,
    cap: usize,
}

pub fn end_clone(m: usize, arity_cap: usize) -> EndClone {
    EndClone { m, cap: arity_cap }
}

impl EndClone {
    pub fn carrier_size(&self) -> usize {
        self.m
    }

    /// `m^(m^n)`, or `None` when it does not fit.
    pub fn level_count(&self, n: usize) -> Option<u128> {
        count_tables(self.m, self.m, n)
    }

    fn table_len(&self, n: usize) -> Result<usize, CloneError> {
        table_len(self.m, n)
            .filter(|&l| l <= MAX_TABLE)
            .ok_or_else(|| CloneError::TooLarge {
                arity: n,
                reason: format!("{}^{n} table entries", self.m),
            })
    }

    fn check_elem(&self, f: &TupleFunction) -> Result<(), CloneError> {
        if f.carrier() != self.m {
            return Err(CloneError::NotAnElement(format!(
                "{f:?} is not an operation on {} elements",
                self.m
            )));
        }
        Ok(())
    }
}

impl AbstractClone for EndClone {
    type Elem = TupleFunction;

    fn arity_cap(&self) -> usize {
        self.cap
    }

    fn arity(&self, e: &TupleFunction) -> usize {
        e.arity()
    }

    fn carrier(&self, n: usize) -> Result<Vec<TupleFunction>, CloneError> {
        if n > self.cap {
            return Err(CloneError::ArityCapExceeded {
                arity: n,
                cap: self.cap,
            });
        }
        let len = self.table_len(n)?;
        let tables = enumerate_tables(self.m, self.m, n)?;
        debug_assert!(tables.iter().all(|t| t.len() == len));
        Ok(tables
            .into_iter()
            .map(|t| TupleFunction::new(n, self.m, t).expect("valid table"))
            .collect())
    }

    fn proj(&self, n: usize, i: usize) -> Result<TupleFunction, CloneError> {
        check_proj(n, i)?;
        self.table_len(n)?;
        Ok(TupleFunction::projection(self.m, n, i))
    }

    fn compose(
        &self,
        phi: &TupleFunction,
        thetas: &[TupleFunction],
        n: usize,
    ) -> Result<TupleFunction, CloneError> {
        check_arity(self, phi, thetas, n)?;
        self.check_elem(phi)?;
        for t in thetas {
            self.check_elem(t)?;
        }
        self.table_len(n)?;
        Ok(phi.compose(n, thetas))
    }

    fn describe(&self, e: &TupleFunction) -> String {
        format!("{e}@{}", e.arity())
    }
}

fn count_tables(source: usize, target: usize, n: usize) -> Option<u128> {
    let cells = u32::try_from(table_len(source, n)?).ok()?;
    (target as u128).checked_pow(cells)
}

/// Every table `source^n -> target`, in lexicographic order.
fn enumerate_tables(source: usize, target: usize, n: usize) -> Result<Vec<Vec<usize>>, CloneError> {
    let count = count_tables(source, target, n)
        .filter(|&c| c <= MAX_LEVEL)
        .ok_or_else(|| CloneError::TooLarge {
            arity: n,
            reason: format!("{target}^({source}^{n}) tables"),
        })?;
    let len = table_len(source, n).expect("counted above");
    let mut out = Vec::with_capacity(count as usize);
    if count == 0 {
        return Ok(out);
    }
    let mut t = vec![0usize; len];
    loop {
        out.push(t.clone());
        let mut j = len;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            t[j] += 1;
            if t[j] < target {
                break;
            }
            t[j] = 0;
        }
    }
}

/// `⟨A,B⟩`: level `n` is every function `A^n -> B`, as a row-major table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradedHomSet {
    pub source_size: usize,
    pub target_size: usize,
}

impl GradedHomSet {
    pub fn new(source_size: usize, target_size: usize) -> Self {
        Self {
            source_size,
            target_size,
        }
    }

    /// `m_B^(m_A^n)`, or `None` when it does not fit.
    pub fn level_count(&self, n: usize) -> Option<u128> {
        count_tables(self.source_size, self.target_size, n)
    }

    pub fn level(&self, n: usize) -> Result<Vec<Vec<usize>>, CloneError> {
        enumerate_tables(self.source_size, self.target_size, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_sizes() {
        let e = end_clone(2, 2);
        let sizes: Vec<usize> = (0..=2).map(|n| e.carrier(n).unwrap().len()).collect();
        assert_eq!(sizes, [2, 4, 16]);
        assert_eq!(end_clone(3, 1).carrier(1).unwrap().len(), 27);
        assert!(matches!(
            e.carrier(3),
            Err(CloneError::ArityCapExceeded { arity: 3, cap: 2 })
        ));
        assert_eq!(e.level_count(3), Some(256));
        assert_eq!(end_clone(0, 2).carrier(0).unwrap().len(), 0);
        assert_eq!(end_clone(0, 2).carrier(1).unwrap().len(), 1);
    }

    #[test]
    fn diagonal_of_and() {
        let e = end_clone(2, 2);
        let and = TupleFunction::new(2, 2, vec![0, 0, 0, 1]).unwrap();
        let p1 = e.proj(2, 1).unwrap();
        let d = e.compose(&and, &[p1.clone(), p1.clone()], 2).unwrap();
        assert_eq!(d, p1);
        assert!(e.compose(&and, &[p1], 2).is_err());
    }

    #[test]
    fn hom_set_levels() {
        let h = GradedHomSet::new(2, 3);
        for n in 0..=2 {
            let level = h.level(n).unwrap();
            assert_eq!(level.len() as u128, h.level_count(n).unwrap());
            assert!(level
                .iter()
                .all(|t| t.len() == 1 << n && t.iter().all(|&v| v < 3)));
        }
        assert_eq!(
            GradedHomSet::new(0, 2).level(1).unwrap(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(GradedHomSet::new(2, 0).level(0).unwrap().len(), 0);
    }
}
