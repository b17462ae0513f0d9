//! Standard signatures, presentations and algebras used by tests, examples
//! and the command-line tool.

use crate::algebra::FiniteAlgebra;
use crate::term::{Presentation, Signature};

/// `{e/0, i/1, m/2}`.
pub fn group_signature() -> Signature {
    Signature::from_symbols([("e", 0), ("i", 1), ("m", 2)]).expect("valid signature")
}

/// Groups: right unit, right inverse and associativity.
pub fn group_presentation() -> Presentation {
    Presentation::from_text(
        "Grp",
        group_signature(),
        &[
            "m(x1,e) = x1 @1",
            "m(x1,i(x1)) = e @1",
            "m(m(x1,x2),x3) = m(x1,m(x2,x3)) @3",
        ],
    )
    .expect("valid presentation")
}

/// Groups with two-sided unit and inverse laws.
pub fn group_prime_presentation() -> Presentation {
    Presentation::from_text(
        "GrpPrime",
        group_signature(),
        &[
            "m(x1,e) = x1 @1",
            "m(e,x1) = x1 @1",
            "m(x1,i(x1)) = e @1",
            "m(i(x1),x1) = e @1",
            "m(m(x1,x2),x3) = m(x1,m(x2,x3)) @3",
        ],
    )
    .expect("valid presentation")
}

/// `{e/0, eprime/0, i/1, m/2}`.
pub fn group_double_prime_signature() -> Signature {
    Signature::from_symbols([("e", 0), ("eprime", 0), ("i", 1), ("m", 2)]).expect("valid signature")
}

/// Groups with a second constant identified with the unit.
pub fn group_double_prime_presentation() -> Presentation {
    Presentation::from_text(
        "GrpDoublePrime",
        group_double_prime_signature(),
        &[
            "e = eprime @0",
            "m(x1,e) = x1 @1",
            "m(x1,i(x1)) = e @1",
            "m(m(x1,x2),x3) = m(x1,m(x2,x3)) @3",
        ],
    )
    .expect("valid presentation")
}

/// `{m/2}`.
pub fn semilattice_signature() -> Signature {
    Signature::from_symbols([("m", 2)]).expect("valid signature")
}

/// Semilattices: associative, commutative, idempotent.
pub fn semilattice_presentation() -> Presentation {
    Presentation::from_text(
        "Semilattice",
        semilattice_signature(),
        &[
            "m(m(x1,x2),x3) = m(x1,m(x2,x3)) @3",
            "m(x1,x2) = m(x2,x1) @2",
            "m(x1,x1) = x1 @1",
        ],
    )
    .expect("valid presentation")
}

/// Cyclic group of order `n` with `e = 0`.
pub fn cyclic_group(n: usize) -> FiniteAlgebra {
    let e = vec![0];
    let i = (0..n).map(|a| (n - a) % n).collect();
    let m = (0..n * n).map(|k| (k / n + k % n) % n).collect();
    FiniteAlgebra::new(format!("z{n}"), group_signature(), n, vec![e, i, m]).expect("valid group")
}

pub fn z2() -> FiniteAlgebra {
    cyclic_group(2)
}

pub fn z3() -> FiniteAlgebra {
    cyclic_group(3)
}

/// The six permutations of `{0,1,2}` in lexicographic order; element 0 is
/// the identity.
pub fn s3_elements() -> Vec<[usize; 3]> {
    vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ]
}

/// Symmetric group on three points. `m(a,b)` is the permutation
/// `x ↦ a(b(x))`.
pub fn s3() -> FiniteAlgebra {
    let perms = s3_elements();
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("permutation");
    let compose = |a: [usize; 3], b: [usize; 3]| [a[b[0]], a[b[1]], a[b[2]]];
    let inverse = |a: [usize; 3]| {
        let mut inv = [0; 3];
        for (x, &y) in a.iter().enumerate() {
            inv[y] = x;
        }
        inv
    };
    let i = perms.iter().map(|&a| index(inverse(a))).collect();
    let m = perms
        .iter()
        .flat_map(|&a| perms.iter().map(move |&b| (a, b)))
        .map(|(a, b)| index(compose(a, b)))
        .collect();
    FiniteAlgebra::new("s3", group_signature(), 6, vec![vec![0], i, m]).expect("valid group")
}

/// Two elements with `m` constantly 0; violates the right unit law.
pub fn broken_group() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "broken",
        group_signature(),
        2,
        vec![vec![0], vec![0, 1], vec![0, 0, 0, 0]],
    )
    .expect("valid tables")
}

/// The two-element semilattice `({0,1}, max)`.
pub fn semilattice_two() -> FiniteAlgebra {
    FiniteAlgebra::new("sl2", semilattice_signature(), 2, vec![vec![0, 1, 1, 1]])
        .expect("valid tables")
}

/// The three-element chain `({0,1,2}, max)`.
pub fn semilattice_chain3() -> FiniteAlgebra {
    let m = (0..9).map(|k| (k / 3).max(k % 3)).collect();
    FiniteAlgebra::new("chain3", semilattice_signature(), 3, vec![m]).expect("valid tables")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::is_model;

    #[test]
    fn fixtures_are_models() {
        let grp = group_presentation();
        let grp2 = group_prime_presentation();
        for g in [z2(), z3(), s3()] {
            assert!(is_model(&g, &grp).unwrap(), "{}", g.name());
            assert!(is_model(&g, &grp2).unwrap(), "{}", g.name());
        }
        assert!(!is_model(&broken_group(), &grp).unwrap());
        let sl = semilattice_presentation();
        assert!(is_model(&semilattice_two(), &sl).unwrap());
        assert!(is_model(&semilattice_chain3(), &sl).unwrap());
    }

    #[test]
    fn s3_is_not_abelian() {
        let s = s3();
        let m = s.tables()[2].clone();
        assert_ne!(m.apply(&[1, 2]), m.apply(&[2, 1]));
    }
}
