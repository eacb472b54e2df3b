//! Built-in canonical algebras.

use crate::algebra::{FiniteAlgebra, OpTable};

/// `({0,1}, x ∨ y)`.
pub fn semilattice2() -> FiniteAlgebra {
    FiniteAlgebra::new_unchecked("s2", 2, vec![OpTable::new("join", 2, vec![0, 1, 1, 1])])
}

/// `({0,1}, maj)`.
pub fn majority2() -> FiniteAlgebra {
    let op = OpTable::from_fn("maj", 3, 2, |a| usize::from(a[0] + a[1] + a[2] >= 2));
    FiniteAlgebra::new_unchecked("m2", 2, vec![op])
}

/// `({0,1}, x ⊕ y ⊕ z)`.
pub fn affine2() -> FiniteAlgebra {
    let op = OpTable::from_fn("minority", 3, 2, |a| a[0] ^ a[1] ^ a[2]);
    FiniteAlgebra::new_unchecked("z2", 2, vec![op])
}

/// `({0,1}, π₁)`: every term operation is a projection.
pub fn projection2() -> FiniteAlgebra {
    FiniteAlgebra::new_unchecked("proj2", 2, vec![OpTable::from_fn("p", 2, 2, |a| a[0])])
}

/// Join semilattice of the chain `0 < 1 < 2`.
pub fn chain3() -> FiniteAlgebra {
    FiniteAlgebra::new_unchecked("c3", 3, vec![OpTable::from_fn("join", 2, 3, |a| a[0].max(a[1]))])
}

/// Two-element lattice.
pub fn lattice2() -> FiniteAlgebra {
    FiniteAlgebra::new_unchecked(
        "l2",
        2,
        vec![OpTable::from_fn("join", 2, 2, |a| a[0].max(a[1])), OpTable::from_fn("meet", 2, 2, |a| a[0].min(a[1]))],
    )
}

/// Rock-paper-scissors: a commutative conservative binary operation where 1 beats 0,
/// 2 beats 1 and 0 beats 2.
pub fn tournament3() -> FiniteAlgebra {
    let op = OpTable::from_fn("beats", 2, 3, |a| {
        let (x, y) = (a[0], a[1]);
        if x == y {
            x
        } else if (x + 1) % 3 == y {
            y
        } else {
            x
        }
    });
    FiniteAlgebra::new_unchecked("rps3", 3, vec![op])
}

/// `(Z_3, x - y + z)`.
pub fn affine3() -> FiniteAlgebra {
    let op = OpTable::from_fn("maltsev", 3, 3, |a| (a[0] + 2 * a[1] + a[2]) % 3);
    FiniteAlgebra::new_unchecked("z3", 3, vec![op])
}

/// Median of the chain `0 < 1 < 2`.
pub fn median3() -> FiniteAlgebra {
    let op = OpTable::from_fn("median", 3, 3, |a| {
        let mut v = [a[0], a[1], a[2]];
        v.sort_unstable();
        v[1]
    });
    FiniteAlgebra::new_unchecked("med3", 3, vec![op])
}

/// All built-in algebras, in a fixed order.
pub fn all() -> Vec<FiniteAlgebra> {
    vec![
        semilattice2(),
        majority2(),
        affine2(),
        projection2(),
        chain3(),
        lattice2(),
        tournament3(),
        affine3(),
        median3(),
    ]
}

pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    all().into_iter().find(|a| a.name == name)
}
