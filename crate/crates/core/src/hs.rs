//! The class HS of homomorphic images of subalgebras.

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::closure::sg_unchecked;
use crate::congruence::all_congruences;
use crate::error::{Error, Result};
use crate::structure::Structure;

/// All nonempty subuniverses, largest first, then lexicographically.
pub fn subuniverses(alg: &FiniteAlgebra) -> Result<Vec<Vec<usize>>> {
    let n = alg.size;
    if n > 16 {
        return Err(Error::CapExceeded { what: "subuniverse enumeration (universe size)".into(), cap: 16 });
    }
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let elems: Vec<usize> = (0..n).filter(|&x| mask & (1 << x) != 0).collect();
        if sg_unchecked(alg, &elems).len() == elems.len() {
            out.push(elems);
        }
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// How a member of the class was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Origin {
    pub base: usize,
    pub subuniverse: Vec<usize>,
    /// Block-id array of the congruence factored out, if any.
    pub congruence: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct ClassMember {
    pub structure: Structure,
    pub origin: Origin,
    /// Index of an earlier member with identical operation tables.
    pub duplicate_of: Option<usize>,
}

/// Subalgebras of every base and their quotients by nontrivial congruences.
pub fn hs_members(bases: &[FiniteAlgebra], cap: usize, lattice_cap: usize) -> Result<Vec<ClassMember>> {
    let mut out: Vec<ClassMember> = Vec::new();
    for (j, alg) in bases.iter().enumerate() {
        let base = Structure::base(alg, j);
        for sub in subuniverses(alg)? {
            let s = if sub.len() == alg.size { base.clone() } else { base.sub(&sub, format!("{}{{{}}}", alg.name, join(&sub))) };
            push(&mut out, s.clone(), Origin { base: j, subuniverse: sub.clone(), congruence: None }, cap)?;
            if s.size() < 2 {
                continue;
            }
            for theta in all_congruences(&s.alg, lattice_cap)? {
                if theta.is_equality() {
                    continue;
                }
                let name = format!("{}/{}", s.name(), blocks_label(&theta.blocks()));
                let q = s.quotient(&theta, name);
                let origin = Origin { base: j, subuniverse: sub.clone(), congruence: Some(theta.block_ids().to_vec()) };
                push(&mut out, q, origin, cap)?;
            }
        }
    }
    Ok(out)
}

fn push(out: &mut Vec<ClassMember>, structure: Structure, origin: Origin, cap: usize) -> Result<()> {
    if out.len() >= cap {
        return Err(Error::CapExceeded { what: "HS class".into(), cap });
    }
    let duplicate_of = out
        .iter()
        .position(|m| m.structure.alg.size == structure.alg.size && m.structure.alg.operations == structure.alg.operations);
    out.push(ClassMember { structure, origin, duplicate_of });
    Ok(())
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn blocks_label(blocks: &[Vec<usize>]) -> String {
    blocks.iter().map(|b| join(b)).collect::<Vec<_>>().join("|")
}

/// The members of HS(A) as plain algebras; duplicates are kept.
pub fn hs_class(alg: &FiniteAlgebra, cap: usize) -> Result<Vec<FiniteAlgebra>> {
    Ok(hs_members(std::slice::from_ref(alg), cap, 10_000)?.into_iter().map(|m| m.structure.alg).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::OpTable;

    #[test]
    fn hs_of_two_element_algebras() {
        for alg in [corpus::semilattice2(), corpus::affine2()] {
            let class = hs_class(&alg, 100).unwrap();
            let sizes: Vec<usize> = class.iter().map(|a| a.size).collect();
            assert_eq!(sizes, vec![2, 1, 1, 1]);
            assert_eq!(class[0].operations, alg.operations);
        }
        let members = hs_members(&[corpus::semilattice2()], 100, 100).unwrap();
        assert_eq!(members[1].duplicate_of, None);
        assert_eq!(members[2].duplicate_of, Some(1));
        assert_eq!(members[3].duplicate_of, Some(1));
    }

    #[test]
    fn hs_of_trivial_algebra() {
        let one = FiniteAlgebra::new("one", 1, vec![OpTable::new("f", 2, vec![0])]).unwrap();
        assert_eq!(hs_class(&one, 10).unwrap().len(), 1);
    }

    #[test]
    fn subuniverses_of_chain() {
        let subs = subuniverses(&corpus::chain3()).unwrap();
        assert_eq!(subs.len(), 7);
        let subs = subuniverses(&corpus::affine3()).unwrap();
        // Z3 with x-y+z: singletons and the whole set
        assert_eq!(subs.len(), 4);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(hs_class(&corpus::chain3(), 3), Err(Error::CapExceeded { .. })));
    }
}
