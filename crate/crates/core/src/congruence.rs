//! Partitions, congruences, tolerances and link congruences.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{all_tuples, FiniteAlgebra, OpTable};
use crate::closure::Subpower;
use crate::error::{Error, Result};

/// Union-find with path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two distinct classes were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    pub fn into_partition(mut self) -> Partition {
        let labels: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Partition::from_labels(&labels)
    }
}

/// An equivalence relation on `0..n`, as block ids in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    block_id: Vec<usize>,
}

impl Partition {
    /// Normalizes arbitrary labels so block ids appear in first-occurrence order.
    pub fn from_labels<T: Eq + std::hash::Hash + Clone>(labels: &[T]) -> Partition {
        let mut ids: HashMap<T, usize> = HashMap::new();
        let block_id = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Partition { block_id }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= n || labels[x] != usize::MAX {
                    return Err(Error::InvalidArgument(format!("blocks do not partition 0..{}", n)));
                }
                labels[x] = b;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::InvalidArgument(format!("blocks do not cover 0..{}", n)));
        }
        Ok(Partition::from_labels(&labels))
    }

    pub fn equality(n: usize) -> Partition {
        Partition { block_id: (0..n).collect() }
    }

    pub fn full(n: usize) -> Partition {
        Partition { block_id: vec![0; n] }
    }

    pub fn size(&self) -> usize {
        self.block_id.len()
    }

    pub fn block_ids(&self) -> &[usize] {
        &self.block_id
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_id[x]
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.block_id[x] == self.block_id[y]
    }

    pub fn num_blocks(&self) -> usize {
        self.block_id.iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_equality(&self) -> bool {
        self.num_blocks() == self.size()
    }

    pub fn is_full(&self) -> bool {
        self.num_blocks() <= 1
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (x, &b) in self.block_id.iter().enumerate() {
            blocks[b].push(x);
        }
        blocks
    }

    pub fn block(&self, x: usize) -> Vec<usize> {
        let b = self.block_id[x];
        (0..self.size()).filter(|&y| self.block_id[y] == b).collect()
    }

    /// `self ⊆ other` as relations.
    pub fn refines(&self, other: &Partition) -> bool {
        let mut image = vec![usize::MAX; self.num_blocks()];
        for (x, &b) in self.block_id.iter().enumerate() {
            let ob = other.block_id[x];
            if image[b] == usize::MAX {
                image[b] = ob;
            } else if image[b] != ob {
                return false;
            }
        }
        true
    }

    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.size());
        for blocks in [self.blocks(), other.blocks()] {
            for block in blocks {
                for w in block.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        uf.into_partition()
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        let labels: Vec<(usize, usize)> = (0..self.size()).map(|x| (self.block_id[x], other.block_id[x])).collect();
        Partition::from_labels(&labels)
    }

    /// Restriction to the listed elements, re-indexed by position in `elems`.
    pub fn restrict(&self, elems: &[usize]) -> Partition {
        let labels: Vec<usize> = elems.iter().map(|&x| self.block_id[x]).collect();
        Partition::from_labels(&labels)
    }

    /// Checks compatibility with every operation, reporting a violating pair of argument tuples.
    pub fn check_compatible(&self, alg: &FiniteAlgebra) -> Result<()> {
        let n = alg.size;
        let blocks = self.blocks();
        for op in &alg.operations {
            for block in &blocks {
                let rep = block[0];
                for &y in &block[1..] {
                    for p in 0..op.arity {
                        for ctx in all_tuples(n, op.arity - 1) {
                            let mut left = ctx.clone();
                            left.insert(p, rep);
                            let mut right = ctx;
                            right.insert(p, y);
                            if !self.related(op.apply(n, &left), op.apply(n, &right)) {
                                return Err(Error::NotACongruence { op: op.name.clone(), left, right });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_congruence(&self, alg: &FiniteAlgebra) -> bool {
        self.size() == alg.size && self.check_compatible(alg).is_ok()
    }
}

/// Least congruence of `alg` containing `pairs`.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Partition {
    cg_from(alg, &Partition::equality(alg.size), pairs)
}

/// Least congruence containing `base` (any equivalence) and `pairs`.
pub(crate) fn cg_from(alg: &FiniteAlgebra, base: &Partition, pairs: &[(usize, usize)]) -> Partition {
    let n = alg.size;
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(usize, usize)> = Vec::new();
    for block in base.blocks() {
        for w in block.windows(2) {
            if uf.union(w[0], w[1]) {
                work.push((w[0], w[1]));
            }
        }
    }
    for &(a, b) in pairs {
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    let contexts: Vec<Vec<Vec<usize>>> =
        alg.operations.iter().map(|op| all_tuples(n, op.arity - 1).collect()).collect();
    while let Some((x, y)) = work.pop() {
        for (op, ctxs) in alg.operations.iter().zip(&contexts) {
            for p in 0..op.arity {
                for ctx in ctxs {
                    let mut args = ctx.clone();
                    args.insert(p, x);
                    let u = op.apply(n, &args);
                    args[p] = y;
                    let v = op.apply(n, &args);
                    if uf.union(u, v) {
                        work.push((u, v));
                    }
                }
            }
        }
    }
    uf.into_partition()
}

/// The congruence lattice, obtained by closing principal congruences under join.
pub fn all_congruences(alg: &FiniteAlgebra, cap: usize) -> Result<Vec<Partition>> {
    let n = alg.size;
    let mut found: Vec<Partition> = vec![Partition::equality(n)];
    let mut principal: Vec<Partition> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = cg(alg, &[(a, b)]);
            if !found.contains(&p) {
                found.push(p.clone());
                principal.push(p);
            }
        }
    }
    // every congruence is a join of principal ones
    let mut lo = 1;
    while lo < found.len() {
        let hi = found.len();
        for i in lo..hi {
            for p in &principal {
                let j = found[i].join(p);
                if !found.contains(&j) {
                    found.push(j);
                    if found.len() > cap {
                        return Err(Error::CapExceeded { what: "congruence lattice".into(), cap });
                    }
                }
            }
        }
        lo = hi;
    }
    found.sort_by(|a, b| b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.cmp(b)));
    Ok(found)
}

/// Congruences covered only by the full congruence.
pub fn maximal_congruences(alg: &FiniteAlgebra, cap: usize) -> Result<Vec<Partition>> {
    let all = all_congruences(alg, cap)?;
    Ok(maximal_among(&all))
}

pub(crate) fn maximal_among(all: &[Partition]) -> Vec<Partition> {
    all.iter()
        .filter(|t| !t.is_full())
        .filter(|t| !all.iter().any(|u| !u.is_full() && u != *t && t.refines(u)))
        .cloned()
        .collect()
}

/// Simplicity verdict; one-element algebras are reported as degenerate and not simple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Simplicity {
    Simple,
    NotSimple,
    Degenerate,
}

pub fn simplicity(alg: &FiniteAlgebra) -> Simplicity {
    if alg.size < 2 {
        return Simplicity::Degenerate;
    }
    // simple iff every principal congruence is full
    for a in 0..alg.size {
        for b in a + 1..alg.size {
            if !cg(alg, &[(a, b)]).is_full() {
                return Simplicity::NotSimple;
            }
        }
    }
    Simplicity::Simple
}

pub fn is_simple(alg: &FiniteAlgebra) -> bool {
    simplicity(alg) == Simplicity::Simple
}

/// Quotient algebra on the blocks of a congruence, with the canonical surjection.
pub fn quotient(alg: &FiniteAlgebra, theta: &Partition) -> Result<(FiniteAlgebra, Vec<usize>)> {
    if theta.size() != alg.size {
        return Err(Error::InvalidArgument("partition size differs from the universe".into()));
    }
    theta.check_compatible(alg)?;
    Ok((quotient_unchecked(alg, theta), theta.block_ids().to_vec()))
}

pub(crate) fn quotient_unchecked(alg: &FiniteAlgebra, theta: &Partition) -> FiniteAlgebra {
    let reps: Vec<usize> = theta.blocks().iter().map(|b| b[0]).collect();
    let m = reps.len();
    let ops = alg
        .operations
        .iter()
        .map(|op| {
            OpTable::from_fn(op.name.clone(), op.arity, m, |args| {
                let outer: Vec<usize> = args.iter().map(|&c| reps[c]).collect();
                theta.block_of(op.apply(alg.size, &outer))
            })
        })
        .collect();
    FiniteAlgebra::new_unchecked(format!("{}/θ", alg.name), m, ops)
}

/// A reflexive symmetric relation on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tolerance {
    size: usize,
    bits: Vec<bool>,
}

impl Tolerance {
    pub fn identity(n: usize) -> Tolerance {
        let mut bits = vec![false; n * n];
        for x in 0..n {
            bits[x * n + x] = true;
        }
        Tolerance { size: n, bits }
    }

    pub fn add(&mut self, a: usize, b: usize) {
        self.bits[a * self.size + b] = true;
        self.bits[b * self.size + a] = true;
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.size + b]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.size;
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| self.contains(a, b)).collect()
    }

    pub fn is_equality(&self) -> bool {
        self.pairs().iter().all(|&(a, b)| a == b)
    }

    pub fn transitive_closure(&self) -> Partition {
        let mut uf = UnionFind::new(self.size);
        for (a, b) in self.pairs() {
            uf.union(a, b);
        }
        uf.into_partition()
    }

    /// Compatibility with every operation of `alg`, checked on all related argument tuples.
    pub fn is_compatible(&self, alg: &FiniteAlgebra) -> bool {
        let pairs = self.pairs();
        alg.operations.iter().all(|op| {
            let k = op.arity;
            let total = pairs.len().pow(k as u32);
            (0..total).all(|mut code| {
                let mut left = vec![0; k];
                let mut right = vec![0; k];
                for slot in (0..k).rev() {
                    let (a, b) = pairs[code % pairs.len()];
                    code /= pairs.len();
                    left[slot] = a;
                    right[slot] = b;
                }
                self.contains(op.apply(alg.size, &left), op.apply(alg.size, &right))
            })
        })
    }
}

/// Pairs of `i`-th coordinates of tuples of `r` that agree everywhere else.
pub fn link_tolerance(r: &Subpower, i: usize) -> Result<Tolerance> {
    if i >= r.arity() {
        return Err(Error::InvalidArgument(format!("coordinate {} out of range", i)));
    }
    if r.coordinate_values(i).len() != r.factors()[i].size {
        return Err(Error::NotSubdirect(i));
    }
    let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for t in r.tuples() {
        let mut rest = t.clone();
        let x = rest.remove(i);
        groups.entry(rest).or_default().push(x);
    }
    let mut tol = Tolerance::identity(r.factors()[i].size);
    for xs in groups.values() {
        for &a in xs {
            for &b in xs {
                tol.add(a, b);
            }
        }
    }
    Ok(tol)
}

pub fn link_congruence(r: &Subpower, i: usize) -> Result<Partition> {
    Ok(link_tolerance(r, i)?.transitive_closure())
}

/// A binary relation is linked when both link congruences are full.
pub fn is_linked(r: &Subpower) -> Result<bool> {
    if r.arity() != 2 {
        return Err(Error::InvalidArgument("linkedness is defined for binary relations".into()));
    }
    Ok(link_congruence(r, 0)?.is_full() && link_congruence(r, 1)?.is_full())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::subpower_generate;
    use crate::corpus;

    fn oracle_partitions(n: usize) -> Vec<Partition> {
        // restricted growth strings
        let mut out = Vec::new();
        let mut labels = vec![0usize; n];
        fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if i == labels.len() {
                out.push(Partition::from_labels(labels));
                return;
            }
            for l in 0..=max + 1 {
                labels[i] = l;
                rec(i + 1, max.max(l), labels, out);
            }
        }
        if n > 0 {
            rec(1, 0, &mut labels, &mut out);
        }
        out
    }

    #[test]
    fn cg_examples() {
        let c3 = corpus::chain3();
        assert!(cg(&c3, &[]).is_equality());
        assert!(cg(&corpus::affine2(), &[(0, 1)]).is_full());
        assert_eq!(cg(&c3, &[(0, 1)]), Partition::from_blocks(3, &[vec![0, 1], vec![2]]).unwrap());
    }

    #[test]
    fn congruence_lattices_match_filtering_oracle() {
        for alg in corpus::all() {
            let mut expected: Vec<Partition> =
                oracle_partitions(alg.size).into_iter().filter(|p| p.is_congruence(&alg)).collect();
            let mut got = all_congruences(&alg, 1000).unwrap();
            expected.sort();
            got.sort();
            assert_eq!(got, expected, "{}", alg.name);
        }
    }

    #[test]
    fn chain3_congruences() {
        let got = all_congruences(&corpus::chain3(), 100).unwrap();
        // equality, {01|2}, {0|12}, full
        assert_eq!(got.len(), 4);
        let max = maximal_congruences(&corpus::chain3(), 100).unwrap();
        assert_eq!(max.len(), 2);
    }

    #[test]
    fn simplicity_examples() {
        assert_eq!(simplicity(&corpus::affine2()), Simplicity::Simple);
        assert_eq!(all_congruences(&corpus::affine2(), 10).unwrap().len(), 2);
        assert_eq!(simplicity(&corpus::chain3()), Simplicity::NotSimple);
        let one = FiniteAlgebra::new("one", 1, vec![OpTable::new("join", 2, vec![0])]).unwrap();
        assert_eq!(simplicity(&one), Simplicity::Degenerate);
        assert!(!is_simple(&one));
        assert_eq!(all_congruences(&one, 10).unwrap(), vec![Partition::equality(1)]);
    }

    #[test]
    fn quotient_examples() {
        let c3 = corpus::chain3();
        let theta = Partition::from_blocks(3, &[vec![0, 1], vec![2]]).unwrap();
        let (q, map) = quotient(&c3, &theta).unwrap();
        assert_eq!(q.size, 2);
        assert_eq!(map, vec![0, 0, 1]);
        assert_eq!(q.operations[0].table, vec![0, 1, 1, 1]);
        let (q, _) = quotient(&c3, &Partition::full(3)).unwrap();
        assert_eq!(q.size, 1);
        let (q, _) = quotient(&c3, &Partition::equality(3)).unwrap();
        assert_eq!(q.operations, c3.operations);
        let bad = Partition::from_blocks(3, &[vec![0, 2], vec![1]]).unwrap();
        assert!(matches!(quotient(&c3, &bad), Err(Error::NotACongruence { .. })));
    }

    #[test]
    fn link_examples() {
        let m2 = corpus::majority2();
        let r = subpower_generate(&[m2.clone(), m2.clone()], &[vec![0, 0], vec![1, 1]], false, 100).unwrap();
        assert!(link_tolerance(&r, 0).unwrap().is_equality());
        assert!(!is_linked(&r).unwrap());

        let all: Vec<Vec<usize>> = all_tuples(2, 2).collect();
        let r = subpower_generate(&[m2.clone(), m2], &all, false, 100).unwrap();
        assert!(is_linked(&r).unwrap());

        let s2 = corpus::semilattice2();
        let r = Subpower::from_tuples(&[s2.clone(), s2.clone()], vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert!(link_congruence(&r, 0).unwrap().is_full());
        assert!(link_congruence(&r, 1).unwrap().is_full());
        assert!(is_linked(&r).unwrap());

        let r = Subpower::from_tuples(&[s2.clone(), s2], vec![vec![1, 1]]).unwrap();
        assert_eq!(link_tolerance(&r, 0).unwrap_err(), Error::NotSubdirect(0));
    }
}
