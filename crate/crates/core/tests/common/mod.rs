//! Naive fixpoint oracles, written without any of the library's closure code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use alggraph::{FiniteAlgebra, OpTable};
use rand::Rng;

/// Every tuple of length `k` over `0..n`, in lexicographic order.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..n).map(move |x| [t.clone(), vec![x]].concat())).collect();
    }
    out
}

fn lookup(op: &OpTable, n: usize, args: &[usize]) -> usize {
    op.table[args.iter().fold(0, |acc, &x| acc * n + x)]
}

/// An idempotent algebra with one random operation per arity in `arities`.
pub fn random_algebra(rng: &mut impl Rng, size: usize, arities: &[usize]) -> FiniteAlgebra {
    let ops = arities
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let table = tuples(size, k)
                .into_iter()
                .map(|t| if t.iter().all(|&x| x == t[0]) { t[0] } else { rng.random_range(0..size) })
                .collect();
            OpTable::new(format!("f{}", i), k, table)
        })
        .collect();
    FiniteAlgebra::new("oracle", size, ops).unwrap()
}

pub fn naive_sg(alg: &FiniteAlgebra, seed: &[usize]) -> BTreeSet<usize> {
    let mut set: BTreeSet<usize> = seed.iter().copied().collect();
    loop {
        let cur: Vec<usize> = set.iter().copied().collect();
        let before = set.len();
        for op in &alg.operations {
            for idx in tuples(cur.len(), op.arity) {
                let args: Vec<usize> = idx.iter().map(|&i| cur[i]).collect();
                set.insert(lookup(op, alg.size, &args));
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// The congruence generated by `pairs`, as a relation matrix.
pub fn naive_cg(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let n = alg.size;
    let mut rel = vec![vec![false; n]; n];
    for (x, row) in rel.iter_mut().enumerate() {
        row[x] = true;
    }
    for &(a, b) in pairs {
        rel[a][b] = true;
        rel[b][a] = true;
    }
    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if rel[i][k] && rel[k][j] && !rel[i][j] {
                        rel[i][j] = true;
                        changed = true;
                    }
                }
            }
        }
        for op in &alg.operations {
            for args in tuples(n, op.arity) {
                for p in 0..op.arity {
                    for y in 0..n {
                        if rel[args[p]][y] {
                            let mut other = args.clone();
                            other[p] = y;
                            let (u, v) = (lookup(op, n, &args), lookup(op, n, &other));
                            if !rel[u][v] {
                                rel[u][v] = true;
                                rel[v][u] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// The subuniverse of the product of `factors` generated by `gens`.
pub fn naive_subpower(factors: &[FiniteAlgebra], gens: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let mut set: BTreeSet<Vec<usize>> = gens.iter().cloned().collect();
    loop {
        let cur: Vec<Vec<usize>> = set.iter().cloned().collect();
        let before = set.len();
        for (oi, op) in factors[0].operations.iter().enumerate() {
            for idx in tuples(cur.len(), op.arity) {
                let t: Vec<usize> = (0..factors.len())
                    .map(|c| {
                        let args: Vec<usize> = idx.iter().map(|&i| cur[i][c]).collect();
                        lookup(&factors[c].operations[oi], factors[c].size, &args)
                    })
                    .collect();
                set.insert(t);
            }
        }
        if set.len() == before {
            return set;
        }
    }
}
