//! Generated subuniverses and subpowers.

use fixedbitset::FixedBitSet;
use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::algebra::{check_signatures, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::term::Term;

/// A subuniverse of an algebra, stored as a bitset over `0..size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subuniverse {
    pub size: usize,
    pub members: FixedBitSet,
}

impl Subuniverse {
    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn elements(&self) -> Vec<usize> {
        self.members.ones().collect()
    }
}

/// Least subuniverse of `alg` containing `seed`.
pub fn sg_closure(alg: &FiniteAlgebra, seed: &[usize]) -> Result<Subuniverse> {
    if seed.is_empty() {
        return Err(Error::InvalidArgument("generating set must be nonempty".into()));
    }
    if let Some(&x) = seed.iter().find(|&&x| x >= alg.size) {
        return Err(Error::InvalidArgument(format!("element {} outside universe 0..{}", x, alg.size)));
    }
    Ok(sg_unchecked(alg, seed))
}

pub(crate) fn sg_unchecked(alg: &FiniteAlgebra, seed: &[usize]) -> Subuniverse {
    let n = alg.size;
    let mut members = FixedBitSet::with_capacity(n);
    let mut list = Vec::with_capacity(n);
    for &x in seed {
        if !members.put(x) {
            list.push(x);
        }
    }
    let mut lo = 0;
    while lo < list.len() {
        let hi = list.len();
        for op in &alg.operations {
            let k = op.arity;
            let mut idx = vec![0usize; k];
            for first_new in 0..k {
                // positions before `first_new` range over old members, the position itself over
                // new members, later positions over everything known at the start of the round
                let ranges: Vec<(usize, usize)> = (0..k)
                    .map(|p| match p.cmp(&first_new) {
                        std::cmp::Ordering::Less => (0, lo),
                        std::cmp::Ordering::Equal => (lo, hi),
                        std::cmp::Ordering::Greater => (0, hi),
                    })
                    .collect();
                if ranges.iter().any(|&(a, b)| a >= b) {
                    continue;
                }
                for (slot, r) in idx.iter_mut().zip(&ranges) {
                    *slot = r.0;
                }
                loop {
                    let pos = idx.iter().fold(0, |acc, &i| acc * n + list[i]);
                    let v = op.table[pos];
                    if !members.put(v) {
                        list.push(v);
                    }
                    if !advance(&mut idx, &ranges) {
                        break;
                    }
                }
            }
        }
        lo = hi;
    }
    Subuniverse { size: n, members }
}

#[inline]
fn advance(idx: &mut [usize], ranges: &[(usize, usize)]) -> bool {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < ranges[p].1 {
            return true;
        }
        idx[p] = ranges[p].0;
    }
    false
}

/// How a tuple of a tracked closure was first obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Derivation {
    Generator(usize),
    Apply { op: usize, args: Vec<usize> },
}

/// Result of closing a tuple set under coordinatewise operations.
pub(crate) struct Closure {
    pub tuples: IndexSet<Vec<usize>>,
    pub derivations: Option<Vec<Derivation>>,
    pub complete: bool,
    pub hit: Option<usize>,
}

/// Closes `gens` under the operations acting coordinatewise, coordinate `c` being
/// interpreted in `coords[c]`. Growth beyond `cap` tuples stops the closure with
/// `complete = false`; a tuple satisfying `stop` ends it early with `hit` set.
pub(crate) fn close(
    coords: &[&FiniteAlgebra],
    signature: &FiniteAlgebra,
    gens: &[Vec<usize>],
    track: bool,
    cap: usize,
    stop: Option<&dyn Fn(&[usize]) -> bool>,
) -> Closure {
    let m = coords.len();
    let sizes: Vec<usize> = coords.iter().map(|a| a.size).collect();
    let mut tuples: IndexSet<Vec<usize>> = IndexSet::new();
    let mut derivations = track.then(Vec::new);
    let mut out = Closure { tuples: IndexSet::new(), derivations: None, complete: true, hit: None };

    for (gi, g) in gens.iter().enumerate() {
        if tuples.insert(g.clone()) {
            if let Some(d) = derivations.as_mut() {
                d.push(Derivation::Generator(gi));
            }
            if let Some(pred) = stop {
                if out.hit.is_none() && pred(g) {
                    out.hit = Some(tuples.len() - 1);
                }
            }
        }
    }
    if out.hit.is_some() {
        out.tuples = tuples;
        out.derivations = derivations;
        out.complete = false;
        return out;
    }
    if tuples.len() > cap {
        out.tuples = tuples;
        out.derivations = derivations;
        out.complete = false;
        return out;
    }

    let mut lo = 0;
    let mut buf = vec![0usize; m];
    'rounds: while lo < tuples.len() {
        let hi = tuples.len();
        for (oi, op) in signature.operations.iter().enumerate() {
            let k = op.arity;
            let mut idx = vec![0usize; k];
            for first_new in 0..k {
                let ranges: Vec<(usize, usize)> = (0..k)
                    .map(|p| match p.cmp(&first_new) {
                        std::cmp::Ordering::Less => (0, lo),
                        std::cmp::Ordering::Equal => (lo, hi),
                        std::cmp::Ordering::Greater => (0, hi),
                    })
                    .collect();
                if ranges.iter().any(|&(a, b)| a >= b) {
                    continue;
                }
                for (slot, r) in idx.iter_mut().zip(&ranges) {
                    *slot = r.0;
                }
                loop {
                    for c in 0..m {
                        let n = sizes[c];
                        let pos = idx.iter().fold(0, |acc, &t| acc * n + tuples[t][c]);
                        buf[c] = coords[c].operations[oi].table[pos];
                    }
                    if !tuples.contains(&buf) {
                        tuples.insert(buf.clone());
                        if let Some(d) = derivations.as_mut() {
                            d.push(Derivation::Apply { op: oi, args: idx.clone() });
                        }
                        if let Some(pred) = stop {
                            if pred(&buf) {
                                out.hit = Some(tuples.len() - 1);
                                out.complete = false;
                                break 'rounds;
                            }
                        }
                        if tuples.len() > cap {
                            out.complete = false;
                            break 'rounds;
                        }
                    }
                    if !advance(&mut idx, &ranges) {
                        break;
                    }
                }
            }
        }
        lo = hi;
    }
    out.tuples = tuples;
    out.derivations = derivations;
    out
}

/// Builds the term generating tuple `target` from derivation records, with
/// generator `i` read as variable `i`.
pub(crate) fn term_from_derivations(
    derivations: &[Derivation],
    target: usize,
    arity: usize,
    signature: &FiniteAlgebra,
) -> Term {
    let mut builder = Term::builder(arity, signature);
    let mut node_of: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut stack = vec![(target, false)];
    while let Some((t, expanded)) = stack.pop() {
        if node_of.contains_key(&t) {
            continue;
        }
        match &derivations[t] {
            Derivation::Generator(g) => {
                let id = builder.var(*g);
                node_of.insert(t, id);
            }
            Derivation::Apply { op, args } => {
                if expanded {
                    let children: Vec<usize> = args.iter().map(|a| node_of[a]).collect();
                    let id = builder.app(*op, children);
                    node_of.insert(t, id);
                } else {
                    stack.push((t, true));
                    for &a in args.iter().rev() {
                        if !node_of.contains_key(&a) {
                            stack.push((a, false));
                        }
                    }
                }
            }
        }
    }
    builder.finish(node_of[&target])
}

/// A subalgebra of a finite product of similar algebras, stored as an explicit tuple set.
#[derive(Debug, Clone)]
pub struct Subpower {
    factors: Vec<FiniteAlgebra>,
    tuples: IndexSet<Vec<usize>>,
    derivations: Option<Vec<Derivation>>,
    generator_count: usize,
}

impl PartialEq for Subpower {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
            && self.tuples.len() == other.tuples.len()
            && self.tuples.iter().all(|t| other.tuples.contains(t))
    }
}

/// Closure of `generators` in the product of `factors` under coordinatewise operations.
pub fn subpower_generate(
    factors: &[FiniteAlgebra],
    generators: &[Vec<usize>],
    track: bool,
    cap: usize,
) -> Result<Subpower> {
    validate_tuples(factors, generators)?;
    let coords: Vec<&FiniteAlgebra> = factors.iter().collect();
    check_signatures(&coords)?;
    let signature = factors
        .first()
        .ok_or_else(|| Error::InvalidArgument("a subpower needs at least one factor".into()))?;
    let closure = close(&coords, signature, generators, track, cap, None);
    if !closure.complete {
        return Err(Error::CapExceeded { what: "subpower".into(), cap });
    }
    Ok(Subpower {
        factors: factors.to_vec(),
        tuples: closure.tuples,
        derivations: closure.derivations,
        generator_count: generators.len(),
    })
}

fn validate_tuples(factors: &[FiniteAlgebra], tuples: &[Vec<usize>]) -> Result<()> {
    for t in tuples {
        if t.len() != factors.len() {
            return Err(Error::InvalidArgument(format!(
                "tuple {:?} has {} coordinates, expected {}",
                t,
                t.len(),
                factors.len()
            )));
        }
        for (c, (&x, f)) in t.iter().zip(factors).enumerate() {
            if x >= f.size {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {} of {:?} is outside factor `{}`",
                    c, t, f.name
                )));
            }
        }
    }
    Ok(())
}

impl Subpower {
    /// Wraps an explicit tuple set, checking that it is closed.
    pub fn from_tuples(factors: &[FiniteAlgebra], tuples: Vec<Vec<usize>>) -> Result<Subpower> {
        validate_tuples(factors, &tuples)?;
        let coords: Vec<&FiniteAlgebra> = factors.iter().collect();
        check_signatures(&coords)?;
        if tuples.is_empty() {
            return Err(Error::InvalidArgument("relation must be nonempty".into()));
        }
        let set: IndexSet<Vec<usize>> = tuples.into_iter().collect();
        let gens: Vec<Vec<usize>> = set.iter().cloned().collect();
        let closure = close(&coords, &factors[0], &gens, false, set.len(), None);
        if closure.tuples.len() != set.len() {
            let extra = closure.tuples.iter().find(|t| !set.contains(*t)).cloned().unwrap_or_default();
            return Err(Error::InvalidArgument(format!("tuple set is not closed: it generates {:?}", extra)));
        }
        Ok(Subpower { factors: factors.to_vec(), tuples: set, derivations: None, generator_count: 0 })
    }

    pub(crate) fn from_closed_set(factors: Vec<FiniteAlgebra>, tuples: IndexSet<Vec<usize>>) -> Subpower {
        Subpower { factors, tuples, derivations: None, generator_count: 0 }
    }

    pub fn factors(&self) -> &[FiniteAlgebra] {
        &self.factors
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuple(&self, i: usize) -> &[usize] {
        &self.tuples[i]
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tuples.iter()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.contains(t)
    }

    pub fn position(&self, t: &[usize]) -> Option<usize> {
        self.tuples.get_index_of(t)
    }

    pub fn derivation(&self, i: usize) -> Option<&Derivation> {
        self.derivations.as_ref().map(|d| &d[i])
    }

    pub fn is_tracked(&self) -> bool {
        self.derivations.is_some()
    }

    /// The term (in the generators) producing tuple `i`; requires tracking.
    pub fn term(&self, i: usize) -> Option<Term> {
        let d = self.derivations.as_ref()?;
        Some(term_from_derivations(d, i, self.generator_count, &self.factors[0]))
    }

    /// Projection onto coordinate `i`, as a sorted element list.
    pub fn coordinate_values(&self, i: usize) -> Vec<usize> {
        let mut seen = vec![false; self.factors[i].size];
        for t in &self.tuples {
            seen[t[i]] = true;
        }
        (0..seen.len()).filter(|&x| seen[x]).collect()
    }

    /// First coordinate whose projection is not the whole factor.
    pub fn non_subdirect_coordinate(&self) -> Option<usize> {
        (0..self.arity()).find(|&i| self.coordinate_values(i).len() != self.factors[i].size)
    }

    pub fn is_subdirect(&self) -> bool {
        self.non_subdirect_coordinate().is_none()
    }

    /// Projection onto the listed coordinates, in order.
    pub fn project(&self, coords: &[usize]) -> Subpower {
        let factors = coords.iter().map(|&c| self.factors[c].clone()).collect();
        let mut tuples = IndexSet::new();
        for t in &self.tuples {
            tuples.insert(coords.iter().map(|&c| t[c]).collect::<Vec<_>>());
        }
        Subpower::from_closed_set(factors, tuples)
    }

    /// Sorted copy of the tuples (for deterministic reporting).
    pub fn sorted_tuples(&self) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = self.tuples.iter().cloned().collect();
        v.sort();
        v
    }

    /// The subpower as an algebra on tuple indices.
    pub fn to_algebra(&self, name: impl Into<String>) -> FiniteAlgebra {
        let n = self.len();
        let sig = &self.factors[0];
        let ops = sig
            .operations
            .iter()
            .enumerate()
            .map(|(oi, op)| {
                let mut buf = vec![0; self.arity()];
                crate::algebra::OpTable::from_fn(op.name.clone(), op.arity, n, |args| {
                    for (c, f) in self.factors.iter().enumerate() {
                        let pos = args.iter().fold(0, |acc, &t| acc * f.size + self.tuples[t][c]);
                        buf[c] = f.operations[oi].table[pos];
                    }
                    self.tuples.get_index_of(&buf).expect("subpower is closed")
                })
            })
            .collect();
        FiniteAlgebra::new_unchecked(name, n, ops)
    }
}
