//! Finite idempotent algebras given by explicit operation tables.
//!
//! Tables are stored row-major with the leftmost argument most significant:
//! the value `f(x_0, ..., x_{k-1})` lives at index `sum x_i * n^(k-1-i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A basic operation of a finite algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpTable {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl OpTable {
    pub fn new(name: impl Into<String>, arity: usize, table: Vec<usize>) -> Self {
        OpTable { name: name.into(), arity, table }
    }

    /// Builds a table over a universe of size `n` from a closure.
    pub fn from_fn(name: impl Into<String>, arity: usize, n: usize, mut f: impl FnMut(&[usize]) -> usize) -> Self {
        let len = n.pow(arity as u32);
        let mut table = Vec::with_capacity(len);
        let mut args = vec![0; arity];
        for _ in 0..len {
            table.push(f(&args));
            increment(&mut args, n);
        }
        OpTable { name: name.into(), arity, table }
    }

    #[inline]
    pub fn apply(&self, n: usize, args: &[usize]) -> usize {
        self.table[index_of(n, args)]
    }

    /// Whether this operation, over a universe of size `n`, is the projection onto some argument.
    pub fn projection_index(&self, n: usize) -> Option<usize> {
        (0..self.arity).find(|&i| {
            let mut args = vec![0; self.arity];
            (0..self.table.len()).all(|idx| {
                if idx > 0 {
                    increment(&mut args, n);
                }
                self.table[idx] == args[i]
            })
        })
    }
}

/// Row-major index of an argument tuple.
#[inline]
pub fn index_of(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &x| acc * n + x)
}

/// Advances `args` to the next tuple in row-major order (wrapping to all zeros).
#[inline]
pub fn increment(args: &mut [usize], n: usize) {
    for slot in args.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return;
        }
        *slot = 0;
    }
}

/// Iterates over all tuples of `arity` elements of `0..n` in row-major order.
pub fn all_tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(arity as u32);
    let mut cur = vec![0; arity];
    (0..total).map(move |i| {
        if i > 0 {
            increment(&mut cur, n);
        }
        cur.clone()
    })
}

/// A finite idempotent algebra on the universe `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    pub operations: Vec<OpTable>,
}

impl FiniteAlgebra {
    /// Validates table shapes, value ranges, unique names and idempotence.
    pub fn new(name: impl Into<String>, size: usize, operations: Vec<OpTable>) -> Result<Self> {
        let alg = FiniteAlgebra { name: name.into(), size, operations };
        alg.validate()?;
        Ok(alg)
    }

    /// Skips validation; used for algebras built from already-validated parts.
    pub(crate) fn new_unchecked(name: impl Into<String>, size: usize, operations: Vec<OpTable>) -> Self {
        FiniteAlgebra { name: name.into(), size, operations }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::MalformedAlgebra("universe must be nonempty".into()));
        }
        for (i, op) in self.operations.iter().enumerate() {
            if self.operations[..i].iter().any(|o| o.name == op.name) {
                return Err(Error::MalformedAlgebra(format!("duplicate operation name `{}`", op.name)));
            }
            if op.arity == 0 {
                return Err(Error::MalformedTable { op: op.name.clone(), reason: "arity must be at least 1".into() });
            }
            let expected = self
                .size
                .checked_pow(op.arity as u32)
                .ok_or_else(|| Error::MalformedTable { op: op.name.clone(), reason: "table too large".into() })?;
            if op.table.len() != expected {
                return Err(Error::MalformedTable {
                    op: op.name.clone(),
                    reason: format!("expected {} entries, found {}", expected, op.table.len()),
                });
            }
            if let Some(pos) = op.table.iter().position(|&v| v >= self.size) {
                return Err(Error::MalformedTable {
                    op: op.name.clone(),
                    reason: format!("entry {} has value {} outside 0..{}", pos, op.table[pos], self.size),
                });
            }
            for x in 0..self.size {
                let value = op.apply(self.size, &vec![x; op.arity]);
                if value != x {
                    return Err(Error::NonIdempotent { op: op.name.clone(), point: x, value });
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let alg: FiniteAlgebra =
            serde_json::from_str(text).map_err(|e| Error::MalformedAlgebra(e.to_string()))?;
        alg.validate()?;
        Ok(alg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra serializes")
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        self.operations[op].apply(self.size, args)
    }

    pub fn signature(&self) -> Vec<(String, usize)> {
        self.operations.iter().map(|o| (o.name.clone(), o.arity)).collect()
    }

    pub fn same_signature(&self, other: &FiniteAlgebra) -> bool {
        self.operations.len() == other.operations.len()
            && self
                .operations
                .iter()
                .zip(&other.operations)
                .all(|(a, b)| a.name == b.name && a.arity == b.arity)
    }

    pub fn max_arity(&self) -> usize {
        self.operations.iter().map(|o| o.arity).max().unwrap_or(0)
    }

    /// The algebra induced on a subuniverse, listed in the given order.
    /// `members` must be closed under the operations.
    pub fn induced(&self, members: &[usize], name: impl Into<String>) -> FiniteAlgebra {
        let mut pos = vec![usize::MAX; self.size];
        for (i, &m) in members.iter().enumerate() {
            pos[m] = i;
        }
        let m = members.len();
        let ops = self
            .operations
            .iter()
            .map(|op| {
                OpTable::from_fn(op.name.clone(), op.arity, m, |args| {
                    let outer: Vec<usize> = args.iter().map(|&a| members[a]).collect();
                    let v = pos[op.apply(self.size, &outer)];
                    debug_assert!(v != usize::MAX, "induced on a non-closed set");
                    v
                })
            })
            .collect();
        FiniteAlgebra::new_unchecked(name, m, ops)
    }
}

pub(crate) fn check_signatures(algebras: &[&FiniteAlgebra]) -> Result<()> {
    if let Some((first, rest)) = algebras.split_first() {
        for other in rest {
            if !first.same_signature(other) {
                return Err(Error::SignatureMismatch(format!(
                    "`{}` has signature {:?} but `{}` has {:?}",
                    first.name,
                    first.signature(),
                    other.name,
                    other.signature()
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_semilattice_is_valid() {
        let alg = FiniteAlgebra::new("S2", 2, vec![OpTable::new("join", 2, vec![0, 1, 1, 1])]).unwrap();
        assert_eq!(alg.apply(0, &[0, 1]), 1);
        assert_eq!(alg.apply(0, &[0, 0]), 0);
    }

    #[test]
    fn constant_table_is_not_idempotent() {
        let err = FiniteAlgebra::new("c", 2, vec![OpTable::new("c", 2, vec![0, 0, 0, 0])]).unwrap_err();
        assert_eq!(err, Error::NonIdempotent { op: "c".into(), point: 1, value: 0 });
    }

    #[test]
    fn short_ternary_table_is_malformed() {
        let table: Vec<usize> = (0..26).map(|i| i % 3).collect();
        let err = FiniteAlgebra::new("t", 3, vec![OpTable::new("t", 3, table)]).unwrap_err();
        assert!(matches!(err, Error::MalformedTable { .. }));
    }

    #[test]
    fn out_of_range_and_duplicates_rejected() {
        let err = FiniteAlgebra::new("x", 2, vec![OpTable::new("f", 2, vec![0, 2, 1, 1])]).unwrap_err();
        assert!(matches!(err, Error::MalformedTable { .. }));
        let op = OpTable::new("f", 2, vec![0, 1, 1, 1]);
        let err = FiniteAlgebra::new("x", 2, vec![op.clone(), op]).unwrap_err();
        assert!(matches!(err, Error::MalformedAlgebra(_)));
    }

    #[test]
    fn row_major_leftmost_most_significant() {
        let op = OpTable::from_fn("p", 2, 3, |a| a[0]);
        assert_eq!(op.table, vec![0, 0, 0, 1, 1, 1, 2, 2, 2]);
        assert_eq!(op.projection_index(3), Some(0));
        assert_eq!(index_of(3, &[2, 1]), 7);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"name":"S2","size":2,"operations":[{"name":"join","arity":2,"table":[0,1,1,1]}]}"#;
        let alg = FiniteAlgebra::from_json(text).unwrap();
        assert_eq!(FiniteAlgebra::from_json(&alg.to_json()).unwrap(), alg);
    }
}
