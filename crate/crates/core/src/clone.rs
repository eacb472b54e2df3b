//! Bounded enumeration of term operations.
//!
//! The `k`-ary term operations of a list of similar algebras are computed as the
//! subpower of `prod_j A_j^(A_j^k)` generated by the `k` projections. A term
//! operation is therefore stored as the concatenation of its tables on every
//! base algebra, which is what makes it possible to evaluate it on any algebra
//! built from the bases by subalgebras, quotients and products.

use indexmap::IndexSet;

use crate::algebra::{all_tuples, check_signatures, index_of, FiniteAlgebra, OpTable};
use crate::closure::{close, term_from_derivations, Derivation};
use crate::error::{Error, Result};
use crate::term::Term;

/// Where each base algebra's table lives inside a concatenated clone table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloneLayout {
    pub arity: usize,
    pub bases: Vec<FiniteAlgebra>,
    pub offsets: Vec<usize>,
    pub len: usize,
}

impl CloneLayout {
    pub fn new(bases: &[FiniteAlgebra], arity: usize) -> Result<CloneLayout> {
        if bases.is_empty() {
            return Err(Error::InvalidArgument("a clone needs at least one base algebra".into()));
        }
        let refs: Vec<&FiniteAlgebra> = bases.iter().collect();
        check_signatures(&refs)?;
        let mut offsets = Vec::with_capacity(bases.len());
        let mut len = 0;
        for b in bases {
            offsets.push(len);
            len += b.size.pow(arity as u32);
        }
        Ok(CloneLayout { arity, bases: bases.to_vec(), offsets, len })
    }

    /// Value of the concatenated table `table` on base `j` at `args`.
    #[inline]
    pub fn eval_base(&self, table: &[usize], j: usize, args: &[usize]) -> usize {
        table[self.offsets[j] + index_of(self.bases[j].size, args)]
    }

    /// Concatenated table of the `i`-th projection.
    pub fn projection(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len);
        for b in &self.bases {
            out.extend(all_tuples(b.size, self.arity).map(|t| t[i]));
        }
        out
    }

    /// Concatenated table of a term.
    pub fn table_of_term(&self, term: &Term) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len);
        for b in &self.bases {
            out.extend(all_tuples(b.size, self.arity).map(|t| term.eval(b, &t)));
        }
        out
    }

    /// Concatenated table of a basic operation of the signature (when its arity matches).
    pub fn basic(&self, op: usize) -> Option<Vec<usize>> {
        let k = self.bases[0].operations[op].arity;
        if k != self.arity {
            return None;
        }
        let mut out = Vec::with_capacity(self.len);
        for b in &self.bases {
            out.extend_from_slice(&b.operations[op].table);
        }
        Some(out)
    }
}

/// A set of `k`-ary term operations, closed under composition with basic operations
/// when `complete` holds.
#[derive(Debug, Clone)]
pub struct TermOpSet {
    layout: CloneLayout,
    tables: IndexSet<Vec<usize>>,
    derivations: Vec<Derivation>,
    complete: bool,
    cap: usize,
}

/// The `k`-ary term operations of `alg`, up to `cap` functions.
pub fn term_ops(alg: &FiniteAlgebra, arity: usize, cap: usize) -> Result<TermOpSet> {
    term_ops_of(std::slice::from_ref(alg), arity, cap)
}

/// The `k`-ary term operations of a class of similar algebras.
pub fn term_ops_of(bases: &[FiniteAlgebra], arity: usize, cap: usize) -> Result<TermOpSet> {
    if arity == 0 {
        return Err(Error::InvalidArgument("term operations need arity at least 1".into()));
    }
    let layout = CloneLayout::new(bases, arity)?;
    let mut coords: Vec<&FiniteAlgebra> = Vec::with_capacity(layout.len);
    for b in &layout.bases {
        coords.extend(std::iter::repeat_n(b, b.size.pow(arity as u32)));
    }
    let gens: Vec<Vec<usize>> = (0..arity).map(|i| layout.projection(i)).collect();
    let closure = close(&coords, &layout.bases[0], &gens, true, cap, None);
    let mut tables = closure.tuples;
    let mut derivations = closure.derivations.expect("tracked");
    if tables.len() > cap {
        tables.truncate(cap);
        derivations.truncate(cap);
    }
    Ok(TermOpSet { layout, tables, derivations, complete: closure.complete, cap })
}

impl TermOpSet {
    pub fn layout(&self) -> &CloneLayout {
        &self.layout
    }

    pub fn arity(&self) -> usize {
        self.layout.arity
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Concatenated table of the `i`-th operation (discovery order).
    pub fn table(&self, i: usize) -> &[usize] {
        &self.tables[i]
    }

    pub fn tables(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tables.iter()
    }

    pub fn position(&self, table: &[usize]) -> Option<usize> {
        self.tables.get_index_of(table)
    }

    pub fn contains(&self, table: &[usize]) -> bool {
        self.tables.contains(table)
    }

    /// Table of operation `i` on base algebra `j`.
    pub fn op_table(&self, i: usize, j: usize, name: impl Into<String>) -> OpTable {
        let n = self.layout.bases[j].size;
        let start = self.layout.offsets[j];
        let len = n.pow(self.arity() as u32);
        OpTable::new(name, self.arity(), self.tables[i][start..start + len].to_vec())
    }

    pub fn eval(&self, i: usize, j: usize, args: &[usize]) -> usize {
        self.layout.eval_base(&self.tables[i], j, args)
    }

    /// A term inducing operation `i`, in the projections as variables.
    pub fn term(&self, i: usize) -> Term {
        term_from_derivations(&self.derivations, i, self.arity(), &self.layout.bases[0])
    }
}
