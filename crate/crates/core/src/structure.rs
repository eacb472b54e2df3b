//! Algebras derived from base algebras, remembering how they were built so that
//! term operations of the bases can be evaluated on them.

use std::collections::HashMap;

use crate::algebra::FiniteAlgebra;
use crate::clone::CloneLayout;
use crate::closure::Subpower;
use crate::congruence::{quotient_unchecked, Partition};
use crate::error::{Error, Result};

/// How the elements of a structure arise from the base algebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realization {
    /// Base algebra number `j` of the clone layout.
    Base(usize),
    /// Element `i` is `elems[i]` of the parent.
    Sub { parent: Box<Realization>, elems: Vec<usize>, pos: Vec<usize> },
    /// Element `c` is the class of `reps[c]`; `class_of` maps parent elements to classes.
    Quotient { parent: Box<Realization>, class_of: Vec<usize>, reps: Vec<usize> },
    /// Element `i` is the tuple `tuples[i]` over the factors.
    Product { factors: Vec<Realization>, tuples: Vec<Vec<usize>>, index: HashMap<Vec<usize>, usize> },
}

impl Realization {
    /// Evaluates a concatenated clone table at `args`.
    pub fn eval(&self, layout: &CloneLayout, table: &[usize], args: &[usize]) -> usize {
        match self {
            Realization::Base(j) => layout.eval_base(table, *j, args),
            Realization::Sub { parent, elems, pos } => {
                let outer: Vec<usize> = args.iter().map(|&a| elems[a]).collect();
                let v = parent.eval(layout, table, &outer);
                debug_assert!(pos[v] != usize::MAX, "term operation leaves a subuniverse");
                pos[v]
            }
            Realization::Quotient { parent, class_of, reps } => {
                let outer: Vec<usize> = args.iter().map(|&a| reps[a]).collect();
                class_of[parent.eval(layout, table, &outer)]
            }
            Realization::Product { factors, tuples, index } => {
                let mut out = Vec::with_capacity(factors.len());
                let mut coord = Vec::with_capacity(args.len());
                for (c, f) in factors.iter().enumerate() {
                    coord.clear();
                    coord.extend(args.iter().map(|&a| tuples[a][c]));
                    out.push(f.eval(layout, table, &coord));
                }
                index[&out]
            }
        }
    }
}

/// A concrete algebra together with its realization over the bases of a class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub alg: FiniteAlgebra,
    pub real: Realization,
    /// Human-readable element names (tuples and classes are spelled out).
    pub labels: Vec<String>,
}

impl Structure {
    pub fn base(alg: &FiniteAlgebra, j: usize) -> Structure {
        Structure { alg: alg.clone(), real: Realization::Base(j), labels: (0..alg.size).map(|x| x.to_string()).collect() }
    }

    pub fn size(&self) -> usize {
        self.alg.size
    }

    pub fn name(&self) -> &str {
        &self.alg.name
    }

    /// The substructure on a subuniverse, elements listed in the given order.
    pub fn sub(&self, elems: &[usize], name: impl Into<String>) -> Structure {
        let mut pos = vec![usize::MAX; self.size()];
        for (i, &e) in elems.iter().enumerate() {
            pos[e] = i;
        }
        Structure {
            alg: self.alg.induced(elems, name),
            real: Realization::Sub { parent: Box::new(self.real.clone()), elems: elems.to_vec(), pos },
            labels: elems.iter().map(|&e| self.labels[e].clone()).collect(),
        }
    }

    /// The quotient by a congruence (not re-checked).
    pub fn quotient(&self, theta: &Partition, name: impl Into<String>) -> Structure {
        let mut alg = quotient_unchecked(&self.alg, theta);
        alg.name = name.into();
        let blocks = theta.blocks();
        Structure {
            alg,
            real: Realization::Quotient {
                parent: Box::new(self.real.clone()),
                class_of: theta.block_ids().to_vec(),
                reps: blocks.iter().map(|b| b[0]).collect(),
            },
            labels: blocks
                .iter()
                .map(|b| format!("[{}]", b.iter().map(|&e| self.labels[e].as_str()).collect::<Vec<_>>().join(",")))
                .collect(),
        }
    }

    /// A subpower of these factors as a structure on its tuple indices.
    pub fn product(factors: &[&Structure], rel: &Subpower, name: impl Into<String>, size_cap: usize) -> Result<Structure> {
        if rel.len() > size_cap {
            return Err(Error::CapExceeded { what: "relation as algebra".into(), cap: size_cap });
        }
        let tuples: Vec<Vec<usize>> = rel.tuples().cloned().collect();
        let index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let labels = tuples
            .iter()
            .map(|t| {
                let parts: Vec<&str> = t.iter().zip(factors).map(|(&x, f)| f.labels[x].as_str()).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        Ok(Structure {
            alg: rel.to_algebra(name),
            real: Realization::Product { factors: factors.iter().map(|f| f.real.clone()).collect(), tuples, index },
            labels,
        })
    }

    /// Evaluates a concatenated clone table on this structure.
    pub fn eval(&self, layout: &CloneLayout, table: &[usize], args: &[usize]) -> usize {
        self.real.eval(layout, table, args)
    }
}
