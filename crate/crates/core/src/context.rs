//! A finite class of algebras closed under subalgebras and quotients, with the
//! term-operation data the thin-edge definitions quantify over.

use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteAlgebra, OpTable};
use crate::caps::Caps;
use crate::clone::{term_ops_of, TermOpSet};
use crate::edges::{analyze_edges, EdgeAnalysis, EdgeType};
use crate::error::{Error, Result};
use crate::hs::{hs_members, ClassMember};
use crate::structure::Structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Quantify over every operation satisfying a condition; needs a complete ternary clone.
    #[default]
    Exact,
    /// Use only the canonical operations; refutations are sound, confirmations are not.
    Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Exact,
    WitnessMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Majority,
    Minority,
}

/// Ternary operations satisfying a condition, as concatenated base tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionSet {
    pub which: Condition,
    pub tables: Vec<Vec<usize>>,
    /// Whether every ternary term operation was examined.
    pub complete: bool,
}

#[derive(Debug, Clone)]
pub struct ClassContext {
    pub caps: Caps,
    pub mode: Mode,
    pub members: Vec<ClassMember>,
    /// Edge analysis per member; duplicates share the entry of their original.
    pub member_edges: Vec<EdgeAnalysis>,
    pub binary: TermOpSet,
    pub ternary: TermOpSet,
    /// Indices into `ternary`, in discovery order.
    pub majority_ops: Vec<usize>,
    pub minority_ops: Vec<usize>,
    /// The fixed operation of the minority condition: least table among `minority_ops`.
    pub h: Option<usize>,
    /// The canonical operation of the majority condition: first found.
    pub g: Option<usize>,
}

impl ClassContext {
    /// The class HS(A).
    pub fn for_algebra(alg: &FiniteAlgebra, caps: Caps, mode: Mode) -> Result<ClassContext> {
        ClassContext::new(std::slice::from_ref(alg), caps, mode)
    }

    /// The union of HS(B) over the distinct given bases.
    pub fn new(bases: &[FiniteAlgebra], caps: Caps, mode: Mode) -> Result<ClassContext> {
        let mut distinct: Vec<FiniteAlgebra> = Vec::new();
        for b in bases {
            if !distinct.contains(b) {
                distinct.push(b.clone());
            }
        }
        let members = hs_members(&distinct, caps.class, caps.lattice)?;
        let mut member_edges: Vec<EdgeAnalysis> = Vec::with_capacity(members.len());
        for m in &members {
            let an = match m.duplicate_of {
                Some(d) => member_edges[d].clone(),
                None => analyze_edges(&m.structure.alg, &caps)?,
            };
            member_edges.push(an);
        }
        let binary = term_ops_of(&distinct, 2, caps.clone)?;
        let ternary = term_ops_of(&distinct, 3, caps.clone)?;
        let mut ctx = ClassContext {
            caps,
            mode,
            members,
            member_edges,
            binary,
            ternary,
            majority_ops: Vec::new(),
            minority_ops: Vec::new(),
            h: None,
            g: None,
        };
        ctx.majority_ops = (0..ctx.ternary.len()).filter(|&i| ctx.satisfies(Condition::Majority, ctx.ternary.table(i))).collect();
        ctx.minority_ops = (0..ctx.ternary.len()).filter(|&i| ctx.satisfies(Condition::Minority, ctx.ternary.table(i))).collect();
        ctx.g = ctx.majority_ops.first().copied();
        ctx.h = ctx.minority_ops.iter().copied().min_by(|&x, &y| ctx.ternary.table(x).cmp(ctx.ternary.table(y)));
        Ok(ctx)
    }

    pub fn bases(&self) -> &[FiniteAlgebra] {
        &self.ternary.layout().bases
    }

    pub fn base_structure(&self, j: usize) -> Structure {
        Structure::base(&self.bases()[j], j)
    }

    /// Index of a base algebra equal to `alg`.
    pub fn base_index(&self, alg: &FiniteAlgebra) -> Option<usize> {
        self.bases().iter().position(|b| b == alg)
    }

    pub fn clone_complete(&self) -> bool {
        self.ternary.is_complete() && self.binary.is_complete()
    }

    pub fn certainty(&self) -> Certainty {
        if self.mode == Mode::Exact && self.ternary.is_complete() {
            Certainty::Exact
        } else {
            Certainty::WitnessMode
        }
    }

    /// Fails in exact mode when the ternary clone was truncated.
    pub fn require_exact(&self) -> Result<()> {
        if self.mode == Mode::Exact && !self.ternary.is_complete() {
            return Err(Error::CloneTruncated { cap: self.ternary.cap() });
        }
        Ok(())
    }

    /// Operations quantified over in the thin-edge definitions.
    pub fn quantified(&self, which: Condition) -> Result<Vec<&[usize]>> {
        self.require_exact()?;
        let (all, canonical) = match which {
            Condition::Majority => (&self.majority_ops, self.g),
            Condition::Minority => (&self.minority_ops, self.h),
        };
        match self.mode {
            Mode::Exact => Ok(all.iter().map(|&i| self.ternary.table(i)).collect()),
            Mode::Witness => match canonical {
                Some(i) => Ok(vec![self.ternary.table(i)]),
                None => Err(Error::NotFoundWithinCap(format!("no operation satisfying the {:?} condition", which))),
            },
        }
    }

    pub fn fixed_h(&self) -> Result<&[usize]> {
        self.h.map(|i| self.ternary.table(i)).ok_or_else(|| {
            if self.ternary.is_complete() {
                Error::SearchExhausted("no ternary term operation satisfies the minority condition".into())
            } else {
                Error::NotFoundWithinCap("no operation satisfying the minority condition within the clone cap".into())
            }
        })
    }

    pub fn condition_set(&self, which: Condition) -> ConditionSet {
        let idx = match which {
            Condition::Majority => &self.majority_ops,
            Condition::Minority => &self.minority_ops,
        };
        ConditionSet { which, tables: idx.iter().map(|&i| self.ternary.table(i).to_vec()).collect(), complete: self.ternary.is_complete() }
    }

    /// Table of a concatenated ternary operation on base `j`.
    pub fn base_table(&self, table: &[usize], j: usize, name: &str) -> OpTable {
        let layout = self.ternary.layout();
        let n = layout.bases[j].size;
        let start = layout.offsets[j];
        OpTable::new(name, 3, table[start..start + n * n * n].to_vec())
    }

    /// Whether a concatenated ternary table satisfies the majority or minority condition.
    pub fn satisfies(&self, which: Condition, table: &[usize]) -> bool {
        let layout = self.ternary.layout();
        // identities are inherited by subalgebras and quotients, so the bases suffice
        for (j, b) in layout.bases.iter().enumerate() {
            for x in 0..b.size {
                for y in 0..b.size {
                    let ok = match which {
                        Condition::Majority => {
                            let t = layout.eval_base(table, j, &[x, y, y]);
                            layout.eval_base(table, j, &[x, t, t]) == t
                        }
                        Condition::Minority => {
                            let t = layout.eval_base(table, j, &[x, y, y]);
                            layout.eval_base(table, j, &[t, y, y]) == t
                        }
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
        for (m, an) in self.members.iter().zip(&self.member_edges) {
            if m.duplicate_of.is_some() {
                continue;
            }
            let s = &m.structure;
            let ev = |args: [usize; 3]| s.eval(layout, table, &args);
            for e in &an.edges {
                match (which, e.resolved) {
                    (Condition::Majority, EdgeType::Majority) => {
                        for w in e.witnesses.iter().filter(|w| w.majority) {
                            let (a, b) = (e.a, e.b);
                            let in_a = |x: usize| w.class_a.contains(&x);
                            let in_b = |x: usize| w.class_b.contains(&x);
                            if !(in_a(ev([a, a, b]))
                                && in_a(ev([a, b, a]))
                                && in_a(ev([b, a, a]))
                                && in_b(ev([b, b, a]))
                                && in_b(ev([b, a, b]))
                                && in_b(ev([a, b, b])))
                            {
                                return false;
                            }
                        }
                    }
                    (Condition::Minority, EdgeType::Affine) => {
                        for w in e.witnesses.iter().filter(|w| w.affine) {
                            let sub = &e.subalgebra;
                            let class = |x: usize| w.theta.block_of(sub.binary_search(&x).expect("in subalgebra"));
                            for &x in sub {
                                for &y in sub {
                                    if class(ev([x, x, y])) != class(y) || class(ev([x, y, y])) != class(x) {
                                        return false;
                                    }
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn ctx(alg: &FiniteAlgebra) -> ClassContext {
        ClassContext::for_algebra(alg, Caps::default(), Mode::Exact).unwrap()
    }

    #[test]
    fn majority_condition_contains_majority() {
        let m2 = corpus::majority2();
        let c = ctx(&m2);
        let maj = &m2.operations[0].table;
        assert!(c.condition_set(Condition::Majority).tables.contains(maj));
    }

    #[test]
    fn minority_condition_contains_parity() {
        let z2 = corpus::affine2();
        let c = ctx(&z2);
        let minority = &z2.operations[0].table;
        let set = c.condition_set(Condition::Minority);
        assert!(set.complete);
        assert!(set.tables.contains(minority));
        assert_eq!(c.fixed_h().unwrap(), minority.as_slice());
    }

    #[test]
    fn semilattice_majority_condition_contains_triple_join() {
        let s2 = corpus::semilattice2();
        let c = ctx(&s2);
        // x ∨ y ∨ z
        let join3 = OpTable::from_fn("j", 3, 2, |a| a[0] | a[1] | a[2]).table;
        assert!(c.condition_set(Condition::Majority).tables.contains(&join3));
    }

    #[test]
    fn witness_mode_quantifies_over_canonical_only() {
        let c = ClassContext::for_algebra(&corpus::majority2(), Caps::default(), Mode::Witness).unwrap();
        assert_eq!(c.quantified(Condition::Majority).unwrap().len(), 1);
        assert_eq!(c.certainty(), Certainty::WitnessMode);
    }

    #[test]
    fn exact_mode_refuses_truncated_clone() {
        let caps = Caps { clone: 4, ..Caps::default() };
        let c = ClassContext::for_algebra(&corpus::tournament3(), caps, Mode::Exact).unwrap();
        assert!(matches!(c.quantified(Condition::Majority), Err(Error::CloneTruncated { .. })));
    }
}
