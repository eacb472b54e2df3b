//! Thin semilattice, majority and affine edges of a structure relative to a class.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteAlgebra, OpTable};
use crate::caps::Caps;
use crate::closure::{close, sg_unchecked, term_from_derivations};
use crate::context::{Certainty, ClassContext, Condition};
use crate::edges::{classify_pair, EdgeRecord, EdgeType};
use crate::error::{Error, Result};
use crate::structure::Structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThinKind {
    Semilattice,
    Majority,
    Affine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinEdge {
    pub tail: usize,
    pub head: usize,
    pub kind: ThinKind,
    /// Majority edges only: also a minimal thick majority edge.
    pub special: bool,
    pub certainty: Certainty,
    /// Semilattice edges: a binary term operation `f` with `f(a,b) = f(b,a) = b`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<OpTable>,
    /// Special majority edges: the witnessing congruence's classes of `a` and `b`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<(Vec<usize>, Vec<usize>)>,
}

/// Which kinds to compute; majority edges are the expensive ones and are not
/// needed for as-connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Kinds {
    pub semilattice: bool,
    pub majority: bool,
    pub affine: bool,
}

impl Kinds {
    pub const ALL: Kinds = Kinds { semilattice: true, majority: true, affine: true };
    pub const AS: Kinds = Kinds { semilattice: true, majority: false, affine: true };
    pub const S: Kinds = Kinds { semilattice: true, majority: false, affine: false };
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinEdges {
    pub size: usize,
    pub edges: Vec<ThinEdge>,
    pub certainty: Certainty,
    /// False when majority edges were not computed.
    pub has_majority: bool,
    pub has_affine: bool,
}

impl ThinEdges {
    pub fn contains(&self, tail: usize, head: usize, kind: ThinKind) -> bool {
        self.edges.iter().any(|e| e.tail == tail && e.head == head && e.kind == kind)
    }

    pub fn find(&self, tail: usize, head: usize, kind: ThinKind) -> Option<&ThinEdge> {
        self.edges.iter().find(|e| e.tail == tail && e.head == head && e.kind == kind)
    }

    pub fn of_kind(&self, kind: ThinKind) -> impl Iterator<Item = &ThinEdge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }
}

/// Memoized two-generated subuniverses of one algebra.
pub(crate) struct SgCache<'a> {
    alg: &'a FiniteAlgebra,
    memo: HashMap<(usize, usize), FixedBitSet>,
}

impl<'a> SgCache<'a> {
    pub fn new(alg: &'a FiniteAlgebra) -> Self {
        SgCache { alg, memo: HashMap::new() }
    }

    pub fn contains(&mut self, x: usize, y: usize, z: usize) -> bool {
        let key = if x <= y { (x, y) } else { (y, x) };
        let alg = self.alg;
        self.memo.entry(key).or_insert_with(|| sg_unchecked(alg, &[key.0, key.1]).members).contains(z)
    }
}

/// `(a, b)` with `f(a,b) = f(b,a) = b` for some binary term: both directions of each pair,
/// with witnesses evaluated on the structure.
pub fn thin_semilattice_edges(alg: &FiniteAlgebra, caps: &Caps) -> Result<Vec<ThinEdge>> {
    let mut out = Vec::new();
    for a in 0..alg.size {
        for b in a + 1..alg.size {
            let gens = vec![vec![a, b], vec![b, a]];
            let closure = close(&[alg, alg], alg, &gens, true, caps.tuples, None);
            if !closure.complete {
                return Err(Error::CapExceeded { what: "semilattice indicator".into(), cap: caps.tuples });
            }
            let derivations = closure.derivations.as_ref().expect("tracked");
            for (tail, head) in [(a, b), (b, a)] {
                if let Some(i) = closure.tuples.get_index_of(&vec![head, head]) {
                    let term = term_from_derivations(derivations, i, 2, alg);
                    // the condition is symmetric in the two generators
                    let table = term.table(alg, "f");
                    out.push(ThinEdge {
                        tail,
                        head,
                        kind: ThinKind::Semilattice,
                        special: false,
                        certainty: Certainty::Exact,
                        witness: Some(table),
                        classes: None,
                    });
                }
            }
        }
    }
    out.sort_by_key(|e| (e.tail, e.head));
    Ok(out)
}

/// Whether `(a, b)` is a majority edge with a witnessing congruence for which it is minimal.
pub(crate) fn special_witness(record: &EdgeRecord, a: usize, b: usize, sg: &mut SgCache) -> Option<(Vec<usize>, Vec<usize>)> {
    if record.resolved != EdgeType::Majority {
        return None;
    }
    for w in record.witnesses.iter().filter(|w| w.majority) {
        let (ca, cb) = if record.a == a { (&w.class_a, &w.class_b) } else { (&w.class_b, &w.class_a) };
        if cb.iter().all(|&b2| sg.contains(a, b2, b)) {
            return Some((ca.clone(), cb.clone()));
        }
    }
    None
}

/// Thin edges of a structure built from the bases of `ctx`.
pub fn thin_edges(ctx: &ClassContext, s: &Structure, kinds: Kinds) -> Result<ThinEdges> {
    let alg = &s.alg;
    let n = alg.size;
    let certainty = ctx.certainty();
    let mut edges = Vec::new();
    if kinds.semilattice {
        edges.extend(thin_semilattice_edges(alg, &ctx.caps)?);
    }
    if n < 2 || !(kinds.majority || kinds.affine) {
        return Ok(finish(n, edges, certainty, kinds));
    }
    let layout = ctx.ternary.layout();
    let mut sg = SgCache::new(alg);
    if kinds.majority {
        let ops = ctx.quantified(Condition::Majority)?;
        let mut records: HashMap<(usize, usize), EdgeRecord> = HashMap::new();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let mut seen = vec![false; n];
                let mut thin = true;
                'ops: for t in &ops {
                    for args in [[a, b, b], [b, a, b], [b, b, a]] {
                        let c = s.eval(layout, t, &args);
                        if !seen[c] {
                            seen[c] = true;
                            if !sg.contains(a, c, b) {
                                thin = false;
                                break 'ops;
                            }
                        }
                    }
                }
                if !thin {
                    continue;
                }
                let key = (a.min(b), a.max(b));
                if let std::collections::hash_map::Entry::Vacant(v) = records.entry(key) {
                    v.insert(classify_pair(alg, key.0, key.1, &ctx.caps)?);
                }
                let classes = special_witness(&records[&key], a, b, &mut sg);
                edges.push(ThinEdge {
                    tail: a,
                    head: b,
                    kind: ThinKind::Majority,
                    special: classes.is_some(),
                    certainty,
                    witness: None,
                    classes,
                });
            }
        }
    }
    if kinds.affine {
        let ops = ctx.quantified(Condition::Minority)?;
        let h = ctx.fixed_h()?;
        for a in 0..n {
            for b in 0..n {
                if a == b || s.eval(layout, h, &[b, a, a]) != b {
                    continue;
                }
                let mut seen = vec![false; n];
                let thin = ops.iter().all(|t| {
                    let c = s.eval(layout, t, &[a, a, b]);
                    if seen[c] {
                        return true;
                    }
                    seen[c] = true;
                    sg.contains(a, c, b)
                });
                if thin {
                    edges.push(ThinEdge {
                        tail: a,
                        head: b,
                        kind: ThinKind::Affine,
                        special: false,
                        certainty,
                        witness: None,
                        classes: None,
                    });
                }
            }
        }
    }
    Ok(finish(n, edges, certainty, kinds))
}

fn finish(size: usize, mut edges: Vec<ThinEdge>, certainty: Certainty, kinds: Kinds) -> ThinEdges {
    edges.sort_by_key(|e| (e.kind, e.tail, e.head));
    let any_quantified = edges.iter().any(|e| e.kind != ThinKind::Semilattice);
    ThinEdges {
        size,
        edges,
        certainty: if any_quantified || kinds.majority || kinds.affine { certainty } else { Certainty::Exact },
        has_majority: kinds.majority,
        has_affine: kinds.affine,
    }
}

/// The special flag of a thin majority edge.
pub fn special_flag(ctx: &ClassContext, s: &Structure, a: usize, b: usize) -> Result<bool> {
    let thin = thin_edges(ctx, s, Kinds { semilattice: false, majority: true, affine: false })?;
    match thin.find(a, b, ThinKind::Majority) {
        Some(e) => Ok(e.special),
        None => Err(Error::InvalidArgument(format!("({}, {}) is not a thin majority edge", a, b))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::context::Mode;
    use crate::corpus;

    fn thin(alg: &FiniteAlgebra) -> ThinEdges {
        let ctx = ClassContext::for_algebra(alg, Caps::default(), Mode::Exact).unwrap();
        thin_edges(&ctx, &ctx.base_structure(0), Kinds::ALL).unwrap()
    }

    fn pairs(t: &ThinEdges, kind: ThinKind) -> Vec<(usize, usize)> {
        t.of_kind(kind).map(|e| (e.tail, e.head)).collect()
    }

    #[test]
    fn semilattice_edges_of_s2() {
        let t = thin(&corpus::semilattice2());
        assert_eq!(pairs(&t, ThinKind::Semilattice), vec![(0, 1)]);
        let w = t.edges[0].witness.as_ref().unwrap();
        assert_eq!(w.table, vec![0, 1, 1, 1]);
        assert!(pairs(&t, ThinKind::Affine).is_empty());
    }

    #[test]
    fn majority_edges_of_m2() {
        let t = thin(&corpus::majority2());
        assert!(pairs(&t, ThinKind::Semilattice).is_empty());
        assert_eq!(pairs(&t, ThinKind::Majority), vec![(0, 1), (1, 0)]);
        assert!(t.of_kind(ThinKind::Majority).all(|e| e.special));
    }

    #[test]
    fn affine_edges_of_z2() {
        let t = thin(&corpus::affine2());
        assert!(pairs(&t, ThinKind::Semilattice).is_empty());
        assert_eq!(pairs(&t, ThinKind::Affine), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn chain_semilattice_edges() {
        let t = thin(&corpus::chain3());
        assert_eq!(pairs(&t, ThinKind::Semilattice), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn witnesses_check_out() {
        for alg in corpus::all() {
            for e in thin_semilattice_edges(&alg, &Caps::default()).unwrap() {
                let f = e.witness.unwrap();
                assert_eq!(f.apply(alg.size, &[e.tail, e.head]), e.head, "{}", alg.name);
                assert_eq!(f.apply(alg.size, &[e.head, e.tail]), e.head, "{}", alg.name);
            }
        }
    }
}
