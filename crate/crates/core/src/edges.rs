//! Thick edges, their types, smoothness and type-1 omission.

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::algebra::{all_tuples, FiniteAlgebra, OpTable};
use crate::caps::Caps;
use crate::closure::{close, sg_unchecked, term_from_derivations, Subpower};
use crate::congruence::{cg, maximal_congruences, quotient_unchecked, Partition};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeType {
    Semilattice,
    Majority,
    Affine,
    Unary,
    None,
}

impl EdgeType {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeType::Semilattice => "semilattice",
            EdgeType::Majority => "majority",
            EdgeType::Affine => "affine",
            EdgeType::Unary => "unary",
            EdgeType::None => "none",
        }
    }
}

/// One maximal congruence of `Sg{a,b}` and what it witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Congruence of the subalgebra, indexed by position in `EdgeRecord::subalgebra`.
    pub theta: Partition,
    pub class_a: Vec<usize>,
    pub class_b: Vec<usize>,
    /// The case chosen for this congruence by precedence.
    pub kind: EdgeType,
    pub set: bool,
    pub semilattice: bool,
    pub majority: bool,
    pub affine: bool,
    /// Witnessing term operations on the whole algebra: a binary semilattice
    /// witness, a ternary majority witness and a ternary Mal'tsev witness, as found.
    pub operations: Vec<OpTable>,
}

impl Witness {
    pub fn has(&self, t: EdgeType) -> bool {
        match t {
            EdgeType::Semilattice => self.semilattice,
            EdgeType::Majority => self.majority,
            EdgeType::Affine => self.affine,
            EdgeType::Unary => self.set,
            EdgeType::None => !(self.set || self.semilattice || self.majority || self.affine),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub a: usize,
    pub b: usize,
    /// Elements of `Sg{a,b}`, ascending.
    pub subalgebra: Vec<usize>,
    pub witnesses: Vec<Witness>,
    pub resolved: EdgeType,
    /// Set when different witnesses point to different types.
    pub mixed: bool,
}

impl EdgeRecord {
    /// Witnesses supporting the resolved type.
    pub fn resolved_witnesses(&self) -> impl Iterator<Item = &Witness> {
        let t = self.resolved;
        self.witnesses.iter().filter(move |w| w.has(t))
    }
}

/// Classifies the pair `a, b` of `alg`.
pub fn classify_pair(alg: &FiniteAlgebra, a: usize, b: usize, caps: &Caps) -> Result<EdgeRecord> {
    if a == b || a >= alg.size || b >= alg.size {
        return Err(Error::InvalidArgument(format!("classify_pair needs two distinct elements, got {} and {}", a, b)));
    }
    let sub = sg_unchecked(alg, &[a, b]).elements();
    let balg = alg.induced(&sub, format!("Sg{{{},{}}}", a, b));
    let pa = sub.binary_search(&a).expect("generator in subalgebra");
    let pb = sub.binary_search(&b).expect("generator in subalgebra");
    let mut witnesses = Vec::new();
    for theta in maximal_congruences(&balg, caps.lattice)? {
        debug_assert!(!theta.related(pa, pb), "maximal congruence of Sg{{a,b}} identifies a and b");
        witnesses.push(classify_theta(alg, &sub, &balg, theta, pa, pb, caps)?);
    }
    let resolved = [EdgeType::Semilattice, EdgeType::Majority, EdgeType::Affine, EdgeType::Unary]
        .into_iter()
        .find(|&t| witnesses.iter().any(|w| w.has(t)))
        .unwrap_or(EdgeType::None);
    let mut kinds: Vec<EdgeType> = witnesses.iter().map(|w| w.kind).collect();
    kinds.sort();
    kinds.dedup();
    let mixed = kinds.len() > 1 || witnesses.iter().any(|w| w.semilattice as u8 + w.majority as u8 + w.affine as u8 > 1);
    Ok(EdgeRecord { a, b, subalgebra: sub, witnesses, resolved, mixed })
}

fn classify_theta(
    alg: &FiniteAlgebra,
    sub: &[usize],
    balg: &FiniteAlgebra,
    theta: Partition,
    pa: usize,
    pb: usize,
    caps: &Caps,
) -> Result<Witness> {
    let class_a: Vec<usize> = theta.block(pa).into_iter().map(|i| sub[i]).collect();
    let class_b: Vec<usize> = theta.block(pb).into_iter().map(|i| sub[i]).collect();
    let (a, b) = (sub[pa], sub[pb]);
    let q = quotient_unchecked(balg, &theta);
    let set = q.operations.iter().all(|op| op.projection_index(q.size).is_some());
    let mut w = Witness {
        theta,
        class_a,
        class_b,
        kind: EdgeType::None,
        set,
        semilattice: false,
        majority: false,
        affine: false,
        operations: Vec::new(),
    };
    if set {
        w.kind = EdgeType::Unary;
        return Ok(w);
    }
    let mut in_a = vec![false; alg.size];
    let mut in_b = vec![false; alg.size];
    for &x in &w.class_a {
        in_a[x] = true;
    }
    for &x in &w.class_b {
        in_b[x] = true;
    }

    // semilattice: some binary term sends both (a,b) and (b,a) into one of the classes
    let pred = |t: &[usize]| (in_b[t[0]] && in_b[t[1]]) || (in_a[t[0]] && in_a[t[1]]);
    let gens = vec![vec![a, b], vec![b, a]];
    if let Some(term) = search_term(&[alg, alg], alg, &gens, caps.tuples, &pred)? {
        w.semilattice = true;
        w.operations.push(term_table(alg, &term, 2, "semilattice_witness"));
    }

    // majority: indicator over the six argument patterns
    let pred = |t: &[usize]| in_a[t[0]] && in_a[t[1]] && in_a[t[2]] && in_b[t[3]] && in_b[t[4]] && in_b[t[5]];
    let gens = vec![vec![a, a, b, b, b, a], vec![a, b, a, b, a, b], vec![b, a, a, a, b, b]];
    let coords = [alg; 6];
    if let Some(term) = search_term(&coords, alg, &gens, caps.tuples, &pred)? {
        w.majority = true;
        w.operations.push(term_table(alg, &term, 3, "majority_witness"));
    }

    // affine: the quotient is abelian and has a Mal'tsev term; the cheap test goes first
    if is_abelian(&q, caps)? {
        if let Some(term) = maltsev_term(&q, caps)? {
            w.affine = true;
            w.operations.push(term_table(alg, &term, 3, "maltsev_witness"));
        }
    }
    w.kind = if w.semilattice {
        EdgeType::Semilattice
    } else if w.majority {
        EdgeType::Majority
    } else if w.affine {
        EdgeType::Affine
    } else {
        EdgeType::None
    };
    Ok(w)
}

/// Closes `gens` looking for a tuple matching `pred`; the term producing it is
/// returned in the generators as variables.
fn search_term(
    coords: &[&FiniteAlgebra],
    signature: &FiniteAlgebra,
    gens: &[Vec<usize>],
    cap: usize,
    pred: &dyn Fn(&[usize]) -> bool,
) -> Result<Option<crate::term::Term>> {
    let closure = close(coords, signature, gens, true, cap, Some(pred));
    match closure.hit {
        Some(i) => {
            let derivations = closure.derivations.expect("tracked");
            Ok(Some(term_from_derivations(&derivations, i, gens.len(), signature)))
        }
        None if closure.complete => Ok(None),
        None => Err(Error::CloneTruncated { cap }),
    }
}

fn term_table(alg: &FiniteAlgebra, term: &crate::term::Term, arity: usize, name: &str) -> OpTable {
    debug_assert_eq!(term.arity(), arity);
    term.table(alg, name)
}

/// A term that is a Mal'tsev operation of `q`, if any.
pub fn maltsev_term(q: &FiniteAlgebra, caps: &Caps) -> Result<Option<crate::term::Term>> {
    let n = q.size;
    let mut cols: Vec<[usize; 4]> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x != y {
                // (x, x, y) -> y
                cols.push([x, x, y, y]);
                // (x, y, y) -> x
                cols.push([x, y, y, x]);
            }
        }
    }
    if cols.is_empty() {
        return Ok(Some(crate::term::Term::projection(3, 0, q)));
    }
    let gens: Vec<Vec<usize>> = (0..3).map(|v| cols.iter().map(|c| c[v]).collect()).collect();
    let target: Vec<usize> = cols.iter().map(|c| c[3]).collect();
    let coords = vec![q; cols.len()];
    let pred = |t: &[usize]| t == target.as_slice();
    search_term(&coords, q, &gens, caps.tuples, &pred)
}

/// Abelianness: the diagonal is a block of the congruence of `q²` generated by diagonal pairs.
pub fn is_abelian(q: &FiniteAlgebra, caps: &Caps) -> Result<bool> {
    let n = q.size;
    if n * n > caps.structure {
        return Err(Error::CapExceeded { what: "square of quotient".into(), cap: caps.structure });
    }
    let tuples: IndexSet<Vec<usize>> = all_tuples(n, 2).collect();
    let sq = Subpower::from_closed_set(vec![q.clone(), q.clone()], tuples).to_algebra("q^2");
    let diag: Vec<usize> = (0..n).map(|x| x * n + x).collect();
    let pairs: Vec<(usize, usize)> = diag.windows(2).map(|w| (w[0], w[1])).collect();
    let theta = cg(&sq, &pairs);
    Ok(theta.block(diag[0]).len() == n)
}

/// All pairs `a < b`, classified.
pub fn edge_graph(alg: &FiniteAlgebra, caps: &Caps) -> Result<Vec<EdgeRecord>> {
    let mut out = Vec::new();
    for a in 0..alg.size {
        for b in a + 1..alg.size {
            out.push(classify_pair(alg, a, b, caps)?);
        }
    }
    Ok(out)
}

/// True when no pair resolves to the unary type.
pub fn omits_type1(edges: &[EdgeRecord]) -> bool {
    edges.iter().all(|e| e.resolved != EdgeType::Unary)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothViolation {
    pub a: usize,
    pub b: usize,
    pub class_a: Vec<usize>,
    pub class_b: Vec<usize>,
    pub op: String,
    pub args: Vec<usize>,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothReport {
    pub smooth: bool,
    pub counterexamples: Vec<SmoothViolation>,
}

/// Checks that `a/θ ∪ b/θ` is a subuniverse for every semilattice or majority witness.
pub fn is_smooth(alg: &FiniteAlgebra, edges: &[EdgeRecord]) -> SmoothReport {
    let mut counterexamples = Vec::new();
    for e in edges {
        for w in e.witnesses.iter().filter(|w| w.semilattice || w.majority) {
            let mut union: Vec<usize> = w.class_a.iter().chain(&w.class_b).copied().collect();
            union.sort_unstable();
            if let Some(v) = first_escape(alg, &union) {
                counterexamples.push(SmoothViolation {
                    a: e.a,
                    b: e.b,
                    class_a: w.class_a.clone(),
                    class_b: w.class_b.clone(),
                    op: v.0,
                    args: v.1,
                    value: v.2,
                });
            }
        }
    }
    SmoothReport { smooth: counterexamples.is_empty(), counterexamples }
}

fn first_escape(alg: &FiniteAlgebra, set: &[usize]) -> Option<(String, Vec<usize>, usize)> {
    let mut member = vec![false; alg.size];
    for &x in set {
        member[x] = true;
    }
    for op in &alg.operations {
        for idx in all_tuples(set.len(), op.arity) {
            let args: Vec<usize> = idx.iter().map(|&i| set[i]).collect();
            let v = op.apply(alg.size, &args);
            if !member[v] {
                return Some((op.name.clone(), args, v));
            }
        }
    }
    None
}

/// Edges, smoothness and type-1 omission of one algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeAnalysis {
    pub edges: Vec<EdgeRecord>,
    pub omits_type1: bool,
    pub smooth: SmoothReport,
}

pub fn analyze_edges(alg: &FiniteAlgebra, caps: &Caps) -> Result<EdgeAnalysis> {
    let edges = edge_graph(alg, caps)?;
    let smooth = is_smooth(alg, &edges);
    Ok(EdgeAnalysis { omits_type1: omits_type1(&edges), smooth, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn classify(alg: &FiniteAlgebra) -> EdgeRecord {
        classify_pair(alg, 0, 1, &Caps::default()).unwrap()
    }

    #[test]
    fn two_element_types() {
        assert_eq!(classify(&corpus::semilattice2()).resolved, EdgeType::Semilattice);
        assert_eq!(classify(&corpus::majority2()).resolved, EdgeType::Majority);
        assert_eq!(classify(&corpus::affine2()).resolved, EdgeType::Affine);
        assert_eq!(classify(&corpus::projection2()).resolved, EdgeType::Unary);
    }

    #[test]
    fn semilattice_witness_is_join() {
        let e = classify(&corpus::semilattice2());
        assert_eq!(e.witnesses.len(), 1);
        assert!(e.witnesses[0].theta.is_equality());
        assert_eq!(e.witnesses[0].operations[0].table, vec![0, 1, 1, 1]);
    }

    #[test]
    fn lattice_has_semilattice_and_majority_witness() {
        let e = classify(&corpus::lattice2());
        assert_eq!(e.resolved, EdgeType::Semilattice);
        assert!(e.witnesses[0].semilattice && e.witnesses[0].majority);
        assert!(e.mixed);
    }

    #[test]
    fn z3_is_affine_and_abelian() {
        let caps = Caps::default();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(classify_pair(&corpus::affine3(), a, b, &caps).unwrap().resolved, EdgeType::Affine);
        }
        assert!(is_abelian(&corpus::affine3(), &caps).unwrap());
        assert!(!is_abelian(&corpus::semilattice2(), &caps).unwrap());
        assert!(!is_abelian(&corpus::majority2(), &caps).unwrap());
    }

    #[test]
    fn corpus_smoothness_and_type1() {
        let caps = Caps::default();
        for alg in [corpus::semilattice2(), corpus::majority2(), corpus::affine2(), corpus::chain3()] {
            let an = analyze_edges(&alg, &caps).unwrap();
            assert!(an.smooth.smooth, "{}", alg.name);
            assert!(an.omits_type1, "{}", alg.name);
        }
        let an = analyze_edges(&corpus::projection2(), &caps).unwrap();
        assert!(!an.omits_type1);
    }

    #[test]
    fn chain_edges() {
        let an = analyze_edges(&corpus::chain3(), &Caps::default()).unwrap();
        assert_eq!(an.edges.len(), 3);
        assert!(an.edges.iter().all(|e| e.resolved == EdgeType::Semilattice));
    }
}
