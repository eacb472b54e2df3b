//! Exhaustive checks of the connectivity and lifting statements on concrete instances.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::closure::Subpower;
use crate::congruence::Partition;
use crate::context::ClassContext;
use crate::edges::analyze_edges;
use crate::error::{Error, Result};
use crate::graph::{GraphAnalysis, PathKind};
use crate::report::{class_hypotheses, Report};
use crate::structure::Structure;
use crate::thin::{thin_edges, Kinds};

/// Thin edges and components of a structure.
pub fn graph_of(ctx: &ClassContext, s: &Structure, kinds: Kinds) -> Result<GraphAnalysis> {
    Ok(GraphAnalysis::new(thin_edges(ctx, s, kinds)?))
}

/// Edges, thin edges and components of a structure. Graph construction errors
/// (for instance a truncated clone) are reported inside the value.
pub fn analyze(ctx: &ClassContext, s: &Structure) -> Result<Value> {
    let an = analyze_edges(&s.alg, &ctx.caps)?;
    let graph = match graph_of(ctx, s, Kinds::ALL) {
        Ok(g) => serde_json::to_value(&g).expect("graph serializes"),
        Err(e) => json!({"error": e.to_string()}),
    };
    Ok(json!({
        "algebra": s.name(),
        "size": s.size(),
        "labels": s.labels,
        "omits_type1": an.omits_type1,
        "smooth": an.smooth,
        "edges": an.edges,
        "hypotheses": class_hypotheses(ctx),
        "graph": graph,
    }))
}

const GRADED: [PathKind; 3] = [PathKind::S, PathKind::As, PathKind::Asm];

fn kind_name(k: PathKind) -> &'static str {
    match k {
        PathKind::S => "s",
        PathKind::As => "as",
        PathKind::Asm => "asm",
        PathKind::Special => "special",
    }
}

fn is_maximal(g: &GraphAnalysis, kind: PathKind, x: usize) -> bool {
    g.components(kind).is_some_and(|c| c.is_maximal(x))
}

/// Connectivity of a smooth algebra omitting type 1: weak connectivity by thin
/// edges, special paths between maximal and between as-maximal elements, and a
/// unique u-maximal component.
pub fn verify_connectivity(ctx: &ClassContext, s: &Structure) -> Result<Report> {
    const CHECK: &str = "connectivity";
    let mut reasons = class_hypotheses(ctx);
    let own = analyze_edges(&s.alg, &ctx.caps)?;
    if !own.smooth.smooth {
        reasons.push(format!("{} is not smooth", s.name()));
    }
    if !own.omits_type1 {
        reasons.push(format!("{} has an edge of unary type", s.name()));
    }
    if !reasons.is_empty() {
        return Ok(Report::inapplicable(CHECK, reasons));
    }
    let g = graph_of(ctx, s, Kinds::ALL)?;
    let mut r = Report::new(CHECK);
    r.expect(g.weakly_connected(), || json!({"claim": "weakly connected", "edges": g.thin.edges.len()}));
    for (set, elems) in [("max", &g.max_elements), ("amax", &g.amax_elements)] {
        for &a in elems.iter() {
            for &b in elems.iter() {
                if a != b {
                    r.expect(g.path(a, b, PathKind::Special).is_some(), || {
                        json!({"claim": "special path", "set": set, "from": s.labels[a], "to": s.labels[b]})
                    });
                }
            }
        }
    }
    let asm = g.asm.as_ref().expect("majority edges computed");
    r.expect(asm.maximal.len() == 1, || json!({"claim": "unique u-maximal component", "components": asm.maximal.len()}));
    let label = |xs: &[usize]| xs.iter().map(|&x| s.labels[x].clone()).collect::<Vec<_>>();
    r.details = json!({
        "max": label(&g.max_elements),
        "amax": label(&g.amax_elements),
        "umax": label(g.umax_elements.as_deref().unwrap_or(&[])),
    });
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftingCase {
    QuotientEdge,
    QuotientPath,
    QuotientMaximal,
    ProductEdge,
    ProductPath,
    ProductMaximal,
    AsProduct,
}

impl LiftingCase {
    pub const ALL: [LiftingCase; 7] = [
        LiftingCase::QuotientEdge,
        LiftingCase::QuotientPath,
        LiftingCase::QuotientMaximal,
        LiftingCase::ProductEdge,
        LiftingCase::ProductPath,
        LiftingCase::ProductMaximal,
        LiftingCase::AsProduct,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LiftingCase::QuotientEdge => "quotient-edge",
            LiftingCase::QuotientPath => "quotient-path",
            LiftingCase::QuotientMaximal => "quotient-maximal",
            LiftingCase::ProductEdge => "product-edge",
            LiftingCase::ProductPath => "product-path",
            LiftingCase::ProductMaximal => "product-maximal",
            LiftingCase::AsProduct => "as-product",
        }
    }

    pub fn is_quotient(self) -> bool {
        matches!(self, LiftingCase::QuotientEdge | LiftingCase::QuotientPath | LiftingCase::QuotientMaximal)
    }
}

impl fmt::Display for LiftingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LiftingCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LiftingCase::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown lifting case `{}`", s)))
    }
}

pub enum LiftingInput<'a> {
    Quotient { algebra: &'a Structure, theta: &'a Partition },
    Product { factors: &'a [&'a Structure], relation: &'a Subpower },
}

/// A graph together with a map from its elements to a smaller graph's elements.
struct Collapse<'a> {
    big: &'a GraphAnalysis,
    small: &'a GraphAnalysis,
    map: &'a [usize],
    big_labels: &'a [String],
    small_labels: &'a [String],
}

impl Collapse<'_> {
    fn edges(&self, r: &mut Report) {
        for e in &self.small.thin.edges {
            for a in (0..self.big.size).filter(|&a| self.map[a] == e.tail) {
                let ok = self.big.thin.edges.iter().any(|f| {
                    f.tail == a && f.kind == e.kind && self.map[f.head] == e.head && (f.special || !e.special)
                });
                r.expect(ok, || {
                    json!({"claim": "edge lifts", "kind": e.kind, "special": e.special,
                           "edge": [self.small_labels[e.tail], self.small_labels[e.head]], "from": self.big_labels[a]})
                });
            }
        }
        for e in &self.big.thin.edges {
            let (x, y) = (self.map[e.tail], self.map[e.head]);
            r.expect(x == y || self.small.thin.contains(x, y, e.kind), || {
                json!({"claim": "edge projects", "kind": e.kind,
                       "edge": [self.big_labels[e.tail], self.big_labels[e.head]]})
            });
        }
    }

    fn paths(&self, r: &mut Report) {
        for a in 0..self.big.size {
            for kind in GRADED.into_iter().chain([PathKind::Special]) {
                let mut image: Vec<usize> = self.big.reachable(a, kind).into_iter().map(|x| self.map[x]).collect();
                image.sort_unstable();
                image.dedup();
                let down = self.small.reachable(self.map[a], kind);
                let ok = if kind == PathKind::Special { down.iter().all(|x| image.contains(x)) } else { image == down };
                r.expect(ok, || {
                    json!({"claim": "paths correspond", "kind": kind_name(kind), "from": self.big_labels[a],
                           "image": image.iter().map(|&x| &self.small_labels[x]).collect::<Vec<_>>(),
                           "reachable": down.iter().map(|&x| &self.small_labels[x]).collect::<Vec<_>>()})
                });
            }
        }
    }

    fn maximal(&self, r: &mut Report) {
        for kind in GRADED {
            for b in 0..self.small.size {
                if is_maximal(self.small, kind, b) {
                    let ok = (0..self.big.size).any(|x| self.map[x] == b && is_maximal(self.big, kind, x));
                    r.expect(ok, || json!({"claim": "maximal lifts", "kind": kind_name(kind), "element": self.small_labels[b]}));
                }
            }
            for a in 0..self.big.size {
                if is_maximal(self.big, kind, a) {
                    r.expect(is_maximal(self.small, kind, self.map[a]), || {
                        json!({"claim": "maximal projects", "kind": kind_name(kind), "element": self.big_labels[a]})
                    });
                }
            }
        }
    }

    fn run(&self, case: LiftingCase, r: &mut Report) {
        match case {
            LiftingCase::QuotientEdge | LiftingCase::ProductEdge => self.edges(r),
            LiftingCase::QuotientPath | LiftingCase::ProductPath => self.paths(r),
            LiftingCase::QuotientMaximal | LiftingCase::ProductMaximal => self.maximal(r),
            LiftingCase::AsProduct => unreachable!("handled separately"),
        }
    }
}

/// Checks one of the statements relating thin edges, paths and maximal elements
/// of an algebra to those of its quotients, or of a subdirect product to those
/// of its projections.
pub fn verify_lifting(ctx: &ClassContext, case: LiftingCase, input: LiftingInput) -> Result<Report> {
    let check = format!("lifting/{}", case);
    let reasons = class_hypotheses(ctx);
    if !reasons.is_empty() {
        return Ok(Report::inapplicable(check, reasons));
    }
    match (case.is_quotient(), input) {
        (true, LiftingInput::Quotient { algebra, theta }) => {
            theta.check_compatible(&algebra.alg)?;
            let q = algebra.quotient(theta, format!("{}/θ", algebra.name()));
            let big = graph_of(ctx, algebra, Kinds::ALL)?;
            let small = graph_of(ctx, &q, Kinds::ALL)?;
            let mut r = Report::new(check);
            Collapse { big: &big, small: &small, map: theta.block_ids(), big_labels: &algebra.labels, small_labels: &q.labels }
                .run(case, &mut r);
            Ok(r)
        }
        (false, LiftingInput::Product { factors, relation }) => {
            if let Some(c) = relation.non_subdirect_coordinate() {
                return Ok(Report::inapplicable(check, vec![format!("relation is not subdirect in coordinate {}", c)]));
            }
            let rs = Structure::product(factors, relation, "R", ctx.caps.structure)?;
            let big = graph_of(ctx, &rs, Kinds::ALL)?;
            if case == LiftingCase::AsProduct {
                return as_product(ctx, factors, relation, &rs, &big, check);
            }
            let n = relation.arity();
            let mut r = Report::new(check.clone());
            for mask in 1u32..(1u32 << n) - 1 {
                let coords: Vec<usize> = (0..n).filter(|&c| mask & (1 << c) != 0).collect();
                let proj = relation.project(&coords);
                let pf: Vec<&Structure> = coords.iter().map(|&c| factors[c]).collect();
                let ps = Structure::product(&pf, &proj, "pr R", ctx.caps.structure)?;
                let small = graph_of(ctx, &ps, Kinds::ALL)?;
                let map: Vec<usize> = relation
                    .tuples()
                    .map(|t| proj.position(&coords.iter().map(|&c| t[c]).collect::<Vec<_>>()).expect("projected tuple"))
                    .collect();
                let mut part = Report::new(format!("{} I={:?}", check, coords));
                Collapse { big: &big, small: &small, map: &map, big_labels: &rs.labels, small_labels: &ps.labels }
                    .run(case, &mut part);
                r.push_part(part);
            }
            if r.parts.is_empty() {
                r.reasons.push("a unary relation has no proper projections".into());
            }
            Ok(r)
        }
        _ => Err(Error::InvalidArgument(format!("case {} does not match the given input", case))),
    }
}

fn as_product(
    ctx: &ClassContext,
    factors: &[&Structure],
    relation: &Subpower,
    rs: &Structure,
    big: &GraphAnalysis,
    check: String,
) -> Result<Report> {
    if relation.arity() != 2 {
        return Ok(Report::inapplicable(check, vec!["needs a binary relation".into()]));
    }
    let g1 = graph_of(ctx, factors[0], Kinds::ALL)?;
    let g2 = graph_of(ctx, factors[1], Kinds::ALL)?;
    let mut r = Report::new(check);
    for kind in GRADED {
        let (Some(c1), Some(c2), Some(cr)) = (g1.components(kind), g2.components(kind), big.components(kind)) else {
            continue;
        };
        for &bi in &c1.maximal {
            for &ci in &c2.maximal {
                let (b, c) = (&c1.members[bi], &c2.members[ci]);
                let cells: Option<Vec<usize>> =
                    b.iter().flat_map(|&x| c.iter().map(move |&y| relation.position(&[x, y]))).collect();
                let Some(mut cells) = cells else { continue };
                cells.sort_unstable();
                let comp = cr.component[cells[0]];
                let ok = cr.members[comp] == cells && cr.maximal.contains(&comp);
                r.expect(ok, || {
                    json!({"claim": "product of components is a component", "kind": kind_name(kind),
                           "b": b.iter().map(|&x| &factors[0].labels[x]).collect::<Vec<_>>(),
                           "c": c.iter().map(|&x| &factors[1].labels[x]).collect::<Vec<_>>(),
                           "component": cr.members[comp].iter().map(|&x| &rs.labels[x]).collect::<Vec<_>>()})
                });
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::congruence::all_congruences;
    use crate::context::Mode;
    use crate::corpus;
    use crate::report::Verdict;
    use crate::FiniteAlgebra;

    fn ctx(alg: &FiniteAlgebra) -> ClassContext {
        ClassContext::for_algebra(alg, Caps::default(), Mode::Exact).unwrap()
    }

    #[test]
    fn analyze_reports_unary_edges() {
        let p = corpus::projection2();
        let ctx = ClassContext::for_algebra(&p, Caps::default(), Mode::Exact).unwrap();
        let v = analyze(&ctx, &ctx.base_structure(0)).unwrap();
        assert_eq!(v["omits_type1"], false);
        let s = corpus::semilattice2();
        let ctx = ClassContext::for_algebra(&s, Caps::default(), Mode::Exact).unwrap();
        let v = analyze(&ctx, &ctx.base_structure(0)).unwrap();
        assert_eq!(v["omits_type1"], true);
        assert_eq!(v["graph"]["max_elements"], serde_json::json!([1]));
    }

    #[test]
    fn connectivity_of_two_element_algebras() {
        for alg in [corpus::semilattice2(), corpus::majority2(), corpus::affine2()] {
            let c = ctx(&alg);
            let r = verify_connectivity(&c, &c.base_structure(0)).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}: {:?}", alg.name, r);
        }
        let p = corpus::projection2();
        let c = ctx(&p);
        assert_eq!(verify_connectivity(&c, &c.base_structure(0)).unwrap().verdict, Verdict::Inapplicable);
    }

    #[test]
    fn quotient_lifting_on_corpus() {
        for alg in corpus::all() {
            let c = ctx(&alg);
            let base = c.base_structure(0);
            for theta in all_congruences(&alg, 100).unwrap() {
                for case in [LiftingCase::QuotientEdge, LiftingCase::QuotientPath, LiftingCase::QuotientMaximal] {
                    let r = verify_lifting(&c, case, LiftingInput::Quotient { algebra: &base, theta: &theta }).unwrap();
                    assert_ne!(r.verdict, Verdict::Fail, "{} {}: {:?}", alg.name, case, r.counterexamples);
                }
            }
        }
    }

    #[test]
    fn product_lifting_on_semilattice_relation() {
        let s2 = corpus::semilattice2();
        let c = ctx(&s2);
        let base = c.base_structure(0);
        let rel = Subpower::from_tuples(&[s2.clone(), s2.clone()], vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        for case in [LiftingCase::ProductEdge, LiftingCase::ProductPath, LiftingCase::ProductMaximal, LiftingCase::AsProduct] {
            let r = verify_lifting(&c, case, LiftingInput::Product { factors: &[&base, &base], relation: &rel }).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}: {:?}", case, r.counterexamples);
            assert!(r.checked > 0);
        }
    }

    #[test]
    fn as_product_on_full_square() {
        let s2 = corpus::semilattice2();
        let c = ctx(&s2);
        let base = c.base_structure(0);
        let rel = Subpower::from_tuples(&[s2.clone(), s2.clone()], vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        let r = verify_lifting(&c, LiftingCase::AsProduct, LiftingInput::Product { factors: &[&base, &base], relation: &rel }).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.checked, 3);
    }

    #[test]
    fn case_names_round_trip() {
        for case in LiftingCase::ALL {
            assert_eq!(case.as_str().parse::<LiftingCase>().unwrap(), case);
        }
    }
}
