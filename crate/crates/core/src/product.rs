//! Rectangularity, quasi-2-decomposability, quasi-majority terms and almost
//! trivial relations, checked exhaustively on concrete subdirect products.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{FiniteAlgebra, OpTable};
use crate::closure::{close, sg_unchecked, term_from_derivations, subpower_generate, Subpower};
use crate::congruence::{is_simple, link_congruence, Partition};
use crate::context::ClassContext;
use crate::corpus;
use crate::error::{Error, Result};
use crate::graph::{GraphAnalysis, PathKind};
use crate::report::{class_hypotheses, Report, Verdict};
use crate::structure::Structure;
use crate::term::Term;
use crate::thin::Kinds;
use crate::verify::{graph_of, verify_lifting, LiftingCase, LiftingInput};

/// A factor of a relation file: a corpus name or an inline algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorSpec {
    Named(String),
    Inline(FiniteAlgebra),
}

/// Relation file: factors plus either generators or an explicit closed tuple set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub factors: Vec<FactorSpec>,
    pub arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuples: Option<Vec<Vec<usize>>>,
}

impl RelationSpec {
    pub fn from_json(s: &str) -> Result<RelationSpec> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("relation file: {}", e)))
    }

    pub fn resolve_factors(&self) -> Result<Vec<FiniteAlgebra>> {
        if self.factors.len() != self.arity {
            return Err(Error::InvalidArgument(format!("arity {} but {} factors", self.arity, self.factors.len())));
        }
        self.factors
            .iter()
            .map(|f| match f {
                FactorSpec::Named(n) => corpus::by_name(n).ok_or_else(|| Error::InvalidArgument(format!("unknown corpus algebra `{}`", n))),
                FactorSpec::Inline(a) => {
                    a.validate()?;
                    Ok(a.clone())
                }
            })
            .collect()
    }

    pub fn build(&self, tuple_cap: usize) -> Result<Subpower> {
        let factors = self.resolve_factors()?;
        match (&self.generators, &self.tuples) {
            (Some(g), None) => subpower_generate(&factors, g, false, tuple_cap),
            (None, Some(t)) => Subpower::from_tuples(&factors, t.clone()),
            _ => Err(Error::InvalidArgument("relation file needs exactly one of `generators` and `tuples`".into())),
        }
    }

    pub fn from_subpower(rel: &Subpower) -> RelationSpec {
        RelationSpec {
            factors: rel.factors().iter().map(|f| FactorSpec::Inline(f.clone())).collect(),
            arity: rel.arity(),
            generators: None,
            tuples: Some(rel.sorted_tuples()),
        }
    }
}

/// Built-in example relations over corpus algebras.
pub fn corpus_relations() -> Vec<(&'static str, RelationSpec)> {
    let named = |n: &str, k: usize| vec![FactorSpec::Named(n.to_string()); k];
    let even: Vec<Vec<usize>> = crate::algebra::all_tuples(2, 3).filter(|t| t.iter().sum::<usize>() % 2 == 0).collect();
    let chain: Vec<Vec<usize>> = crate::algebra::all_tuples(3, 2).filter(|t| t[0] <= t[1]).collect();
    vec![
        ("parity3", RelationSpec { factors: named("z2", 3), arity: 3, generators: None, tuples: Some(even) }),
        ("s2_order", RelationSpec { factors: named("s2", 2), arity: 2, generators: None, tuples: Some(vec![vec![0, 0], vec![0, 1], vec![1, 1]]) }),
        ("c3_order", RelationSpec { factors: named("c3", 2), arity: 2, generators: None, tuples: Some(chain) }),
        (
            "m2_cube",
            RelationSpec { factors: named("m2", 3), arity: 3, generators: Some(vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 1]]), tuples: None },
        ),
    ]
}

/// The factors of a relation as structures over the bases of `ctx`.
pub fn factor_structures(ctx: &ClassContext, rel: &Subpower) -> Result<Vec<Structure>> {
    rel.factors()
        .iter()
        .map(|f| {
            ctx.base_index(f)
                .map(|j| ctx.base_structure(j))
                .ok_or_else(|| Error::InvalidArgument(format!("factor `{}` is not a base of the class", f.name)))
        })
        .collect()
}

/// The class generated by the factors of a relation.
pub fn context_for(rel: &Subpower, caps: crate::caps::Caps, mode: crate::context::Mode) -> Result<ClassContext> {
    ClassContext::new(rel.factors(), caps, mode)
}

fn applicability(ctx: &ClassContext, rel: &Subpower, binary: bool) -> Vec<String> {
    let mut reasons = class_hypotheses(ctx);
    if let Some(c) = rel.non_subdirect_coordinate() {
        reasons.push(format!("relation is not subdirect in coordinate {}", c));
    }
    if binary && rel.arity() != 2 {
        reasons.push(format!("needs a binary relation, got arity {}", rel.arity()));
    }
    reasons
}

fn image(rel: &Subpower, from: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = rel.tuples().filter(|t| from.contains(&t[0])).map(|t| t[1]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn labels(s: &Structure, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| s.labels[x].clone()).collect()
}

/// Maximal SCCs of `G_as`, as element lists of the structure's parent when the
/// structure is `parent.sub(elems)`.
fn as_components_in(ctx: &ClassContext, parent: &Structure, elems: &[usize]) -> Result<Vec<Vec<usize>>> {
    let sub = parent.sub(elems, format!("{}|sub", parent.name()));
    let g = graph_of(ctx, &sub, Kinds::AS)?;
    Ok(g.r#as.maximal.iter().map(|&c| g.r#as.members[c].iter().map(|&x| elems[x]).collect()).collect())
}

fn rect_pairs(rel: &Subpower, r: &mut Report, a1: &Structure, a2: &Structure, b1s: &[Vec<usize>], b2s: &[Vec<usize>]) {
    for b1 in b1s {
        for b2 in b2s {
            let meets = b1.iter().any(|&x| b2.iter().any(|&y| rel.contains(&[x, y])));
            if !meets {
                continue;
            }
            let missing = b1.iter().flat_map(|&x| b2.iter().map(move |&y| (x, y))).find(|&(x, y)| !rel.contains(&[x, y]));
            r.expect(missing.is_none(), || {
                let (x, y) = missing.unwrap();
                json!({"b1": labels(a1, b1), "b2": labels(a2, b2), "missing": [a1.labels[x], a2.labels[y]]})
            });
        }
    }
}

/// For a linked binary subdirect product, products of intersecting
/// as-components lie in the relation; in any case `Ft^as_B(c) ⊆ R[b]` for
/// thin edges `ab` and `B = R[a]`.
pub fn rect_check(ctx: &ClassContext, rel: &Subpower) -> Result<Report> {
    const CHECK: &str = "rect";
    let reasons = applicability(ctx, rel, true);
    if !reasons.is_empty() {
        return Ok(Report::inapplicable(CHECK, reasons));
    }
    let fs = factor_structures(ctx, rel)?;
    let (a1, a2) = (&fs[0], &fs[1]);
    let g1 = graph_of(ctx, a1, Kinds::ALL)?;
    let g2 = graph_of(ctx, a2, Kinds::AS)?;

    let mut filter = Report::new("rect/filter-containment");
    for a in 0..a1.size() {
        let b_set = image(rel, &[a]);
        let bs = a2.sub(&b_set, "R[a]");
        let gb = graph_of(ctx, &bs, Kinds::AS)?;
        for e in g1.thin.edges.iter().filter(|e| e.tail == a) {
            let rb = image(rel, &[e.head]);
            for (ci, &c) in b_set.iter().enumerate() {
                if !rb.contains(&c) {
                    continue;
                }
                let ft: Vec<usize> = gb.reachable(ci, PathKind::As).into_iter().map(|x| b_set[x]).collect();
                let outside: Vec<usize> = ft.iter().copied().filter(|x| !rb.contains(x)).collect();
                filter.expect(outside.is_empty(), || {
                    json!({"edge": [a1.labels[a], a1.labels[e.head]], "kind": e.kind, "c": a2.labels[c],
                           "outside": labels(a2, &outside)})
                });
            }
        }
    }

    let lk1 = link_congruence(rel, 0)?;
    let lk2 = link_congruence(rel, 1)?;
    let linked = lk1.is_full() && lk2.is_full();
    let rect = if linked {
        let mut r = Report::new("rect/linked");
        let comps = |g: &GraphAnalysis| -> Vec<Vec<usize>> { g.r#as.maximal.iter().map(|&c| g.r#as.members[c].clone()).collect() };
        rect_pairs(rel, &mut r, a1, a2, &comps(&g1), &comps(&g2));
        r
    } else {
        Report::inapplicable("rect/linked", vec!["relation is not linked".into()])
    };
    let mut r = Report::new(CHECK);
    let rect_verdict = rect.verdict;
    let filter_failed = filter.verdict == Verdict::Fail;
    r.push_part(filter);
    r.push_part(rect);
    r.verdict = if filter_failed { Verdict::Fail } else { rect_verdict };
    if r.verdict == Verdict::Inapplicable {
        r.reasons.push("relation is not linked".into());
    }
    r.details = json!({"linked": linked});
    Ok(r)
}

/// Rectangularity of as-components of link-congruence blocks.
pub fn linkage_rect_check(ctx: &ClassContext, rel: &Subpower) -> Result<Report> {
    const CHECK: &str = "linkage-rect";
    let reasons = applicability(ctx, rel, true);
    if !reasons.is_empty() {
        return Ok(Report::inapplicable(CHECK, reasons));
    }
    let fs = factor_structures(ctx, rel)?;
    let lk1 = link_congruence(rel, 0)?;
    let lk2 = link_congruence(rel, 1)?;
    let mut r = Report::new(CHECK);
    let mut comps1 = Vec::new();
    for block in lk1.blocks() {
        comps1.extend(as_components_in(ctx, &fs[0], &block)?);
    }
    let mut comps2 = Vec::new();
    for block in lk2.blocks() {
        comps2.extend(as_components_in(ctx, &fs[1], &block)?);
    }
    rect_pairs(rel, &mut r, &fs[0], &fs[1], &comps1, &comps2);
    r.details = json!({"lk1": lk1.block_ids(), "lk2": lk2.block_ids()});
    Ok(r)
}

/// For an as-component `B1` of an lk1-block, the u-maximal part of `R[B1]`
/// lies in `R[b]` for every `b ∈ B1`.
pub fn umax_rect_check(ctx: &ClassContext, rel: &Subpower) -> Result<Report> {
    const CHECK: &str = "umax-rect";
    let reasons = applicability(ctx, rel, true);
    if !reasons.is_empty() {
        return Ok(Report::inapplicable(CHECK, reasons));
    }
    let fs = factor_structures(ctx, rel)?;
    let lk1 = link_congruence(rel, 0)?;
    let mut r = Report::new(CHECK);
    let mut skipped = Vec::new();
    for block in lk1.blocks() {
        for b1 in as_components_in(ctx, &fs[0], &block)? {
            let b2p = image(rel, &b1);
            if sg_unchecked(&fs[1].alg, &b2p).len() != b2p.len() {
                skipped.push(format!("R[{:?}] is not a subuniverse", labels(&fs[0], &b1)));
                continue;
            }
            let sub = fs[1].sub(&b2p, "R[B1]");
            let g = graph_of(ctx, &sub, Kinds::ALL)?;
            let b2: Vec<usize> = g.umax_elements.as_ref().expect("majority edges computed").iter().map(|&x| b2p[x]).collect();
            let missing = b1.iter().flat_map(|&x| b2.iter().map(move |&y| (x, y))).find(|&(x, y)| !rel.contains(&[x, y]));
            r.expect(missing.is_none(), || {
                let (x, y) = missing.unwrap();
                json!({"b1": labels(&fs[0], &b1), "b2": labels(&fs[1], &b2), "missing": [fs[0].labels[x], fs[1].labels[y]]})
            });
        }
    }
    if r.checked == 0 && !skipped.is_empty() {
        r.verdict = Verdict::Inapplicable;
    }
    r.reasons = skipped;
    Ok(r)
}

/// Structures and as-data of the binary projections of a relation.
struct PairData {
    i: usize,
    j: usize,
    proj: Subpower,
    graph: GraphAnalysis,
}

impl PairData {
    fn index(&self, x: usize, y: usize) -> Option<usize> {
        self.proj.position(&[x, y])
    }

    /// The as-component id of an as-maximal pair, if it is one.
    fn amax_component(&self, x: usize, y: usize) -> Option<usize> {
        let p = self.index(x, y)?;
        self.graph.r#as.is_maximal(p).then(|| self.graph.r#as.component[p])
    }

    fn component(&self, x: usize, y: usize) -> Option<usize> {
        self.index(x, y).map(|p| self.graph.r#as.component[p])
    }
}

fn pair_data(ctx: &ClassContext, fs: &[Structure], rel: &Subpower) -> Result<Vec<PairData>> {
    let n = rel.arity();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let proj = rel.project(&[i, j]);
            let s = Structure::product(&[&fs[i], &fs[j]], &proj, format!("pr{}{} R", i, j), ctx.caps.structure)?;
            let graph = graph_of(ctx, &s, Kinds::AS)?;
            out.push(PairData { i, j, proj, graph });
        }
    }
    Ok(out)
}

/// All tuples whose binary projections are as-maximal in the projections of the relation.
fn candidates(rel: &Subpower, pairs: &[PairData]) -> Vec<Vec<usize>> {
    let n = rel.arity();
    let sizes: Vec<usize> = rel.factors().iter().map(|f| f.size).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(k: usize, n: usize, sizes: &[usize], pairs: &[PairData], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == n {
            out.push(cur.clone());
            return;
        }
        for x in 0..sizes[k] {
            let ok = pairs.iter().filter(|p| p.j == k).all(|p| p.amax_component(cur[p.i], x).is_some());
            if ok {
                cur.push(x);
                rec(k + 1, n, sizes, pairs, cur, out);
                cur.pop();
            }
        }
    }
    rec(0, n, &sizes, pairs, &mut cur, &mut out);
    out
}

fn q2d_witness<'a>(rel: &'a Subpower, pairs: &[PairData], a: &[usize], pin: &[usize]) -> Option<&'a Vec<usize>> {
    rel.tuples().find(|b| {
        pin.iter().all(|&c| b[c] == a[c]) && pairs.iter().all(|p| p.component(b[p.i], b[p.j]) == p.component(a[p.i], a[p.j]))
    })
}

/// Whether some ternary term operation is a majority operation on every base.
fn has_majority_term(ctx: &ClassContext) -> bool {
    let layout = ctx.ternary.layout();
    ctx.majority_ops.iter().any(|&i| {
        let t = ctx.ternary.table(i);
        layout.bases.iter().enumerate().all(|(j, b)| {
            (0..b.size).all(|x| {
                (0..b.size).all(|y| {
                    layout.eval_base(t, j, &[x, x, y]) == x && layout.eval_base(t, j, &[x, y, x]) == x && layout.eval_base(t, j, &[y, x, x]) == x
                })
            })
        })
    })
}

/// Quasi-2-decomposability; with `pin`, candidates whose restriction to the
/// pinned coordinates is as-maximal in that projection must be matched exactly there.
pub fn q2d_check(ctx: &ClassContext, rel: &Subpower, pin: Option<&[usize]>) -> Result<Report> {
    const CHECK: &str = "q2d";
    let mut reasons = applicability(ctx, rel, false);
    if rel.arity() > ctx.caps.coords {
        reasons.push(format!("arity {} exceeds the coordinate cap {}", rel.arity(), ctx.caps.coords));
    }
    if let Some(x) = pin {
        if x.iter().any(|&c| c >= rel.arity()) {
            return Err(Error::InvalidArgument(format!("pinned coordinates {:?} out of range", x)));
        }
    }
    if !reasons.is_empty() {
        return Ok(Report::inapplicable(CHECK, reasons));
    }
    let fs = factor_structures(ctx, rel)?;
    let pairs = pair_data(ctx, &fs, rel)?;
    let cands = candidates(rel, &pairs);
    let mut main = Report::new("q2d/candidates");
    let mut witnesses = Vec::new();
    for a in &cands {
        let w = q2d_witness(rel, &pairs, a, &[]);
        main.expect(w.is_some(), || json!({"candidate": a}));
        if let Some(b) = w {
            witnesses.push(json!([a, b]));
        }
    }
    main.details = json!({"candidates": cands.len(), "witnesses": witnesses});
    let mut r = Report::new(CHECK);
    r.push_part(main);

    if let Some(x) = pin {
        let mut xs = x.to_vec();
        xs.sort_unstable();
        xs.dedup();
        let proj = rel.project(&xs);
        let pf: Vec<&Structure> = xs.iter().map(|&c| &fs[c]).collect();
        let ps = Structure::product(&pf, &proj, "pr_X R", ctx.caps.structure)?;
        let g = graph_of(ctx, &ps, Kinds::AS)?;
        let mut pinned = Report::new(format!("q2d/pinned X={:?}", xs));
        for a in &cands {
            let pa: Vec<usize> = xs.iter().map(|&c| a[c]).collect();
            let Some(p) = proj.position(&pa) else { continue };
            if !g.r#as.is_maximal(p) {
                continue;
            }
            pinned.expect(q2d_witness(rel, &pairs, a, &xs).is_some(), || json!({"candidate": a, "pinned": xs}));
        }
        r.push_part(pinned);
    }

    if has_majority_term(ctx) {
        let mut bp = Report::new("q2d/two-decomposable");
        let sizes: Vec<usize> = rel.factors().iter().map(|f| f.size).collect();
        let total: usize = sizes.iter().product();
        let mut t = vec![0; sizes.len()];
        for _ in 0..total {
            let projections_ok = pairs.iter().all(|p| p.index(t[p.i], t[p.j]).is_some());
            bp.expect(!projections_ok || rel.contains(&t), || json!({"tuple": t}));
            for k in (0..t.len()).rev() {
                t[k] += 1;
                if t[k] < sizes[k] {
                    break;
                }
                t[k] = 0;
            }
        }
        r.push_part(bp);
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MemberTable {
    pub member: String,
    pub table: OpTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiMajority {
    /// The extracted term in variables `x0, x1, x2`.
    pub term: String,
    /// The operation on each distinct member of the class.
    pub tables: Vec<MemberTable>,
    /// Pointwise verification on every member and pair.
    pub report: Report,
}

/// Finds a ternary term `m` with `m(a,a,b), m(a,b,a), m(b,a,a) ∈ Ft^as(a)` on every member.
pub fn quasi_majority(ctx: &ClassContext) -> Result<QuasiMajority> {
    let reasons = class_hypotheses(ctx);
    if !reasons.is_empty() {
        return Err(Error::InvalidArgument(format!("hypotheses fail: {}", reasons.join("; "))));
    }
    let members: Vec<usize> = (0..ctx.members.len()).filter(|&m| ctx.members[m].duplicate_of.is_none()).collect();
    let mut ft: Vec<Vec<Vec<usize>>> = Vec::new();
    for &m in &members {
        let s = &ctx.members[m].structure;
        let g = graph_of(ctx, s, Kinds::AS)?;
        ft.push((0..s.size()).map(|a| g.reachable(a, PathKind::As)).collect());
    }
    let mut coords: Vec<&FiniteAlgebra> = Vec::new();
    let mut gens = vec![Vec::new(), Vec::new(), Vec::new()];
    let mut allowed: Vec<Vec<bool>> = Vec::new();
    for (k, &m) in members.iter().enumerate() {
        let alg = &ctx.members[m].structure.alg;
        for a in 0..alg.size {
            for b in 0..alg.size {
                if a == b {
                    continue;
                }
                for (g, triple) in gens.iter_mut().zip([[a, a, b], [a, b, a], [b, a, a]]) {
                    g.extend(triple);
                }
                let mask: Vec<bool> = (0..alg.size).map(|x| ft[k][a].contains(&x)).collect();
                for _ in 0..3 {
                    coords.push(alg);
                    allowed.push(mask.clone());
                }
            }
        }
    }
    let term = if coords.is_empty() {
        Term::projection(3, 0, &ctx.bases()[0])
    } else {
        let stop = |t: &[usize]| t.iter().zip(&allowed).all(|(&x, mask)| mask[x]);
        let closure = close(&coords, coords[0], &gens, true, ctx.caps.tuples, Some(&stop));
        let hit = match closure.hit {
            Some(i) => i,
            None if closure.complete => return Err(Error::SearchExhausted("no quasi-majority term in the generated relation".into())),
            None => return Err(Error::CapExceeded { what: "quasi-majority relation".into(), cap: ctx.caps.tuples }),
        };
        term_from_derivations(closure.derivations.as_ref().expect("tracked"), hit, 3, coords[0])
    };
    let mut report = Report::new("qmaj");
    let mut tables = Vec::new();
    for (k, &m) in members.iter().enumerate() {
        let s = &ctx.members[m].structure;
        let table = term.table(&s.alg, "maj");
        let n = s.size();
        for a in 0..n {
            for b in 0..n {
                for args in [[a, a, b], [a, b, a], [b, a, a]] {
                    let v = table.apply(n, &args);
                    report.expect(ft[k][a].contains(&v), || {
                        json!({"member": s.name(), "args": labels(s, &args), "value": s.labels[v], "ft_as": labels(s, &ft[k][a])})
                    });
                }
            }
        }
        tables.push(MemberTable { member: s.name().to_string(), table });
    }
    Ok(QuasiMajority { term: term.to_string(), tables, report })
}

/// A coordinate block of an almost trivial decomposition: the first coordinate
/// and the bijections onto the others.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub coordinates: Vec<usize>,
    /// `maps[k][x]` is the value at `coordinates[k + 1]` when the first is `x`.
    pub maps: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub blocks: Vec<Block>,
}

impl Decomposition {
    /// The relation described by the decomposition.
    pub fn tuples(&self, sizes: &[usize]) -> Vec<Vec<usize>> {
        let n = sizes.len();
        let mut out = vec![vec![0; n]];
        for b in &self.blocks {
            let first = b.coordinates[0];
            let mut next = Vec::new();
            for t in &out {
                for x in 0..sizes[first] {
                    let mut t = t.clone();
                    t[first] = x;
                    for (k, &c) in b.coordinates[1..].iter().enumerate() {
                        t[c] = b.maps[k][x];
                    }
                    next.push(t);
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(k: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if k == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(k);
            rec(k + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![k]);
        rec(k + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

/// A decomposition of a subdirect relation into blocks of bijection graphs, if one exists.
pub fn almost_trivial_check(rel: &Subpower, coord_cap: usize) -> Result<Option<Decomposition>> {
    let n = rel.arity();
    if n > coord_cap {
        return Err(Error::CapExceeded { what: "coordinates".into(), cap: coord_cap });
    }
    if let Some(c) = rel.non_subdirect_coordinate() {
        return Err(Error::NotSubdirect(c));
    }
    let sizes: Vec<usize> = rel.factors().iter().map(|f| f.size).collect();
    'partitions: for partition in set_partitions(n) {
        let mut product = 1usize;
        let mut blocks = Vec::new();
        for block in &partition {
            let proj = rel.project(block);
            if block.iter().any(|&c| sizes[c] != proj.len()) {
                continue 'partitions;
            }
            product = product.saturating_mul(proj.len());
            let first = block[0];
            let mut maps = vec![vec![0; sizes[first]]; block.len() - 1];
            for t in proj.tuples() {
                for k in 1..block.len() {
                    maps[k - 1][t[0]] = t[k];
                }
            }
            blocks.push(Block { coordinates: block.clone(), maps });
        }
        if product == rel.len() {
            return Ok(Some(Decomposition { blocks }));
        }
    }
    Ok(None)
}

fn maximal_generated(ctx: &ClassContext, s: &Structure) -> Result<(GraphAnalysis, Vec<Vec<usize>>)> {
    let g = graph_of(ctx, s, Kinds::S)?;
    let generating = g
        .s
        .maximal
        .iter()
        .map(|&c| g.s.members[c].clone())
        .filter(|c| sg_unchecked(&s.alg, c).len() == s.size())
        .collect();
    Ok((g, generating))
}

/// Rectangularity for maximal components: almost triviality of products of
/// simple maximal generated algebras, splitting off a first factor, and the
/// component product containment for relations linked to their first coordinate.
pub fn maxgen_suite(ctx: &ClassContext, rel: &Subpower) -> Result<Report> {
    const CHECK: &str = "maxgen";
    let reasons = applicability(ctx, rel, false);
    if !reasons.is_empty() {
        return Ok(Report::inapplicable(CHECK, reasons));
    }
    let n = rel.arity();
    let fs = factor_structures(ctx, rel)?;
    let mut gen_info = Vec::new();
    for s in &fs {
        gen_info.push(maximal_generated(ctx, s)?);
    }
    let mut r = Report::new(CHECK);

    // products of simple maximal generated factors meeting generating components
    let mut why = Vec::new();
    if let Some(i) = (0..n).find(|&i| !is_simple(&fs[i].alg)) {
        why.push(format!("factor {} is not simple", i));
    }
    if let Some(i) = (0..n).find(|&i| gen_info[i].1.is_empty()) {
        why.push(format!("factor {} is not generated by a maximal component", i));
    }
    let mut part = if why.is_empty() {
        let meets = rel.tuples().any(|t| (0..n).all(|i| gen_info[i].1.iter().any(|c| c.contains(&t[i]))));
        if meets {
            let mut p = Report::new("maxgen/almost-trivial");
            let d = almost_trivial_check(rel, ctx.caps.coords)?;
            p.expect(d.is_some(), || json!({"relation": rel.sorted_tuples()}));
            p
        } else {
            Report::inapplicable("maxgen/almost-trivial", vec!["relation misses every product of generating components".into()])
        }
    } else {
        Report::inapplicable("maxgen/almost-trivial", why)
    };
    r.push_part(part);

    // splitting off the first factor
    part = if n < 2 {
        Report::inapplicable("maxgen/split-first", vec!["needs at least two coordinates".into()])
    } else {
        let rest: Vec<usize> = (1..n).collect();
        let proj = rel.project(&rest);
        let pf: Vec<&Structure> = rest.iter().map(|&c| &fs[c]).collect();
        let ps = Structure::product(&pf, &proj, "pr_2..n R", ctx.caps.structure)?;
        let (_, q_gen) = maximal_generated(ctx, &ps)?;
        let mut why = Vec::new();
        if gen_info[0].1.is_empty() {
            why.push("first factor is not generated by a maximal component".to_string());
        }
        if q_gen.is_empty() {
            why.push("the projection onto the other coordinates is not maximal generated".into());
        }
        if let Some(i) = (1..n).find(|&i| rel.project(&[0, i]).len() != fs[0].size() * fs[i].size()) {
            why.push(format!("projection onto coordinates 0,{} is not the full product", i));
        }
        let meets = rel.tuples().any(|t| {
            gen_info[0].1.iter().any(|c| c.contains(&t[0]))
                && proj.position(&t[1..]).is_some_and(|p| q_gen.iter().any(|q| q.contains(&p)))
        });
        if why.is_empty() && !meets {
            why.push("relation misses every product of generating components".into());
        }
        if why.is_empty() {
            let mut p = Report::new("maxgen/split-first");
            p.expect(rel.len() == fs[0].size() * proj.len(), || json!({"size": rel.len(), "product": fs[0].size() * proj.len()}));
            p
        } else {
            Report::inapplicable("maxgen/split-first", why)
        }
    };
    r.push_part(part);

    // component products for relations linked through the first coordinate
    part = if n < 2 {
        Report::inapplicable("maxgen/component-product", vec!["needs at least two coordinates".into()])
    } else {
        let mut why = Vec::new();
        for i in 1..n {
            let p = rel.project(&[0, i]);
            let lk: Partition = link_congruence(&p, 0)?;
            let lk2 = link_congruence(&p, 1)?;
            if !(lk.is_full() && lk2.is_full()) {
                why.push(format!("projection onto coordinates 0,{} is not linked", i));
            }
        }
        if why.is_empty() {
            let rest: Vec<usize> = (1..n).collect();
            let proj = rel.project(&rest);
            let pf: Vec<&Structure> = rest.iter().map(|&c| &fs[c]).collect();
            let ps = Structure::product(&pf, &proj, "pr_2..n R", ctx.caps.structure)?;
            let gq = graph_of(ctx, &ps, Kinds::S)?;
            let g1 = &gen_info[0].0;
            let mut p = Report::new("maxgen/component-product");
            for t in rel.tuples() {
                let q = proj.position(&t[1..]).expect("projected tuple");
                if !(g1.s.is_maximal(t[0]) && gq.s.is_maximal(q)) {
                    continue;
                }
                let c1 = g1.s.component_of(t[0]);
                let cq = gq.s.component_of(q);
                let missing = c1.iter().flat_map(|&x| cq.iter().map(move |&y| (x, y))).find(|&(x, y)| {
                    let mut u = vec![x];
                    u.extend_from_slice(proj.tuple(y));
                    !rel.contains(&u)
                });
                p.expect(missing.is_none(), || {
                    let (x, y) = missing.unwrap();
                    json!({"a": t, "missing_first": fs[0].labels[x], "missing_rest": ps.labels[y]})
                });
            }
            p
        } else {
            Report::inapplicable("maxgen/component-product", why)
        }
    };
    r.push_part(part);
    Ok(r)
}

/// Runs a named check on a relation: `rect` (all three rectangularity checks),
/// `q2d`, `almost-trivial` (the maximal-generated suite plus a decomposition) or
/// `lifting` (one product case, or all of them).
pub fn check_relation(ctx: &ClassContext, rel: &Subpower, check: &str, pin: Option<&[usize]>, case: Option<LiftingCase>) -> Result<Report> {
    Ok(match check {
        "rect" => {
            let mut r = Report::new("rect");
            r.push_part(rect_check(ctx, rel)?);
            r.push_part(linkage_rect_check(ctx, rel)?);
            r.push_part(umax_rect_check(ctx, rel)?);
            r
        }
        "q2d" => q2d_check(ctx, rel, pin)?,
        "almost-trivial" => {
            let mut r = maxgen_suite(ctx, rel)?;
            let d = if rel.is_subdirect() { almost_trivial_check(rel, ctx.caps.coords)? } else { None };
            r.details = json!({"almost_trivial": d.is_some(), "decomposition": d});
            r
        }
        "lifting" => {
            let cases: Vec<LiftingCase> = match case {
                Some(c) if c.is_quotient() => {
                    return Err(Error::InvalidArgument(format!("{} needs an algebra and a congruence, not a relation", c)))
                }
                Some(c) => vec![c],
                None => LiftingCase::ALL.into_iter().filter(|c| !c.is_quotient()).collect(),
            };
            let fs = factor_structures(ctx, rel)?;
            let refs: Vec<&Structure> = fs.iter().collect();
            let mut r = Report::new("lifting");
            for c in cases {
                r.push_part(verify_lifting(ctx, c, LiftingInput::Product { factors: &refs, relation: rel })?);
            }
            r
        }
        other => return Err(Error::InvalidArgument(format!("unknown relation check `{}`", other))),
    })
}
