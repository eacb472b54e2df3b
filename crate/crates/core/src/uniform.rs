//! Search for binary and ternary term operations that behave uniformly on every
//! thick edge of every member of a class.

use serde::Serialize;

use crate::algebra::OpTable;
use crate::clone::TermOpSet;
use crate::context::{ClassContext, Condition};
use crate::edges::EdgeType;
use crate::error::{Error, Result};
use crate::thin::thin_semilattice_edges;

/// One thick edge of one member together with a witnessing congruence, as a
/// class-id lookup over the member (`usize::MAX` outside `Sg{a,b}`).
struct EdgeConstraint {
    member: usize,
    kind: EdgeType,
    a: usize,
    b: usize,
    class: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformOps {
    /// Concatenated tables over the bases of the class.
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub h: Vec<usize>,
    /// The same operations on each base algebra.
    pub f_tables: Vec<OpTable>,
    pub g_tables: Vec<OpTable>,
    pub h_tables: Vec<OpTable>,
}

struct Search<'a> {
    ctx: &'a ClassContext,
    constraints: Vec<EdgeConstraint>,
    /// Per member: `thin_s[m][a * n + b]`.
    thin_s: Vec<Option<Vec<bool>>>,
}

impl<'a> Search<'a> {
    fn new(ctx: &'a ClassContext) -> Result<Search<'a>> {
        let mut constraints = Vec::new();
        let mut thin_s = Vec::with_capacity(ctx.members.len());
        for (m, (member, an)) in ctx.members.iter().zip(&ctx.member_edges).enumerate() {
            if member.duplicate_of.is_some() {
                thin_s.push(None);
                continue;
            }
            if !an.smooth.smooth {
                return Err(Error::InvalidArgument(format!("class member {} is not smooth", member.structure.name())));
            }
            let n = member.structure.size();
            let mut bits = vec![false; n * n];
            for e in thin_semilattice_edges(&member.structure.alg, &ctx.caps)? {
                bits[e.tail * n + e.head] = true;
            }
            thin_s.push(Some(bits));
            for e in &an.edges {
                if !matches!(e.resolved, EdgeType::Semilattice | EdgeType::Majority | EdgeType::Affine) {
                    continue;
                }
                for w in e.resolved_witnesses() {
                    let mut class = vec![usize::MAX; n];
                    for (p, &x) in e.subalgebra.iter().enumerate() {
                        class[x] = w.theta.block_of(p);
                    }
                    constraints.push(EdgeConstraint { member: m, kind: e.resolved, a: e.a, b: e.b, class });
                }
            }
        }
        Ok(Search { ctx, constraints, thin_s })
    }

    fn f2(&self, m: usize, f: &[usize], x: usize, y: usize) -> usize {
        self.ctx.members[m].structure.eval(self.ctx.binary.layout(), f, &[x, y])
    }

    fn t3(&self, m: usize, t: &[usize], args: [usize; 3]) -> usize {
        self.ctx.members[m].structure.eval(self.ctx.ternary.layout(), t, &args)
    }

    fn f_ok(&self, f: &[usize]) -> bool {
        let layout = self.ctx.binary.layout();
        for (j, base) in layout.bases.iter().enumerate() {
            for x in 0..base.size {
                for y in 0..base.size {
                    let fxy = layout.eval_base(f, j, &[x, y]);
                    if layout.eval_base(f, j, &[x, fxy]) != fxy {
                        return false;
                    }
                }
            }
        }
        for c in &self.constraints {
            let (ab, ba) = (c.class[self.f2(c.member, f, c.a, c.b)], c.class[self.f2(c.member, f, c.b, c.a)]);
            let ok = match c.kind {
                EdgeType::Semilattice => ab == ba,
                _ => ab == c.class[c.a] && ba == c.class[c.b],
            };
            if !ok {
                return false;
            }
        }
        for (m, bits) in self.thin_s.iter().enumerate() {
            let Some(bits) = bits else { continue };
            let n = self.ctx.members[m].structure.size();
            for a in 0..n {
                for b in 0..n {
                    let c = self.f2(m, f, a, b);
                    if c != a && !bits[a * n + c] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Clauses for `g` (`which = Majority`) or `h` (`which = Minority`) given `f`.
    fn ternary_ok(&self, which: Condition, f: &[usize], t: &[usize]) -> bool {
        if !self.ctx.satisfies(which, t) {
            return false;
        }
        let projecting = match which {
            Condition::Majority => EdgeType::Affine,
            Condition::Minority => EdgeType::Majority,
        };
        for c in &self.constraints {
            if c.kind != EdgeType::Semilattice && c.kind != projecting {
                continue;
            }
            for x in [c.a, c.b] {
                for y in [c.a, c.b] {
                    for z in [c.a, c.b] {
                        let v = c.class[self.t3(c.member, t, [x, y, z])];
                        let expected = if c.kind == EdgeType::Semilattice {
                            let fyz = self.f2(c.member, f, y, z);
                            c.class[self.f2(c.member, f, x, fyz)]
                        } else {
                            c.class[x]
                        };
                        if v != expected {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

fn not_found(set: &TermOpSet, what: &str) -> Error {
    if set.is_complete() {
        Error::SearchExhausted(format!("no {} in the complete clone fragment", what))
    } else {
        Error::NotFoundWithinCap(format!("no {} among {} enumerated operations", what, set.len()))
    }
}

/// The first binary term operation (in enumeration order) that is a semilattice
/// operation on thick semilattice edges, the first projection on the other
/// edges, satisfies `f(x,f(x,y)) = f(x,y)`, and moves every `a` along a thin
/// semilattice edge or not at all.
pub fn find_good_f(ctx: &ClassContext) -> Result<usize> {
    let search = Search::new(ctx)?;
    (0..ctx.binary.len()).find(|&i| search.f_ok(ctx.binary.table(i))).ok_or_else(|| not_found(&ctx.binary, "suitable binary operation"))
}

pub fn find_uniform_ops(ctx: &ClassContext) -> Result<UniformOps> {
    let search = Search::new(ctx)?;
    let fi = (0..ctx.binary.len())
        .find(|&i| search.f_ok(ctx.binary.table(i)))
        .ok_or_else(|| not_found(&ctx.binary, "suitable binary operation f"))?;
    let f = ctx.binary.table(fi).to_vec();
    let pick = |which: Condition, what: &str| {
        let candidates = match which {
            Condition::Majority => &ctx.majority_ops,
            Condition::Minority => &ctx.minority_ops,
        };
        candidates
            .iter()
            .copied()
            .find(|&i| search.ternary_ok(which, &f, ctx.ternary.table(i)))
            .map(|i| ctx.ternary.table(i).to_vec())
            .ok_or_else(|| not_found(&ctx.ternary, what))
    };
    let g = pick(Condition::Majority, "suitable ternary operation g")?;
    let h = pick(Condition::Minority, "suitable ternary operation h")?;
    let nb = ctx.bases().len();
    Ok(UniformOps {
        f_tables: (0..nb).map(|j| ctx.binary.op_table(fi, j, "f")).collect(),
        g_tables: (0..nb).map(|j| ctx.base_table(&g, j, "g")).collect(),
        h_tables: (0..nb).map(|j| ctx.base_table(&h, j, "h")).collect(),
        f,
        g,
        h,
    })
}

impl UniformOps {
    /// The three operations as tables on one member of the class.
    pub fn member_tables(&self, ctx: &ClassContext, member: usize) -> [OpTable; 3] {
        let s = &ctx.members[member].structure;
        let n = s.size();
        let bl = ctx.binary.layout();
        let tl = ctx.ternary.layout();
        [
            OpTable::from_fn("f", 2, n, |x| s.eval(bl, &self.f, x)),
            OpTable::from_fn("g", 3, n, |x| s.eval(tl, &self.g, x)),
            OpTable::from_fn("h", 3, n, |x| s.eval(tl, &self.h, x)),
        ]
    }
}
