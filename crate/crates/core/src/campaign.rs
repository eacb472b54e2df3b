//! Seeded verification campaigns over random instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::FiniteAlgebra;
use crate::caps::Caps;
use crate::clone::term_ops;
use crate::closure::{subpower_generate, Subpower};
use crate::congruence::all_congruences;
use crate::context::{ClassContext, Mode};
use crate::corpus;
use crate::error::{Error, Result};
use crate::product::{context_for, factor_structures, linkage_rect_check, q2d_check, rect_check, umax_rect_check, RelationSpec};
use crate::random::{passes, random_factors, AlgebraStream, DrawStats, Filter, RandomSpec};
use crate::report::{Report, Verdict};
use crate::verify::{verify_connectivity, verify_lifting, LiftingCase, LiftingInput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignKind {
    Connectivity,
    Rect,
    Q2d,
    Lifting,
}

impl CampaignKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CampaignKind::Connectivity => "connectivity",
            CampaignKind::Rect => "rect",
            CampaignKind::Q2d => "q2d",
            CampaignKind::Lifting => "lifting",
        }
    }

    /// Generator used when none is given.
    pub fn default_spec(self) -> RandomSpec {
        let text = match self {
            CampaignKind::Connectivity => "n=2..3;ops=2,3;ops3=2;filter=class;budget=2000",
            CampaignKind::Rect | CampaignKind::Lifting => "n=2..3;ops=2;filter=class;budget=2000;arity=2;gens=2..3",
            CampaignKind::Q2d => "n=2..3;ops=3;ops3=2;filter=class;budget=2000;arity=2..4;gens=2..3",
        };
        text.parse().expect("built-in spec")
    }

    pub fn default_count(self) -> usize {
        match self {
            CampaignKind::Connectivity | CampaignKind::Q2d => 200,
            CampaignKind::Rect | CampaignKind::Lifting => 500,
        }
    }
}

impl fmt::Display for CampaignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CampaignKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [CampaignKind::Connectivity, CampaignKind::Rect, CampaignKind::Q2d, CampaignKind::Lifting]
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown campaign `{}`", s)))
    }
}

/// Clone cap used by campaigns unless overridden: small enough to keep random
/// instances fast, with incomplete clones rejected by the generator filter.
pub const CAMPAIGN_CLONE_CAP: usize = 4000;

const WINDOW: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct Campaign {
    pub kind: CampaignKind,
    pub seed: u64,
    pub count: usize,
    pub spec: RandomSpec,
    pub caps: Caps,
}

impl Campaign {
    pub fn new(kind: CampaignKind, seed: u64) -> Campaign {
        Campaign {
            kind,
            seed,
            count: kind.default_count(),
            spec: kind.default_spec(),
            caps: Caps { clone: CAMPAIGN_CLONE_CAP, ..Caps::default() },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub index: usize,
    pub instance: Value,
    pub verdict: Verdict,
    pub checked: usize,
    pub failures: usize,
    /// Verdicts of the individual checks, with nested parts flattened.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<(String, Verdict)>,
    /// Why the instance was inapplicable.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
    /// Full reports are kept only for failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Report>,
}

impl Outcome {
    fn new(index: usize, instance: Value, reports: Vec<Report>) -> Outcome {
        let verdict = Verdict::combine(reports.iter().map(|r| r.verdict));
        let mut parts = Vec::new();
        for r in &reports {
            if r.parts.is_empty() {
                parts.push((r.check.clone(), r.verdict));
            }
            parts.extend(r.parts.iter().map(|p| (p.check.clone(), p.verdict)));
        }
        let mut reasons: Vec<String> = Vec::new();
        if verdict == Verdict::Inapplicable {
            for r in reports.iter().flat_map(|r| std::iter::once(r).chain(&r.parts)) {
                for x in &r.reasons {
                    if !reasons.contains(x) {
                        reasons.push(x.clone());
                    }
                }
            }
        }
        let failed: Vec<Report> = reports.iter().filter(|r| r.verdict == Verdict::Fail).cloned().collect();
        Outcome {
            index,
            instance,
            verdict,
            checked: reports.iter().map(|r| r.checked).sum(),
            failures: reports.iter().map(|r| r.failures).sum(),
            parts,
            reasons,
            report: failed.into_iter().next(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub inapplicable: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub campaign: CampaignKind,
    pub seed: u64,
    pub spec: String,
    pub caps: Caps,
    pub draws: DrawStats,
    pub tally: Tally,
    pub outcomes: Vec<Outcome>,
}

impl CampaignReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::combine(self.outcomes.iter().map(|o| o.verdict))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Corpus algebras satisfying the class assumptions, with operations renamed
/// `f0, f1, ..` so that they share signatures with generated algebras.
pub fn corpus_pool(caps: &Caps) -> Result<Vec<FiniteAlgebra>> {
    let mut out = Vec::new();
    for mut a in corpus::all() {
        if passes(&a, &[Filter::Class], caps)? {
            for (i, op) in a.operations.iter_mut().enumerate() {
                op.name = format!("f{}", i);
            }
            out.push(a);
        }
    }
    Ok(out)
}

/// An algebra with the size of its ternary term clone, which bounds the cost
/// of clone enumeration for classes it belongs to.
#[derive(Clone)]
struct Entry {
    alg: FiniteAlgebra,
    clone_size: usize,
}

impl Entry {
    fn new(alg: FiniteAlgebra, caps: &Caps) -> Result<Entry> {
        let clone_size = term_ops(&alg, 3, caps.clone)?.len();
        Ok(Entry { alg, clone_size })
    }
}

/// Budget for `clone_size^max_arity` of the combined factor class.
const CLONE_WORK: f64 = 1e8;

/// A subdirect relation whose factors are `newest` and possibly one partner
/// from `pool`, with generators added until every coordinate is covered.
fn subdirect_instance(rng: &mut impl Rng, newest: &Entry, pool: &[Entry], spec: &RandomSpec, caps: &Caps) -> Result<Subpower> {
    let arity = rng.random_range(spec.arity.clone());
    let partner = pool.choose(rng).unwrap_or(newest);
    let k = newest.alg.operations.iter().map(|o| o.arity).max().unwrap_or(1) as i32;
    let work = ((newest.clone_size * partner.clone_size) as f64).powi(k);
    let choices = if partner.alg != newest.alg && work <= CLONE_WORK {
        vec![newest.alg.clone(), partner.alg.clone()]
    } else {
        vec![newest.alg.clone()]
    };
    let factors = random_factors(rng, &choices, arity);
    let k = rng.random_range(spec.gens.clone());
    let mut gens: Vec<Vec<usize>> = (0..k).map(|_| factors.iter().map(|f| rng.random_range(0..f.size)).collect()).collect();
    loop {
        let rel = subpower_generate(&factors, &gens, false, caps.tuples)?;
        let Some(c) = rel.non_subdirect_coordinate() else {
            return Ok(rel);
        };
        // Add a generator hitting a value missing from coordinate `c`.
        let present = rel.coordinate_values(c);
        let missing: Vec<usize> = (0..factors[c].size).filter(|v| !present.contains(v)).collect();
        let mut t: Vec<usize> = factors.iter().map(|f| rng.random_range(0..f.size)).collect();
        t[c] = *missing.choose(rng).expect("coordinate is not full");
        gens.push(t);
    }
}

fn relation_json(rel: &Subpower) -> Value {
    serde_json::to_value(RelationSpec::from_subpower(rel)).expect("relation serializes")
}

fn algebra_json(alg: &FiniteAlgebra) -> Value {
    serde_json::to_value(alg).expect("algebra serializes")
}

/// Runs a campaign; the report depends only on the campaign description.
pub fn run_campaign(c: &Campaign) -> Result<CampaignReport> {
    let mut stream = AlgebraStream::new(c.seed, c.spec.clone(), c.caps);
    // Recent accepted algebras; relation factors are the newest one and a
    // partner of the same signature from the corpus or the window.
    let mut window: Vec<Entry> = Vec::new();
    let pool: Vec<Entry> = match c.kind {
        CampaignKind::Connectivity => Vec::new(),
        _ => corpus_pool(&c.caps)?.into_iter().map(|a| Entry::new(a, &c.caps)).collect::<Result<_>>()?,
    };
    let mut outcomes = Vec::with_capacity(c.count);
    for index in 0..c.count {
        let alg = stream.next_algebra()?;
        let outcome = match c.kind {
            CampaignKind::Connectivity => {
                let ctx = ClassContext::for_algebra(&alg, c.caps, Mode::Exact)?;
                let r = verify_connectivity(&ctx, &ctx.base_structure(0))?;
                Outcome::new(index, algebra_json(&alg), vec![r])
            }
            _ => {
                let newest = Entry::new(alg, &c.caps)?;
                let sig = newest.alg.signature();
                let partners: Vec<Entry> = pool.iter().chain(&window).filter(|e| e.alg.signature() == sig).cloned().collect();
                let spec = stream.spec().clone();
                let rel = subdirect_instance(stream.rng(), &newest, &partners, &spec, &c.caps)?;
                window.push(newest);
                if window.len() > WINDOW {
                    window.remove(0);
                }
                let pin = if c.kind == CampaignKind::Q2d {
                    let n = rel.arity();
                    let mask = stream.rng().random_range(1u32..(1u32 << n));
                    Some((0..n).filter(|&i| mask & (1 << i) != 0).collect::<Vec<usize>>())
                } else {
                    None
                };
                let reports = relation_reports(c.kind, &rel, pin.as_deref(), &c.caps)?;
                let mut inst = relation_json(&rel);
                if let Some(p) = pin {
                    inst["pinned"] = json!(p);
                }
                Outcome::new(index, inst, reports)
            }
        };
        outcomes.push(outcome);
    }
    let mut tally = Tally::default();
    for o in &outcomes {
        match o.verdict {
            Verdict::Pass => tally.pass += 1,
            Verdict::Fail => tally.fail += 1,
            Verdict::Inapplicable => tally.inapplicable += 1,
        }
    }
    Ok(CampaignReport { campaign: c.kind, seed: c.seed, spec: c.spec.to_string(), caps: c.caps, draws: stream.stats, tally, outcomes })
}

fn relation_reports(kind: CampaignKind, rel: &Subpower, pin: Option<&[usize]>, caps: &Caps) -> Result<Vec<Report>> {
    let ctx = context_for(rel, *caps, Mode::Exact)?;
    Ok(match kind {
        CampaignKind::Rect => vec![rect_check(&ctx, rel)?, linkage_rect_check(&ctx, rel)?, umax_rect_check(&ctx, rel)?],
        CampaignKind::Q2d => vec![q2d_check(&ctx, rel, pin)?],
        CampaignKind::Lifting => {
            let fs = factor_structures(&ctx, rel)?;
            let refs: Vec<&_> = fs.iter().collect();
            let mut out = Vec::new();
            for case in [LiftingCase::ProductEdge, LiftingCase::ProductPath, LiftingCase::ProductMaximal, LiftingCase::AsProduct] {
                out.push(verify_lifting(&ctx, case, LiftingInput::Product { factors: &refs, relation: rel })?);
            }
            out
        }
        CampaignKind::Connectivity => unreachable!("algebra campaign"),
    })
}

/// The quotient lifting statements for every congruence of every corpus algebra.
pub fn corpus_quotient_lifting(caps: &Caps) -> Result<Vec<(String, Report)>> {
    let mut out = Vec::new();
    for alg in corpus::all() {
        let ctx = ClassContext::for_algebra(&alg, *caps, Mode::Exact)?;
        let base = ctx.base_structure(0);
        for theta in all_congruences(&alg, caps.lattice)? {
            for case in [LiftingCase::QuotientEdge, LiftingCase::QuotientPath, LiftingCase::QuotientMaximal] {
                let r = verify_lifting(&ctx, case, LiftingInput::Quotient { algebra: &base, theta: &theta })?;
                out.push((format!("{} θ={:?} {}", alg.name, theta.block_ids(), case), r));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: CampaignKind, seed: u64, count: usize) -> CampaignReport {
        let mut c = Campaign::new(kind, seed);
        c.count = count;
        run_campaign(&c).unwrap()
    }

    #[test]
    fn campaigns_are_reproducible() {
        for kind in [CampaignKind::Connectivity, CampaignKind::Rect, CampaignKind::Q2d, CampaignKind::Lifting] {
            let a = small(kind, 5, 3).to_json();
            let b = small(kind, 5, 3).to_json();
            assert_eq!(a, b, "{}", kind);
        }
    }

    #[test]
    fn small_campaigns_do_not_fail() {
        for kind in [CampaignKind::Connectivity, CampaignKind::Rect, CampaignKind::Q2d, CampaignKind::Lifting] {
            let r = small(kind, 1, 4);
            assert_eq!(r.tally.fail, 0, "{}: {}", kind, r.to_json());
        }
    }

    #[test]
    fn corpus_pool_is_renamed() {
        let pool = corpus_pool(&Caps::default()).unwrap();
        let names: Vec<&str> = pool.iter().map(|a| a.name.as_str()).collect();
        for n in ["s2", "m2", "z2", "c3"] {
            assert!(names.contains(&n), "{:?}", names);
        }
        assert!(!names.contains(&"proj2"));
        assert!(pool.iter().all(|a| a.operations[0].name == "f0"));
    }
}
