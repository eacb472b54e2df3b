//! End-to-end acceptance suite. Runs every criterion in sequence, prints one
//! line per criterion, and fails at the end if any criterion failed.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use alggraph::campaign::{corpus_quotient_lifting, run_campaign, Campaign, CampaignKind, CampaignReport};
use alggraph::caps::Caps;
use alggraph::congruence::cg;
use alggraph::context::{ClassContext, Mode};
use alggraph::corpus;
use alggraph::edges::{classify_pair, EdgeType};
use alggraph::product::quasi_majority;
use alggraph::report::Verdict;
use alggraph::{sg_closure, subpower_generate, FiniteAlgebra};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;
const ORACLE_INSTANCES: usize = 1000;

// Time limits per criterion.
const LIMIT_CLASSIFY: Duration = Duration::from_secs(1);
const LIMIT_ORACLES: Duration = Duration::from_secs(60);
const LIMIT_CONNECTIVITY: Duration = Duration::from_secs(600);
const LIMIT_RECT: Duration = Duration::from_secs(600);
const LIMIT_Q2D: Duration = Duration::from_secs(900);
const LIMIT_QMAJ: Duration = Duration::from_secs(120);
const LIMIT_LIFTING: Duration = Duration::from_secs(900);
const LIMIT_REPRO: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;

fn classification() -> Outcome {
    let caps = Caps::default();
    let cases = [
        (corpus::semilattice2(), EdgeType::Semilattice),
        (corpus::majority2(), EdgeType::Majority),
        (corpus::affine2(), EdgeType::Affine),
        (corpus::projection2(), EdgeType::Unary),
    ];
    for (alg, want) in cases {
        let got = classify_pair(&alg, 0, 1, &caps).map_err(|e| e.to_string())?.resolved;
        if got != want {
            return Err(format!("{}: expected {:?}, got {:?}", alg.name, want, got));
        }
    }
    Ok("s2/m2/z2/proj2 classified semilattice/majority/affine/unary".into())
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = Vec::new();
    for i in 0..ORACLE_INSTANCES {
        let size = rng.random_range(2..=4);
        let count = rng.random_range(1..=2);
        let arities: Vec<usize> = (0..count).map(|_| rng.random_range(1..=3)).collect();
        let alg = common::random_algebra(&mut rng, size, &arities);

        let seed: Vec<usize> = (0..rng.random_range(1..=2)).map(|_| rng.random_range(0..size)).collect();
        let sg: BTreeSet<usize> = sg_closure(&alg, &seed).map_err(|e| e.to_string())?.elements().into_iter().collect();
        if sg != common::naive_sg(&alg, &seed) {
            mismatches.push(format!("instance {}: sg", i));
        }

        let pairs: Vec<(usize, usize)> = (0..rng.random_range(0..=2)).map(|_| (rng.random_range(0..size), rng.random_range(0..size))).collect();
        let p = cg(&alg, &pairs);
        let oracle = common::naive_cg(&alg, &pairs);
        if (0..size).any(|x| (0..size).any(|y| (p.block_of(x) == p.block_of(y)) != oracle[x][y])) {
            mismatches.push(format!("instance {}: cg", i));
        }

        let arity = rng.random_range(1..=3);
        let factors = vec![alg.clone(); arity];
        let gens: Vec<Vec<usize>> = (0..rng.random_range(1..=3)).map(|_| (0..arity).map(|_| rng.random_range(0..size)).collect()).collect();
        let rel = subpower_generate(&factors, &gens, false, 1_000_000).map_err(|e| e.to_string())?;
        let ours: BTreeSet<Vec<usize>> = rel.tuples().cloned().collect();
        if ours != common::naive_subpower(&factors, &gens) {
            mismatches.push(format!("instance {}: subpower", i));
        }
    }
    if mismatches.is_empty() {
        Ok(format!("{} instances, 0 mismatches", ORACLE_INSTANCES))
    } else {
        Err(format!("{} mismatches, first: {:?}", mismatches.len(), &mismatches[..mismatches.len().min(5)]))
    }
}

fn campaign(kind: CampaignKind) -> Result<CampaignReport, String> {
    run_campaign(&Campaign::new(kind, SEED)).map_err(|e| e.to_string())
}

fn judge(r: &CampaignReport, min_applicable: usize) -> Outcome {
    let applicable = r.tally.pass + r.tally.fail;
    if r.tally.fail > 0 {
        let first = r.outcomes.iter().find(|o| o.verdict == Verdict::Fail).map(|o| o.index);
        return Err(format!("{} failures (first at instance {:?})", r.tally.fail, first));
    }
    if applicable < min_applicable {
        return Err(format!("only {} applicable instances", applicable));
    }
    Ok(format!("{} pass, {} inapplicable, {} draws", r.tally.pass, r.tally.inapplicable, r.draws.tried))
}

fn connectivity() -> Outcome {
    judge(&campaign(CampaignKind::Connectivity)?, 200)
}

fn rectangularity() -> Outcome {
    judge(&campaign(CampaignKind::Rect)?, 500)
}

fn q2d() -> Outcome {
    let r = campaign(CampaignKind::Q2d)?;
    let summary = judge(&r, 200)?;
    let mut checked = 0;
    for o in &r.outcomes {
        for (name, v) in &o.parts {
            if name == "q2d/two-decomposable" {
                if *v == Verdict::Fail {
                    return Err(format!("two-decomposability fails at instance {}", o.index));
                }
                checked += (*v == Verdict::Pass) as usize;
            }
        }
    }
    if checked == 0 {
        return Err("no instance had a majority term".into());
    }
    Ok(format!("{}; {} two-decomposability cross-checks", summary, checked))
}

/// Forward as-reachability sets on the base algebra, derived by hand.
fn hand_ft(name: &str) -> Vec<Vec<usize>> {
    match name {
        "s2" => vec![vec![0, 1], vec![1]],
        "m2" => vec![vec![0], vec![1]],
        "z2" => vec![vec![0, 1], vec![0, 1]],
        "c3" => vec![vec![0, 1, 2], vec![1, 2], vec![2]],
        other => panic!("no hand-derived sets for {}", other),
    }
}

fn quasi_majority_terms() -> Outcome {
    let caps = Caps::default();
    let mut terms = Vec::new();
    for alg in [corpus::semilattice2(), corpus::majority2(), corpus::affine2(), corpus::chain3()] {
        let run = |a: &FiniteAlgebra| -> Result<_, String> {
            let ctx = ClassContext::for_algebra(a, caps, Mode::Exact).map_err(|e| e.to_string())?;
            quasi_majority(&ctx).map_err(|e| e.to_string())
        };
        let q = run(&alg)?;
        if q.report.verdict != Verdict::Pass {
            return Err(format!("{}: internal check {:?}", alg.name, q.report.verdict));
        }
        let again = run(&alg)?;
        if again.term != q.term || again.tables != q.tables {
            return Err(format!("{}: extraction is not deterministic", alg.name));
        }
        let table = &q.tables.iter().find(|t| t.member == alg.name).ok_or(format!("{}: no base table", alg.name))?.table;
        let ft = hand_ft(&alg.name);
        for a in 0..alg.size {
            for b in (0..alg.size).filter(|&b| b != a) {
                for args in [[a, a, b], [a, b, a], [b, a, a]] {
                    let v = table.apply(alg.size, &args);
                    if !ft[a].contains(&v) {
                        return Err(format!("{}: t{:?} = {} outside Ft({})", alg.name, args, v, a));
                    }
                }
            }
        }
        terms.push(format!("{}: {}", alg.name, q.term));
    }
    Ok(terms.join("; "))
}

fn lifting() -> Outcome {
    let quotients = corpus_quotient_lifting(&Caps::default()).map_err(|e| e.to_string())?;
    if let Some((name, _)) = quotients.iter().find(|(_, r)| r.verdict == Verdict::Fail) {
        return Err(format!("quotient lifting fails: {}", name));
    }
    let applied = quotients.iter().filter(|(_, r)| r.verdict == Verdict::Pass).count();
    let r = campaign(CampaignKind::Lifting)?;
    let summary = judge(&r, 500)?;
    Ok(format!("{} corpus quotient checks pass ({} inapplicable); products: {}", applied, quotients.len() - applied, summary))
}

fn reproducibility() -> Outcome {
    for kind in [CampaignKind::Connectivity, CampaignKind::Rect, CampaignKind::Q2d, CampaignKind::Lifting] {
        let run = || {
            let mut c = Campaign::new(kind, SEED + 1);
            c.count = 25;
            run_campaign(&c).map(|r| r.to_json()).map_err(|e| e.to_string())
        };
        if run()? != run()? {
            return Err(format!("{} campaign differs between runs", kind));
        }
    }
    Ok("connectivity, rect, q2d and lifting reports byte-identical".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("two-element classification", LIMIT_CLASSIFY, classification),
        ("closure oracle equivalence", LIMIT_ORACLES, oracle_agreement),
        ("connectivity campaign", LIMIT_CONNECTIVITY, connectivity),
        ("rectangularity campaign", LIMIT_RECT, rectangularity),
        ("quasi-2-decomposability campaign", LIMIT_Q2D, q2d),
        ("quasi-majority terms", LIMIT_QMAJ, quasi_majority_terms),
        ("lifting suite", LIMIT_LIFTING, lifting),
        ("reproducibility", LIMIT_REPRO, reproducibility),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let verdict = match &result {
            Ok(_) if took <= *limit => "PASS",
            _ => "FAIL",
        };
        let detail = match &result {
            Ok(s) if took <= *limit => s.clone(),
            Ok(s) => format!("{} (over the time limit)", s),
            Err(e) => e.clone(),
        };
        println!("criterion {} [{}] {}: {:.2}s (limit {}s) {}", i + 1, verdict, name, took.as_secs_f64(), limit.as_secs(), detail);
        if verdict == "FAIL" {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {:?}", failed);
}
