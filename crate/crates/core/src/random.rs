//! Seeded generation of random idempotent algebras and subpowers.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{FiniteAlgebra, OpTable};
use crate::caps::Caps;
use crate::clone::term_ops;
use crate::closure::{subpower_generate, Subpower};
use crate::context::{ClassContext, Mode};
use crate::edges::analyze_edges;
use crate::error::{Error, Result};
use crate::report::class_hypotheses;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    Smooth,
    /// No edge of unary type.
    Omits1,
    /// Binary and ternary term clones complete within the clone cap.
    Clone,
    /// Every member of HS(A) smooth and free of unary edges, clone complete.
    Class,
}

impl Filter {
    fn as_str(self) -> &'static str {
        match self {
            Filter::Smooth => "smooth",
            Filter::Omits1 => "omits1",
            Filter::Clone => "clone",
            Filter::Class => "class",
        }
    }
}

/// A generator description such as `n=2..3;ops=2,3;filter=smooth,omits1`.
///
/// Keys: `n` (universe size range), `ops` (one basic operation per listed arity),
/// `ops3` (arities used instead when the size is at least 3), `filter`,
/// `budget` (draws per accepted algebra), `arity` and `gens` (subpower shape).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandomSpec {
    pub sizes: RangeInclusive<usize>,
    pub ops: Vec<usize>,
    pub ops_large: Option<Vec<usize>>,
    pub filters: Vec<Filter>,
    pub budget: usize,
    pub arity: RangeInclusive<usize>,
    pub gens: RangeInclusive<usize>,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { sizes: 2..=3, ops: vec![2], ops_large: None, filters: Vec::new(), budget: 10_000, arity: 2..=2, gens: 1..=3 }
    }
}

fn parse_range(key: &str, v: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::InvalidArgument(format!("`{}` needs N or N..M, got `{}`", key, v));
    let (lo, hi) = match v.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let x = v.trim().parse().map_err(|_| bad())?;
            (x, x)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .ok()
                .filter(|&k| (1..=4).contains(&k))
                .ok_or_else(|| Error::InvalidArgument(format!("`{}` needs arities between 1 and 4, got `{}`", key, x)))
        })
        .collect()
}

impl FromStr for RandomSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = RandomSpec::default();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("spec item `{}` is not key=value", part)))?;
            match k.trim() {
                "n" => spec.sizes = parse_range("n", v)?,
                "ops" => spec.ops = parse_list("ops", v)?,
                "ops3" => spec.ops_large = Some(parse_list("ops3", v)?),
                "filter" => {
                    spec.filters = v
                        .split(',')
                        .map(str::trim)
                        .filter(|f| !f.is_empty() && *f != "none" && *f != "idempotent")
                        .map(|f| match f {
                            "smooth" => Ok(Filter::Smooth),
                            "omits1" | "omits-type-1" => Ok(Filter::Omits1),
                            "clone" => Ok(Filter::Clone),
                            "class" => Ok(Filter::Class),
                            other => Err(Error::InvalidArgument(format!("unknown filter `{}`", other))),
                        })
                        .collect::<Result<_>>()?
                }
                "budget" => {
                    spec.budget = v.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad budget `{}`", v)))?
                }
                "arity" => spec.arity = parse_range("arity", v)?,
                "gens" => spec.gens = parse_range("gens", v)?,
                other => return Err(Error::InvalidArgument(format!("unknown spec key `{}`", other))),
            }
        }
        if spec.ops.is_empty() {
            return Err(Error::InvalidArgument("spec needs at least one operation".into()));
        }
        Ok(spec)
    }
}

impl fmt::Display for RandomSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "n={}..{};ops={}", self.sizes.start(), self.sizes.end(), list(&self.ops))?;
        if let Some(o) = &self.ops_large {
            write!(f, ";ops3={}", list(o))?;
        }
        if !self.filters.is_empty() {
            let names: Vec<&str> = self.filters.iter().map(|x| x.as_str()).collect();
            write!(f, ";filter={}", names.join(","))?;
        }
        write!(
            f,
            ";budget={};arity={}..{};gens={}..{}",
            self.budget,
            self.arity.start(),
            self.arity.end(),
            self.gens.start(),
            self.gens.end()
        )
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random idempotent table: diagonal entries forced, others free.
pub fn random_table(rng: &mut impl Rng, name: &str, arity: usize, n: usize) -> OpTable {
    OpTable::from_fn(name, arity, n, |args| {
        if args.iter().all(|&x| x == args[0]) {
            args[0]
        } else {
            rng.random_range(0..n)
        }
    })
}

pub fn random_algebra(rng: &mut impl Rng, spec: &RandomSpec, name: &str) -> FiniteAlgebra {
    let n = rng.random_range(spec.sizes.clone());
    let arities = match &spec.ops_large {
        Some(large) if n >= 3 => large,
        _ => &spec.ops,
    };
    let ops = arities.iter().enumerate().map(|(i, &k)| random_table(rng, &format!("f{}", i), k, n)).collect();
    FiniteAlgebra::new(name, n, ops).expect("generated tables are idempotent and well formed")
}

/// Whether an algebra passes every filter.
pub fn passes(alg: &FiniteAlgebra, filters: &[Filter], caps: &Caps) -> Result<bool> {
    for f in filters {
        let ok = match f {
            Filter::Smooth | Filter::Omits1 => {
                let an = analyze_edges(alg, caps)?;
                if *f == Filter::Smooth { an.smooth.smooth } else { an.omits_type1 }
            }
            Filter::Clone => term_ops(alg, 2, caps.clone)?.is_complete() && term_ops(alg, 3, caps.clone)?.is_complete(),
            Filter::Class => {
                if !(term_ops(alg, 2, caps.clone)?.is_complete() && term_ops(alg, 3, caps.clone)?.is_complete()) {
                    false
                } else {
                    class_hypotheses(&ClassContext::for_algebra(alg, *caps, Mode::Exact)?).is_empty()
                }
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DrawStats {
    pub accepted: usize,
    pub tried: usize,
}

/// A deterministic stream of filtered random algebras.
pub struct AlgebraStream {
    rng: ChaCha8Rng,
    spec: RandomSpec,
    caps: Caps,
    pub stats: DrawStats,
}

impl AlgebraStream {
    pub fn new(seed: u64, spec: RandomSpec, caps: Caps) -> AlgebraStream {
        AlgebraStream { rng: rng_from_seed(seed), spec, caps, stats: DrawStats { accepted: 0, tried: 0 } }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn spec(&self) -> &RandomSpec {
        &self.spec
    }

    /// The next accepted algebra, or `FilterStarvation` after `budget` rejected draws.
    pub fn next_algebra(&mut self) -> Result<FiniteAlgebra> {
        for _ in 0..self.spec.budget {
            self.stats.tried += 1;
            let name = format!("r{}", self.stats.tried);
            let alg = random_algebra(&mut self.rng, &self.spec, &name);
            if passes(&alg, &self.spec.filters, &self.caps)? {
                self.stats.accepted += 1;
                return Ok(alg);
            }
        }
        Err(Error::FilterStarvation { accepted: self.stats.accepted, tried: self.stats.tried })
    }
}

/// A subpower of the given factors generated by random tuples.
pub fn random_subpower(rng: &mut impl Rng, factors: &[FiniteAlgebra], gens: RangeInclusive<usize>, cap: usize) -> Result<Subpower> {
    let k = rng.random_range(gens);
    let generators: Vec<Vec<usize>> = (0..k).map(|_| factors.iter().map(|f| rng.random_range(0..f.size)).collect()).collect();
    subpower_generate(factors, &generators, false, cap)
}

/// A relation of arity drawn from `spec.arity` over factors chosen from `pool`.
pub fn random_relation(rng: &mut impl Rng, pool: &[FiniteAlgebra], spec: &RandomSpec, cap: usize) -> Result<Subpower> {
    let arity = rng.random_range(spec.arity.clone());
    let factors = random_factors(rng, pool, arity);
    random_subpower(rng, &factors, spec.gens.clone(), cap)
}

/// Picks `arity` factors from a pool.
pub fn random_factors(rng: &mut impl Rng, pool: &[FiniteAlgebra], arity: usize) -> Vec<FiniteAlgebra> {
    (0..arity).map(|_| pool.choose(rng).expect("nonempty pool").clone()).collect()
}
