use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alggraph::caps::Caps;
use alggraph::campaign::{run_campaign, Campaign, CampaignKind};
use alggraph::closure::Subpower;
use alggraph::context::{ClassContext, Mode};
use alggraph::edges::analyze_edges;
use alggraph::product::{check_relation, context_for, corpus_relations, quasi_majority, RelationSpec};
use alggraph::random::{random_relation, AlgebraStream, RandomSpec};
use alggraph::report::{class_hypotheses, Report};
use alggraph::thin::Kinds;
use alggraph::verify::{analyze, graph_of, verify_connectivity, LiftingCase};
use alggraph::{corpus, FiniteAlgebra};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_ERROR: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(name = "alggraph", version, about = "Edge-colored graphs of finite idempotent algebras")]
struct Cli {
    /// Maximum number of term operations enumerated per arity.
    #[arg(long, global = true)]
    cap_clone: Option<usize>,
    /// Maximum number of tuples in a subpower.
    #[arg(long, global = true)]
    cap_tuples: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Witness,
}

#[derive(Subcommand)]
enum Command {
    /// Edges, thin edges and components of an algebra.
    Analyze { file: PathBuf },
    /// Edge records of an algebra.
    Edges { file: PathBuf },
    /// Thin-edge graph of an algebra, as JSON or DOT.
    Graph {
        file: PathBuf,
        /// Write DOT to this path (`-` for stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check a statement on an algebra or relation file.
    Verify {
        #[arg(value_enum)]
        check: Check,
        file: PathBuf,
        /// Pinned coordinates for q2d, comma separated.
        #[arg(long, value_delimiter = ',')]
        pin: Option<Vec<usize>>,
        /// A single lifting case; all product cases by default.
        #[arg(long)]
        case: Option<String>,
    },
    /// Generated algebras, or relations over them.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "n=2..3;ops=2")]
        spec: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Emit relations over each generated algebra instead.
        #[arg(long)]
        relations: bool,
    },
    /// A seeded verification campaign.
    Campaign {
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        spec: Option<String>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Write the built-in algebras to DIR/corpus and relations to DIR/rel.
    Corpus {
        #[arg(default_value = ".")]
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Connectivity,
    Rect,
    Q2d,
    Qmaj,
    AlmostTrivial,
    Lifting,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Connectivity,
    Rect,
    Q2d,
    Lifting,
}

enum Failure {
    Usage(String),
    Io(String),
    Error(String),
}

impl From<alggraph::Error> for Failure {
    fn from(e: alggraph::Error) -> Self {
        Failure::Error(e.to_string())
    }
}

type Run<T> = Result<T, Failure>;

struct Env {
    caps: Caps,
    mode: Mode,
    json: Option<PathBuf>,
}

impl Env {
    fn emit(&self, value: &Value) -> Run<()> {
        let text = serde_json::to_string_pretty(value).expect("json value") + "\n";
        match &self.json {
            Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {}", p.display(), e))),
            None => {
                print!("{}", text);
                Ok(())
            }
        }
    }

    fn report(&self, r: &Report) -> Run<u8> {
        self.emit(&serde_json::to_value(r).expect("report serializes"))?;
        Ok(r.verdict.exit_code() as u8)
    }
}

fn read(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {}", path.display(), e)))
}

fn load_algebra(path: &Path) -> Run<FiniteAlgebra> {
    Ok(FiniteAlgebra::from_json(&read(path)?)?)
}

fn load_relation(path: &Path, caps: &Caps) -> Run<Subpower> {
    let spec = RelationSpec::from_json(&read(path)?)?;
    if spec.arity > caps.coords {
        return Err(Failure::Error(format!("relation has {} coordinates, cap is {}", spec.arity, caps.coords)));
    }
    Ok(spec.build(caps.tuples)?)
}

fn write(path: &Path, text: &str) -> Run<()> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {}", path.display(), e)))
}

fn caps_from(cli: &Cli) -> Run<Caps> {
    let mut caps = Caps::default();
    if let Ok(spec) = std::env::var("ALGGRAPH_CAPS") {
        caps = caps.with_overrides(&spec).map_err(|e| Failure::Usage(format!("ALGGRAPH_CAPS: {}", e)))?;
    }
    if let Some(c) = cli.cap_clone {
        caps.clone = c;
    }
    if let Some(t) = cli.cap_tuples {
        caps.tuples = t;
    }
    Ok(caps)
}

fn verify(env: &Env, check: Check, file: &Path, pin: Option<&[usize]>, case: Option<&str>) -> Run<u8> {
    match check {
        Check::Connectivity => {
            let alg = load_algebra(file)?;
            let ctx = ClassContext::for_algebra(&alg, env.caps, env.mode)?;
            env.report(&verify_connectivity(&ctx, &ctx.base_structure(0))?)
        }
        Check::Qmaj => {
            let alg = load_algebra(file)?;
            let ctx = ClassContext::for_algebra(&alg, env.caps, env.mode)?;
            let reasons = class_hypotheses(&ctx);
            if !reasons.is_empty() {
                return env.report(&Report::inapplicable("quasi-majority", reasons));
            }
            let q = quasi_majority(&ctx)?;
            env.emit(&serde_json::to_value(&q).expect("serializes"))?;
            Ok(q.report.verdict.exit_code() as u8)
        }
        Check::Rect | Check::Q2d | Check::AlmostTrivial | Check::Lifting => {
            let rel = load_relation(file, &env.caps)?;
            let ctx = context_for(&rel, env.caps, env.mode)?;
            let case = match case {
                Some(c) => Some(c.parse::<LiftingCase>().map_err(|e| Failure::Usage(e.to_string()))?),
                None => None,
            };
            let name = match check {
                Check::Rect => "rect",
                Check::Q2d => "q2d",
                Check::AlmostTrivial => "almost-trivial",
                _ => "lifting",
            };
            if case.is_some_and(|c| c.is_quotient()) {
                return Err(Failure::Usage(format!("{} needs an algebra and a congruence, not a relation", case.unwrap())));
            }
            env.report(&check_relation(&ctx, &rel, name, pin, case)?)
        }
    }
}

fn run(cli: Cli) -> Run<u8> {
    let env = Env {
        caps: caps_from(&cli)?,
        mode: match cli.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Witness => Mode::Witness,
        },
        json: cli.json.clone(),
    };
    match &cli.command {
        Command::Analyze { file } => {
            let alg = load_algebra(file)?;
            let ctx = ClassContext::for_algebra(&alg, env.caps, env.mode)?;
            env.emit(&analyze(&ctx, &ctx.base_structure(0))?)?;
            Ok(0)
        }
        Command::Edges { file } => {
            let alg = load_algebra(file)?;
            let an = analyze_edges(&alg, &env.caps)?;
            env.emit(&serde_json::to_value(&an.edges).expect("edges serialize"))?;
            Ok(0)
        }
        Command::Graph { file, dot } => {
            let alg = load_algebra(file)?;
            let ctx = ClassContext::for_algebra(&alg, env.caps, env.mode)?;
            let s = ctx.base_structure(0);
            let g = graph_of(&ctx, &s, Kinds::ALL)?;
            match dot {
                Some(p) if p.as_os_str() == "-" => print!("{}", g.to_dot(s.name(), &s.labels)),
                Some(p) => write(p, &g.to_dot(s.name(), &s.labels))?,
                None => env.emit(&serde_json::to_value(&g).expect("graph serializes"))?,
            }
            Ok(0)
        }
        Command::Verify { check, file, pin, case } => verify(&env, *check, file, pin.as_deref(), case.as_deref()),
        Command::Random { seed, spec, count, relations } => {
            let spec: RandomSpec = spec.parse().map_err(|e: alggraph::Error| Failure::Usage(e.to_string()))?;
            let mut stream = AlgebraStream::new(*seed, spec, env.caps);
            let mut out = Vec::with_capacity(*count);
            for _ in 0..*count {
                let alg = stream.next_algebra()?;
                if *relations {
                    let spec = stream.spec().clone();
                    let rel = random_relation(stream.rng(), &[alg], &spec, env.caps.tuples)?;
                    out.push(serde_json::to_value(RelationSpec::from_subpower(&rel)).expect("serializes"));
                } else {
                    out.push(serde_json::to_value(&alg).expect("serializes"));
                }
            }
            env.emit(&json!({"seed": seed, "spec": stream.spec().to_string(), "draws": stream.stats, "instances": out}))?;
            Ok(0)
        }
        Command::Campaign { kind, seed, spec, count } => {
            let kind = match kind {
                KindArg::Connectivity => CampaignKind::Connectivity,
                KindArg::Rect => CampaignKind::Rect,
                KindArg::Q2d => CampaignKind::Q2d,
                KindArg::Lifting => CampaignKind::Lifting,
            };
            let mut c = Campaign::new(kind, *seed);
            if let Some(s) = spec {
                c.spec = s.parse().map_err(|e: alggraph::Error| Failure::Usage(e.to_string()))?;
            }
            if let Some(n) = count {
                c.count = *n;
            }
            if cli.cap_clone.is_some() || cli.cap_tuples.is_some() || std::env::var_os("ALGGRAPH_CAPS").is_some() {
                c.caps = env.caps;
            }
            let r = run_campaign(&c)?;
            env.emit(&serde_json::to_value(&r).expect("serializes"))?;
            Ok(r.verdict().exit_code() as u8)
        }
        Command::Corpus { dir } => {
            let algs = dir.join("corpus");
            let rels = dir.join("rel");
            for d in [&algs, &rels] {
                fs::create_dir_all(d).map_err(|e| Failure::Io(format!("{}: {}", d.display(), e)))?;
            }
            let mut written = Vec::new();
            for a in corpus::all() {
                let p = algs.join(format!("{}.json", a.name));
                write(&p, &(a.to_json() + "\n"))?;
                written.push(p.display().to_string());
            }
            for (name, spec) in corpus_relations() {
                let p = rels.join(format!("{}.json", name));
                write(&p, &(serde_json::to_string_pretty(&spec).expect("serializes") + "\n"))?;
                written.push(p.display().to_string());
            }
            env.emit(&json!({"written": written}))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Io(m) => (EXIT_IO, m),
                Failure::Error(m) => (EXIT_ERROR, m),
            };
            eprintln!("alggraph: {}", msg);
            ExitCode::from(code)
        }
    }
}
