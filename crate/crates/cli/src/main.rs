use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use heyting_lab::amalgam::{complete_superamalgam, finite_subset_independence, CompletionOptions, IndepMode};
use heyting_lab::format::{
    parse, poset_dot, AlgebraDoc, AmalgamDoc, CatalogDoc, ChainDoc, PosetDoc, TreeDoc,
};
use heyting_lab::group::{eppa_refute, wei_demo, EppaVerdict};
use heyting_lab::heyting::{dual_poset, enumerate_embeddings};
use heyting_lab::limit::{build_chain, split_nested, swap_witness, trans_tree, DEFAULT_SWAP_BUDGET};
use heyting_lab::poset::{enumerate_posets, FinitePoset, DEFAULT_POSET_BOUND};
use heyting_lab::suite::{check_suite, eppa_fixtures, six_element_completion, Level, SuiteOptions};
use heyting_lab::{HeytingAlgebra, PointSet};

/// Finite Heyting algebras, their dual posets, amalgams and the finite
/// stages of their homogeneous limit.
#[derive(Parser, Debug)]
#[command(name = "heyting-lab", version)]
struct Cli {
    /// Seed for tie-breaking among equally ranked catalog items.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Reading of the interpolation condition.
    #[arg(long, global = true, default_value = "conjunction")]
    indep_mode: IndepMode,
    /// Write the artifact here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Finite posets.
    #[command(subcommand)]
    Posets(PosetsCmd),
    /// Single algebras.
    #[command(subcommand)]
    Ha(HaCmd),
    /// Complete a lower amalgam document.
    Amalgamate(AmalgamateArgs),
    /// Independence of element sets.
    #[command(subcommand)]
    Indep(IndepCmd),
    /// Chains of stages.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Demonstrators.
    #[command(subcommand)]
    Demo(DemoCmd),
    /// Run the invariant suite.
    Check(CheckArgs),
    /// Graph export.
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Subcommand, Debug)]
enum PosetsCmd {
    /// One poset per isomorphism class, up to a size.
    Enum {
        #[arg(long, default_value_t = 5)]
        max: usize,
    },
}

#[derive(Subcommand, Debug)]
enum HaCmd {
    /// Dual poset of prime filters.
    Dual {
        #[arg(long)]
        input: PathBuf,
    },
    /// All embeddings of one algebra into another.
    Embed {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        into: PathBuf,
    },
}

#[derive(Args, Debug)]
struct AmalgamateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Largest dual tried by the fallback search.
    #[arg(long)]
    fallback_bound: Option<usize>,
    /// Skip the pullback and search catalog duals directly.
    #[arg(long)]
    force_fallback: bool,
}

#[derive(Subcommand, Debug)]
enum IndepCmd {
    /// `{"algebra": …, "left": […], "base": […], "right": […]}`, element sets
    /// given as lists of dual points.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Exit with status 1 unless the sets are independent.
        #[arg(long)]
        require: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ChainCmd {
    /// Stages linked by embeddings, each extending the last over catalog pairs.
    Build {
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 2)]
        catalog_bound: usize,
    },
}

#[derive(Subcommand, Debug)]
enum DemoCmd {
    /// Binary tree of partial isomorphisms over the 4-chain.
    Tree {
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Nested splits of an up-set.
    Split {
        /// Poset document for the stage dual; the 2-chain when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Points of the up-set; the whole dual when omitted.
        #[arg(long, value_delimiter = ',')]
        upset: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
    },
    /// Automorphism exchanging an up-set with an independent copy.
    Swap {
        #[arg(long, default_value = "six")]
        fixture: SwapFixture,
        #[arg(long, default_value_t = DEFAULT_SWAP_BUDGET)]
        budget: usize,
    },
    /// Extension of partial automorphisms to finite algebras.
    Eppa {
        #[arg(long, default_value_t = 6)]
        bound: usize,
        /// `shift` (a to b in the 4-chain) or `transposition` (two atoms).
        #[arg(long, default_value = "shift")]
        fixture: EppaFixture,
    },
    /// Orbits and stabilizers in the 8-element Boolean algebra.
    Wei,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum SwapFixture {
    Six,
    Grid,
    Chain,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum EppaFixture {
    Shift,
    Transposition,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, default_value = "quick")]
    level: Level,
    /// Add the non-skeletal fixture to the skeletal check.
    #[arg(long)]
    inject_fault: bool,
    /// Emit the report as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum ExportCmd {
    /// DOT of a poset, algebra (given by its dual) or chain document.
    Dot {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Maxima for numeric bounds, overridable from the environment.
struct Limits {
    posets: usize,
    steps: usize,
    depth: usize,
    eppa: usize,
}

impl Limits {
    fn from_env() -> anyhow::Result<Self> {
        let get = |name: &str, default: usize| -> anyhow::Result<usize> {
            match std::env::var(name) {
                Ok(v) => v.parse().with_context(|| format!("{name} must be a number")),
                Err(_) => Ok(default),
            }
        };
        Ok(Limits {
            posets: get("HEYTING_LAB_MAX_POSETS", DEFAULT_POSET_BOUND)?,
            steps: get("HEYTING_LAB_MAX_STEPS", 64)?,
            depth: get("HEYTING_LAB_MAX_DEPTH", 4)?,
            eppa: get("HEYTING_LAB_MAX_EPPA", 6)?,
        })
    }
}

/// Failures that map to exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn within(what: &str, value: usize, max: usize) -> anyhow::Result<()> {
    if value > max {
        return Err(usage(format!("{what} = {value} exceeds the maximum {max}")));
    }
    Ok(())
}

fn read_doc<T: for<'de> serde::Deserialize<'de>>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, what).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_algebra(path: &Path) -> anyhow::Result<Arc<HeytingAlgebra>> {
    read_doc::<AlgebraDoc>(path, "algebra")?
        .to_algebra()
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes next to the destination and renames, so a failed run leaves no
/// partial file behind.
fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let tmp = dir.join(format!(
                ".{}.tmp{}",
                path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
                std::process::id()
            ));
            fs::write(&tmp, text).with_context(|| format!("cannot write {}", tmp.display()))?;
            fs::rename(&tmp, path).with_context(|| format!("cannot move output to {}", path.display()))?;
            Ok(())
        }
    }
}

/// The artifact and whether every verification it carries passed.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, ok: true }
    }
}

#[derive(serde::Deserialize)]
struct IndepDoc {
    algebra: AlgebraDoc,
    left: Vec<Vec<usize>>,
    base: Vec<Vec<usize>>,
    right: Vec<Vec<usize>>,
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let limits = Limits::from_env()?;
    let mode = cli.indep_mode;
    Ok(match &cli.command {
        Command::Posets(PosetsCmd::Enum { max }) => {
            if *max == 0 {
                return Err(usage("--max must be at least 1"));
            }
            within("--max", *max, limits.posets)?;
            let catalog = enumerate_posets(*max, limits.posets)?;
            Outcome::ok(to_json(&CatalogDoc::from_catalog(&catalog))?)
        }
        Command::Ha(HaCmd::Dual { input }) => {
            let a = read_algebra(input)?;
            Outcome::ok(to_json(&PosetDoc::from_poset(&dual_poset(&a)))?)
        }
        Command::Ha(HaCmd::Embed { from, into }) => {
            let (b, a) = (read_algebra(from)?, read_algebra(into)?);
            let maps: Vec<_> = enumerate_embeddings(&b, &a)
                .iter()
                .map(|e| json!({ "elements": e.element_table(), "dual": e.dual() }))
                .collect();
            Outcome::ok(to_json(&json!({ "count": maps.len(), "embeddings": maps }))?)
        }
        Command::Amalgamate(args) => {
            let d = read_doc::<AmalgamDoc>(&args.input, "amalgam")?
                .to_amalgam()
                .map_err(|e| usage(format!("{}: {e}", args.input.display())))?;
            let mut opts = CompletionOptions { mode, force_fallback: args.force_fallback, ..Default::default() };
            if let Some(b) = args.fallback_bound {
                within("--fallback-bound", b, limits.posets)?;
                opts.fallback_bound = b;
            }
            let c = complete_superamalgam(&d, &opts)?;
            let ok = c.certificate().all_true();
            let doc = json!({
                "dual": PosetDoc::from_poset(c.algebra().dual()),
                "summary": c.summary(),
            });
            Outcome { text: to_json(&doc)?, ok }
        }
        Command::Indep(IndepCmd::Check { input, require }) => {
            let doc: IndepDoc = read_doc(input, "independence query")?;
            let a = doc.algebra.to_algebra().map_err(|e| usage(e.to_string()))?;
            let sets = |v: &[Vec<usize>]| -> anyhow::Result<Vec<PointSet>> {
                v.iter()
                    .map(|p| {
                        let s = PointSet::from_points(a.dual_size(), p.iter().copied().filter(|&x| x < a.dual_size()));
                        if s.len() != p.len() || !a.is_element(&s) {
                            return Err(usage(format!("{p:?} is not an up-set of the dual")));
                        }
                        Ok(s)
                    })
                    .collect()
            };
            let (l, b, r) = (sets(&doc.left)?, sets(&doc.base)?, sets(&doc.right)?);
            let independent = finite_subset_independence(&a, &l, &b, &r, mode)?;
            let text = to_json(&json!({ "mode": mode, "independent": independent }))?;
            Outcome { text, ok: independent || !require }
        }
        Command::Chain(ChainCmd::Build { steps, catalog_bound }) => {
            if *steps == 0 {
                return Err(usage("--steps must be at least 1"));
            }
            within("--steps", *steps, limits.steps)?;
            within("--catalog-bound", *catalog_bound, limits.posets)?;
            let chain = build_chain(*steps, *catalog_bound, cli.seed)?;
            Outcome::ok(to_json(&ChainDoc::from_chain(&chain))?)
        }
        Command::Demo(DemoCmd::Tree { depth }) => {
            if *depth == 0 {
                return Err(usage("--depth must be at least 1"));
            }
            within("--depth", *depth, limits.depth)?;
            let doc = TreeDoc::from_tree(&trans_tree(*depth)?);
            let ok = doc.coherent && doc.distinct && doc.labels.len() == 1 << depth;
            Outcome { text: to_json(&doc)?, ok }
        }
        Command::Demo(DemoCmd::Split { input, upset, rounds }) => {
            let dual = match input {
                Some(p) => read_doc::<PosetDoc>(p, "poset")?.to_poset().map_err(|e| usage(e.to_string()))?,
                None => FinitePoset::chain(2),
            };
            let stage = HeytingAlgebra::from_poset_arc(dual);
            let n = stage.dual_size();
            let y = match upset {
                Some(v) => {
                    let s = PointSet::from_points(n, v.iter().copied().filter(|&x| x < n));
                    if s.len() != v.len() || !stage.is_element(&s) || s.is_empty() {
                        return Err(usage(format!("{v:?} is not a nonempty up-set of the dual")));
                    }
                    s
                }
                None => stage.top(),
            };
            let splits = split_nested(&stage, &y, *rounds)?;
            let mut ok = true;
            let docs: Vec<_> = splits
                .iter()
                .map(|s| {
                    let cert = s.certify();
                    ok &= cert.all_true();
                    json!({
                        "dual": PosetDoc::from_poset(s.stage.dual()),
                        "link": s.link.as_ref().map(|l| l.dual().to_vec()),
                        "y": s.y.to_vec(),
                        "u": s.u.to_vec(),
                        "v": s.v.to_vec(),
                        "certificate": cert,
                    })
                })
                .collect();
            Outcome { text: to_json(&json!({ "splits": docs }))?, ok }
        }
        Command::Demo(DemoCmd::Swap { fixture, budget }) => {
            let (stage, v) = match fixture {
                SwapFixture::Six => {
                    let (s, u, _) = six_element_completion()?;
                    (s, Some(u))
                }
                SwapFixture::Grid => {
                    let g = HeytingAlgebra::from_poset_arc(FinitePoset::chain(2).product(&FinitePoset::chain(2)));
                    (g, Some(PointSet::from_points(4, [1, 3])))
                }
                SwapFixture::Chain => (HeytingAlgebra::chain(3), None),
            };
            let w = swap_witness(&stage, &stage.top(), v.as_ref(), *budget)?;
            let ok = w.verify() && w.types_agree;
            let doc = json!({
                "dual": PosetDoc::from_poset(w.stage.dual()),
                "rounds": w.rounds,
                "u": w.u.to_vec(),
                "v": w.v.to_vec(),
                "v_prime": w.v_prime.to_vec(),
                "sigma": w.sigma,
                "types_agree": w.types_agree,
                "independent": w.independent,
                "verified": w.verify(),
            });
            Outcome { text: to_json(&doc)?, ok }
        }
        Command::Demo(DemoCmd::Eppa { bound, fixture }) => {
            within("--bound", *bound, limits.eppa)?;
            let [(c4, shift), (b8, swap)] = eppa_fixtures()?;
            let (rep, ok) = match fixture {
                EppaFixture::Shift => {
                    let rep = eppa_refute(&c4, &shift, *bound)?;
                    let ok = rep.verdict == EppaVerdict::RefutedForAllSizes && rep.consistent;
                    (rep, ok)
                }
                EppaFixture::Transposition => {
                    let rep = eppa_refute(&b8, &swap, *bound)?;
                    let ok = rep.verdict == EppaVerdict::Extends;
                    (rep, ok)
                }
            };
            Outcome { text: to_json(&rep)?, ok }
        }
        Command::Demo(DemoCmd::Wei) => {
            let r = wei_demo()?;
            Outcome { ok: r.passed(), text: r.to_string() }
        }
        Command::Check(args) => {
            let opts = SuiteOptions { level: args.level, seed: cli.seed, mode, inject_fault: args.inject_fault };
            let r = check_suite(&opts)?;
            let text = if args.json { to_json(&r)? } else { r.to_string() };
            Outcome { ok: r.passed(), text }
        }
        Command::Export(ExportCmd::Dot { input }) => {
            let text = fs::read_to_string(input)
                .map_err(|e| usage(format!("cannot read {}: {e}", input.display())))?;
            if let Ok(doc) = parse::<PosetDoc>(&text, "poset") {
                let p = doc.to_poset().map_err(|e| usage(e.to_string()))?;
                Outcome::ok(poset_dot(&p))
            } else if let Ok(AlgebraDoc::Poset { poset }) = parse::<AlgebraDoc>(&text, "algebra") {
                let p = poset.to_poset().map_err(|e| usage(e.to_string()))?;
                Outcome::ok(poset_dot(&p))
            } else if let Ok(doc) = parse::<ChainDoc>(&text, "chain") {
                Outcome::ok(doc.to_dot().map_err(|e| usage(e.to_string()))?)
            } else {
                bail!(usage(format!("{} is not a poset, algebra or chain document", input.display())))
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(cli.output.as_deref(), &out.text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let bad_input = matches!(
                e.downcast_ref::<heyting_lab::Error>(),
                Some(
                    heyting_lab::Error::BoundExceeded { .. }
                        | heyting_lab::Error::InvalidArgument(_)
                        | heyting_lab::Error::Format(_)
                )
            );
            if bad_input || e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
