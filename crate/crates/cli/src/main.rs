mod io;

/// Writes to stdout; a closed pipe ends the process quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        if let Err(e) = write!(std::io::stdout().lock(), $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        out!($($t)*);
        out!("\n");
    }};
}

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use homlab::decon::{
    build_td_deconstruction, compose, from_minor_map, hierarchy_level, validate, width, ClassFacts,
};
use homlab::folog::{classify_fragment, model_check};
use homlab::games::{
    build_unfolding, duplicator_wins, min_pebbles_unary, v_game_solves, GameVector, Verdict,
};
use homlab::graphlib::{find_minor, generate, has_property_p, pathwidth, stack_profile, tree_depth, treewidth};
use homlab::reduce::{
    color_trivialize, decomp_hom_reduction, decon_hom_reduction, dpp_to_hom, incidence_reduction,
    mc_to_hom_pipeline, product_reduction, ReductionReport,
};
use homlab::relstruct::{core, find_hom, hom_exists, Structure};
use homlab::{Budget, Limits};
use serde_json::json;

/// Homomorphisms, deconstructions, pebble games and reductions on small
/// finite structures.
#[derive(Parser)]
#[command(name = "homlab", version)]
struct Cli {
    /// Guard overrides `key=value,...`, applied after HOMLAB_GUARD.
    #[arg(long, global = true)]
    guard: Option<String>,
    /// Step budget for homomorphism and minor searches.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Least homomorphism between two structures.
    Hom {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    /// Core of a structure.
    Core {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Tree depth, treewidth, pathwidth and stack profile of a graph.
    Invariants {
        #[arg(long = "in")]
        input: PathBuf,
        /// Branching of the complete trees in the stack profile.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Largest tree height tried for the stack profile.
        #[arg(long, default_value_t = 3)]
        d_max: usize,
    },
    /// Deconstructions and decompositions.
    #[command(subcommand)]
    Decon(DeconCommand),
    /// Existential pebble games.
    #[command(subcommand)]
    Game(GameCommand),
    /// Instance reductions.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Model checking of an existential sentence.
    Mc {
        #[arg(long = "in")]
        input: PathBuf,
        /// Formula in s-expression syntax, inline or as a file path.
        #[arg(long)]
        formula: String,
    },
    /// Hierarchy level of a class from a facts file.
    Classify {
        #[arg(long)]
        facts: PathBuf,
    },
    /// Writes a member of a graph family.
    Generate {
        #[arg(value_enum)]
        family: Family,
        /// Size parameter: vertices, grid side, star leaves or tree height.
        n: usize,
        /// Branching for trees.
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum DeconCommand {
    /// Checks the covering and connectivity conditions.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Width in the mode of the file.
    Width {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Composes a deconstruction of G over H with one of H over I.
    Compose {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
    },
    /// Nice deconstruction of a rooted tree over a shallow tree.
    BuildTd {
        /// Rooted tree in the text format.
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        k: usize,
        /// Target height; defaults to the least admissible one.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Deconstruction of a minor over its host.
    FromMinor {
        #[arg(long)]
        minor: PathBuf,
        #[arg(long)]
        host: PathBuf,
        /// Branch sets as JSON; searched for when omitted.
        #[arg(long)]
        map: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GamePair {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Pebbles per round, e.g. `1,1,2`.
    #[arg(long)]
    v: GameVector,
}

#[derive(Subcommand)]
enum GameCommand {
    /// Solves the game on a pair of structures.
    Wins(GamePair),
    /// Whether the game decides homomorphisms out of a structure.
    Solves {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        v: GameVector,
    },
    /// The unfolding structure of a game vector.
    Unfold {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        v: GameVector,
    },
    /// Least number of one-pebble rounds that solves the structure.
    MinPebbles {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        max: usize,
    },
}

#[derive(Args)]
struct ReduceOpts {
    /// Emit the full report with input digest and construction trace.
    #[arg(long)]
    trace: bool,
    /// Also decide the produced instance; exits 1 when it has no solution.
    #[arg(long)]
    solve: bool,
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Starred subject of a deconstruction to its starred host.
    Decon {
        #[arg(long)]
        decon: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        opts: ReduceOpts,
    },
    /// Starred structure with a forest decomposition to the starred forest.
    Decomp {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        decon: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        opts: ReduceOpts,
    },
    /// Removes the colors of a starred core.
    Product {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[command(flatten)]
        opts: ReduceOpts,
    },
    /// Adds trivial colors to the core of the source.
    Color {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[command(flatten)]
        opts: ReduceOpts,
    },
    /// Replaces the source by its starred incidence graph.
    Incidence {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[command(flatten)]
        opts: ReduceOpts,
    },
    /// Disjunction of primitive positive sentences to a forest homomorphism.
    Dpp {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        opts: ReduceOpts,
    },
    /// Existential sentence to a forest homomorphism.
    Mc {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        formula: String,
        /// Largest relation arity allowed in the sentence.
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[command(flatten)]
        opts: ReduceOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Path,
    Cycle,
    Grid,
    Complete,
    Star,
    Tree,
}

/// Outcome of a successful run.
enum Status {
    Done,
    Negative,
}

struct Ctx {
    limits: Limits,
    json: bool,
}

impl Ctx {
    fn print_json(&self, v: &serde_json::Value) {
        outln!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
    }
}

fn limits(cli: &Cli) -> Result<Limits> {
    let mut l = Limits::default();
    if let Ok(env) = std::env::var("HOMLAB_GUARD") {
        l.apply_overrides(&env).context("HOMLAB_GUARD")?;
    }
    if let Some(g) = &cli.guard {
        l.apply_overrides(g).context("--guard")?;
    }
    if let Some(b) = cli.budget {
        l.hom_budget = Budget(b);
        l.minor_budget = Budget(b);
    }
    Ok(l)
}

fn negative_if(ok: bool) -> Status {
    if ok {
        Status::Done
    } else {
        Status::Negative
    }
}

fn run(cli: Cli) -> Result<Status> {
    let ctx = Ctx {
        limits: limits(&cli)?,
        json: cli.json,
    };
    match cli.command {
        Command::Hom { from, to } => hom(&ctx, &io::structure(&from)?, &io::structure(&to)?),
        Command::Core { input } => {
            let c = core(&io::structure(&input)?, &ctx.limits)?;
            outln!("{}", c.to_json());
            Ok(Status::Done)
        }
        Command::Invariants { input, k, d_max } => {
            let g = io::graph(&input)?;
            let td = tree_depth(&g, &ctx.limits)?.depth;
            let tw = treewidth(&g, &ctx.limits)?;
            let pw = pathwidth(&g, &ctx.limits)?;
            let stack = stack_profile(&g, d_max, k, &ctx.limits)?;
            if ctx.json {
                ctx.print_json(&json!({
                    "tree_depth": td, "treewidth": tw, "pathwidth": pw,
                    "stack_profile": { "k": k, "d_max": d_max, "depth": stack },
                }));
            } else {
                outln!("tree_depth {td}\ntreewidth {tw}\npathwidth {pw}\nstack_profile(k={k}) {stack}");
            }
            Ok(Status::Done)
        }
        Command::Decon(c) => decon(&ctx, c),
        Command::Game(c) => game(&ctx, c),
        Command::Reduce(c) => reduce(&ctx, c),
        Command::Mc { input, formula } => {
            let b = io::structure(&input)?;
            let f = io::formula(&formula)?;
            let holds = model_check(&b, &f)?;
            if ctx.json {
                ctx.print_json(&json!({ "holds": holds, "fragment": classify_fragment(&f, b.vocabulary().max_arity()).to_string() }));
            } else {
                outln!("{}", if holds { "true" } else { "false" });
            }
            Ok(negative_if(holds))
        }
        Command::Classify { facts } => {
            let text = io::read_text(&facts)?;
            let f: ClassFacts = serde_json::from_str(&text).with_context(|| format!("in {}", facts.display()))?;
            let level = hierarchy_level(&f)?;
            if ctx.json {
                ctx.print_json(&json!({ "level": level.to_string(), "facts": f }));
            } else {
                outln!("{level}");
                eprintln!("facts are assertions; per-graph evidence: `homlab invariants --in G --k K --d-max D`");
            }
            Ok(Status::Done)
        }
        Command::Generate { family, n, k } => {
            let g = match family {
                Family::Path => generate::path(n)?,
                Family::Cycle => generate::cycle(n)?,
                Family::Grid => generate::grid(n)?,
                Family::Complete => generate::complete(n)?,
                Family::Star => generate::star(n)?,
                Family::Tree => {
                    let t = generate::tree(n, k)?;
                    if !ctx.json {
                        out!("{}", t.to_text());
                        return Ok(Status::Done);
                    }
                    t.graph().clone()
                }
            };
            if ctx.json {
                outln!("{}", g.to_structure().to_json());
            } else {
                out!("{}", g.to_text());
            }
            Ok(Status::Done)
        }
    }
}

fn hom(ctx: &Ctx, a: &Structure, b: &Structure) -> Result<Status> {
    let found = find_hom(a, b, ctx.limits.hom_budget)?.decided(ctx.limits.hom_budget)?;
    let Some(h) = found else {
        if ctx.json {
            ctx.print_json(&json!({ "homomorphism": null }));
        } else {
            outln!("no homomorphism");
        }
        return Ok(Status::Negative);
    };
    let named: BTreeMap<&str, &str> = a.elements().map(|x| (a.name(x), b.name(h[x as usize]))).collect();
    if ctx.json {
        ctx.print_json(&json!({ "homomorphism": named }));
    } else {
        for (x, y) in named {
            outln!("{x} -> {y}");
        }
    }
    Ok(Status::Done)
}

fn decon(ctx: &Ctx, c: DeconCommand) -> Result<Status> {
    match c {
        DeconCommand::Validate { input } => {
            let d = io::deconstruction(&input)?;
            let bad: Vec<String> = validate(&d).iter().map(ToString::to_string).collect();
            if ctx.json {
                ctx.print_json(&json!({ "valid": bad.is_empty(), "violations": bad }));
            } else if bad.is_empty() {
                outln!("valid");
            } else {
                for v in &bad {
                    outln!("{v}");
                }
            }
            Ok(negative_if(bad.is_empty()))
        }
        DeconCommand::Width { input } => {
            let w = width(&io::deconstruction(&input)?)?;
            if ctx.json {
                ctx.print_json(&json!({ "width": w }));
            } else {
                outln!("{w}");
            }
            Ok(Status::Done)
        }
        DeconCommand::Compose { first, second } => {
            let d = compose(&io::deconstruction(&first)?, &io::deconstruction(&second)?)?;
            outln!("{}", d.to_json());
            Ok(Status::Done)
        }
        DeconCommand::BuildTd { tree, k, d } => {
            let t = io::forest(&tree)?;
            let d = match d {
                Some(d) => d,
                None => {
                    let mut d = 0;
                    while has_property_p(&t, d + 1, k)? {
                        d += 1;
                    }
                    d
                }
            };
            let out = build_td_deconstruction(&t, d, k)?;
            if ctx.json {
                let decon: serde_json::Value = serde_json::from_str(&out.deconstruction.to_json())?;
                ctx.print_json(&json!({ "d": d, "width": out.width, "host": out.host.to_text(), "deconstruction": decon }));
            } else {
                outln!("{}", out.deconstruction.to_json());
            }
            Ok(Status::Done)
        }
        DeconCommand::FromMinor { minor, host, map } => {
            let m = io::graph(&minor)?;
            let g = io::graph(&host)?;
            let mu = match map {
                Some(p) => io::minor_map(&p, &m, &g)?,
                None => match find_minor(&g, &m, ctx.limits.minor_budget)?.decided(ctx.limits.minor_budget)? {
                    Some(mu) => mu,
                    None => {
                        outln!("not a minor");
                        return Ok(Status::Negative);
                    }
                },
            };
            outln!("{}", from_minor_map(&m, &g, &mu)?.to_json());
            Ok(Status::Done)
        }
    }
}

fn game(ctx: &Ctx, c: GameCommand) -> Result<Status> {
    match c {
        GameCommand::Wins(GamePair { a, b, v }) => {
            let (a, b) = (io::structure(&a)?, io::structure(&b)?);
            let verdict = duplicator_wins(&a, &b, &v, &ctx.limits)?;
            match &verdict {
                Verdict::Duplicator(w) => {
                    if ctx.json {
                        ctx.print_json(&json!({ "winner": "duplicator", "strategy": w.to_named(&a, &b) }));
                    } else {
                        outln!("duplicator wins ({} positions)", w.len());
                    }
                }
                Verdict::Spoiler { round } => {
                    if ctx.json {
                        ctx.print_json(&json!({ "winner": "spoiler", "round": round }));
                    } else {
                        outln!("spoiler wins within {round} round(s)");
                    }
                }
            }
            Ok(negative_if(verdict.duplicator_wins()))
        }
        GameCommand::Solves { input, v } => {
            let a = io::structure(&input)?;
            let s = v_game_solves(&a, &v, &ctx.limits)?;
            if ctx.json {
                let witness = match (&s.witness, &s.unfolding.structure) {
                    (Some(h), Some(t)) => {
                        json!(a.elements().map(|x| (a.name(x), t.name(h[x as usize]))).collect::<BTreeMap<_, _>>())
                    }
                    _ => serde_json::Value::Null,
                };
                ctx.print_json(&json!({ "solves": s.solves(), "witness": witness }));
            } else {
                outln!("{}", if s.solves() { "solves" } else { "does not solve" });
            }
            Ok(negative_if(s.solves()))
        }
        GameCommand::Unfold { input, v } => {
            let a = io::structure(&input)?;
            let u = build_unfolding(&a, &v, &ctx.limits)?;
            match &u.structure {
                Some(t) => outln!("{}", t.to_json()),
                None => bail!("the unfolding for {v} has no elements"),
            }
            Ok(Status::Done)
        }
        GameCommand::MinPebbles { input, max } => {
            let a = io::structure(&input)?;
            let n = min_pebbles_unary(&a, max, &ctx.limits)?;
            if ctx.json {
                ctx.print_json(&json!({ "min_pebbles": n, "max": max }));
            } else {
                match n {
                    Some(n) => outln!("{n}"),
                    None => outln!("more than {max}"),
                }
            }
            Ok(negative_if(n.is_some()))
        }
    }
}

fn emit(ctx: &Ctx, r: &ReductionReport, opts: &ReduceOpts) -> Result<Status> {
    let answer = if opts.solve {
        Some(match r.target() {
            Some(t) => hom_exists(r.source(), t, ctx.limits.hom_budget)?,
            None => false,
        })
    } else {
        None
    };
    if opts.trace {
        outln!("{}", r.to_json());
    } else if opts.solve && !ctx.json {
        outln!("{}", if answer == Some(true) { "homomorphism" } else { "no homomorphism" });
    } else {
        let mut v = serde_json::to_value(&r.output)?;
        if let Some(a) = answer {
            v["answer"] = json!(a);
        }
        ctx.print_json(&v);
    }
    Ok(negative_if(answer != Some(false)))
}

fn reduce(ctx: &Ctx, c: ReduceCommand) -> Result<Status> {
    let l = &ctx.limits;
    match c {
        ReduceCommand::Decon { decon, target, opts } => {
            let d = io::deconstruction(&decon)?;
            let r = decon_hom_reduction(d.subject(), &d, &io::structure(&target)?, l)?;
            emit(ctx, &r, &opts)
        }
        ReduceCommand::Decomp { structure, decon, target, opts } => {
            let r = decomp_hom_reduction(&io::structure(&structure)?, &io::deconstruction(&decon)?, &io::structure(&target)?, l)?;
            emit(ctx, &r, &opts)
        }
        ReduceCommand::Product { from, to, opts } => {
            emit(ctx, &product_reduction(&io::structure(&from)?, &io::structure(&to)?, l)?, &opts)
        }
        ReduceCommand::Color { from, to, opts } => {
            emit(ctx, &color_trivialize(&io::structure(&from)?, &io::structure(&to)?, l)?, &opts)
        }
        ReduceCommand::Incidence { from, to, opts } => {
            emit(ctx, &incidence_reduction(&io::structure(&from)?, &io::structure(&to)?, l)?, &opts)
        }
        ReduceCommand::Dpp { input, formula, opts } => {
            let (_, r) = dpp_to_hom(&io::structure(&input)?, &io::formula(&formula)?, l)?;
            emit(ctx, &r, &opts)
        }
        ReduceCommand::Mc { input, formula, arity, opts } => {
            let (_, r) = mc_to_hom_pipeline(&io::structure(&input)?, &io::formula(&formula)?, arity, l)?;
            emit(ctx, &r, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").lines().next().unwrap_or_default());
            ExitCode::from(2)
        }
    }
}
