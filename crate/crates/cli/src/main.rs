//! Command-line interface: enumeration, composition, projection, homology,
//! action evaluation, and the verification suites, all with JSON import and
//! export.

use cacti_core::action::{action_context, upsilon_tree, AlignedMap};
use cacti_core::cacti::{from_arclist, ArcList, CactusJson, ProjectiveCactus};
use cacti_core::cells::{cact1_complex, cact1_trees, fiber_complex, Field};
use cacti_core::intervals::{
    cubes_to_ov, ov1_membership, project_to_cactus, Cube2, Cubes2Element, Interval, OvElement,
    OvJson,
};
use cacti_core::knots::{budney_act, KnotMap};
use cacti_core::rat::{format_q, parse_q, Q};
use cacti_core::trees::{BwTree, BwTreeJson};
use cacti_core::verify::{run_suite, SUITES};
use cacti_core::Error;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cacti",
    about = "Exact combinatorics of cacti, overlapping intervals, and the knot-tower action",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// emit machine-readable JSON instead of tables
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// B/w trees: enumeration, collapses, statistics
    Trees(TreesCmd),
    /// Cacti: composition, arc lists, underlying trees
    Cacti(CactiCmd),
    /// Overlapping intervals: composition, membership, projection
    Ov(OvCmd),
    /// Little 2-cubes
    Cubes(CubesCmd),
    /// Cell complexes and homology
    Cells(CellsCmd),
    /// Configuration-space operations
    Config(ConfigCmd),
    /// The cactus action on aligned maps
    Act(ActCmd),
    /// The interval action on framed knots
    Knots(KnotsCmd),
    /// Seeded verification suites
    Verify(VerifyCmd),
}

#[derive(Args)]
struct TreesCmd {
    #[command(subcommand)]
    action: TreesAction,
}

#[derive(Subcommand)]
enum TreesAction {
    /// List all trees of the given arity
    Enum {
        #[arg(long)]
        m: usize,
        /// restrict to one cell dimension
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Collapse an angle of a tree loaded from JSON
    Collapse {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        white: usize,
        #[arg(long)]
        angle: usize,
    },
    /// Sibling statistics of one white vertex
    Stats {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        white: usize,
        /// height order as a comma-separated image list, lowest first
        #[arg(long)]
        sigma: Option<String>,
    },
}

#[derive(Args)]
struct CactiCmd {
    #[command(subcommand)]
    action: CactiAction,
}

#[derive(Subcommand)]
enum CactiAction {
    /// Insert one cactus into a lobe of another
    Compose {
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        lobe: usize,
        #[arg(long)]
        inner: PathBuf,
    },
    /// Print the arc list of a cactus (or rebuild one from `--from`)
    Arclist {
        #[arg(long)]
        cactus: Option<PathBuf>,
        /// arc list as `label:length,label:length,..`
        #[arg(long)]
        from: Option<String>,
    },
    /// Print the underlying tree of a cactus
    Tree {
        #[arg(long)]
        cactus: PathBuf,
    },
}

#[derive(Args)]
struct OvCmd {
    #[command(subcommand)]
    action: OvAction,
}

#[derive(Subcommand)]
enum OvAction {
    /// Compose overlapping-interval elements
    Compose {
        #[arg(long)]
        outer: PathBuf,
        #[arg(long)]
        slot: usize,
        #[arg(long)]
        inner: PathBuf,
    },
    /// Decide membership in the normalized subspace
    Member {
        #[arg(long)]
        element: PathBuf,
    },
    /// Project a normalized element onto its cactus
    Project {
        #[arg(long)]
        element: PathBuf,
    },
}

#[derive(Args)]
struct CubesCmd {
    #[command(subcommand)]
    action: CubesAction,
}

#[derive(Subcommand)]
enum CubesAction {
    /// Project little 2-cubes to overlapping intervals
    Toov {
        /// cubes as `xlo,xhi,ylo,yhi;..` with rational entries
        #[arg(long, allow_hyphen_values = true)]
        cubes: String,
    },
}

#[derive(Args)]
struct CellsCmd {
    #[command(subcommand)]
    action: CellsAction,
}

#[derive(Subcommand)]
enum CellsAction {
    /// The cell complex of normalized cacti of one arity
    Cact1 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        betti: bool,
        #[arg(long, default_value = "f2")]
        field: String,
    },
    /// The fiber complex of the projection over a cactus
    Fiber {
        #[arg(long)]
        cactus: PathBuf,
    },
}

#[derive(Args)]
struct ConfigCmd {
    #[command(subcommand)]
    action: ConfigAction,
}

#[derive(Subcommand)]
enum ConfigAction {
    /// Insert one sampled knot configuration into another
    Insert {
        #[arg(long)]
        knot: String,
        #[arg(long)]
        at: usize,
        #[arg(long)]
        inner_knot: String,
        /// evaluation times for both configurations, comma separated
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Apply a coface to a knot evaluation
    Coface {
        #[arg(long)]
        knot: String,
        #[arg(long)]
        i: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Shrink a knot evaluation to infinitesimal data
    Shrink {
        #[arg(long)]
        knot: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
}

#[derive(Args)]
struct ActCmd {
    #[command(subcommand)]
    action: ActAction,
}

#[derive(Subcommand)]
enum ActAction {
    /// Evaluate the cactus action at one tuple
    Eval {
        #[arg(long)]
        cactus: PathBuf,
        /// comma-separated built-in knot names, one per lobe
        #[arg(long)]
        maps: String,
        /// nondecreasing rational times, comma separated
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Lobe contexts and the collapsed insertion tree at one tuple
    Context {
        #[arg(long)]
        cactus: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Run an action suite (alias of `verify`)
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: u64,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args)]
struct KnotsCmd {
    #[command(subcommand)]
    action: KnotsAction,
}

#[derive(Subcommand)]
enum KnotsAction {
    /// Act on knots by an overlapping-intervals element and sample the result
    Act {
        #[arg(long)]
        ov: PathBuf,
        /// comma-separated built-in knot names, one per interval
        #[arg(long)]
        knots: String,
        #[arg(long, default_value_t = 9)]
        samples: usize,
    },
}

#[derive(Args)]
struct VerifyCmd {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: u64,
    #[arg(long)]
    tol: Option<f64>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

fn load_tree(path: &PathBuf) -> Result<BwTree, Error> {
    let j: BwTreeJson = read_json(path)?;
    BwTree::from_json(&j)
}

fn load_cactus(path: &PathBuf) -> Result<ProjectiveCactus, Error> {
    let j: CactusJson = read_json(path)?;
    ProjectiveCactus::from_json(&j)
}

fn load_ov(path: &PathBuf) -> Result<OvElement, Error> {
    let j: OvJson = read_json(path)?;
    OvElement::from_json(&j)
}

fn parse_times(s: &str) -> Result<Vec<Q>, Error> {
    s.split(',').map(|x| parse_q(x.trim())).collect()
}

fn parse_knots(s: &str) -> Result<Vec<KnotMap>, Error> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            // a built-in name, or a JSON file of sampled (t, point, frame) rows
            KnotMap::by_name(x).or_else(|name_err| {
                if x.ends_with(".json") {
                    let text = std::fs::read_to_string(x)
                        .map_err(|e| Error::parse(x, e.to_string()))?;
                    let samples: Vec<(f64, Vec<f64>, Vec<f64>)> = serde_json::from_str(&text)
                        .map_err(|e| Error::parse(x, e.to_string()))?;
                    let d = samples
                        .first()
                        .map(|(_, p, _)| p.len())
                        .ok_or_else(|| Error::parse(x, "empty sample list"))?;
                    Ok(KnotMap::Sampled { d, samples })
                } else {
                    Err(name_err)
                }
            })
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    let json = cli.json;
    match cli.command {
        Command::Trees(cmd) => match cmd.action {
            TreesAction::Enum { m, dim } => {
                let trees: Vec<BwTree> = cacti_core::trees::enumerate_bw_trees(m)?
                    .into_iter()
                    .filter(|t| dim.is_none_or(|d| t.dim() == d))
                    .collect();
                if json {
                    let out: Vec<_> = trees.iter().map(|t| t.to_json()).collect();
                    println!("{}", serde_json::to_string_pretty(&out).unwrap());
                } else {
                    for t in &trees {
                        println!("dim {}  {}", t.dim(), t.key());
                    }
                    println!("total {}", trees.len());
                }
            }
            TreesAction::Collapse { tree, white, angle } => {
                let t = load_tree(&tree)?.angle_collapse(white, angle)?;
                if json {
                    println!("{}", serde_json::to_string_pretty(&t.to_json()).unwrap());
                } else {
                    println!("{}", t.key());
                }
            }
            TreesAction::Stats { tree, white, sigma } => {
                let t = load_tree(&tree)?;
                let lambda = t.lambda(white)?;
                let rho = t.rho(white)?;
                let alpha = t.alpha_label(white)?;
                let (lp, rp) = match sigma {
                    Some(s) => {
                        let imgs: Vec<usize> = s
                            .split(',')
                            .map(|x| x.trim().parse::<usize>())
                            .collect::<Result<_, _>>()
                            .map_err(|e| Error::parse("sigma", e.to_string()))?;
                        let p = cacti_core::perm::Perm::from_images(imgs)
                            .ok_or_else(|| Error::parse("sigma", "not a permutation"))?;
                        (Some(t.lambda_plus(white, &p)?), Some(t.rho_plus(white, &p)?))
                    }
                    None => (None, None),
                };
                if json {
                    println!(
                        "{}",
                        serde_json::json!({
                            "alpha": alpha,
                            "lambda": lambda,
                            "rho": rho,
                            "lambda_plus": lp,
                            "rho_plus": rp,
                        })
                    );
                } else {
                    println!("alpha {alpha}  lambda {lambda:?}  rho {rho:?}");
                    if let (Some(lp), Some(rp)) = (lp, rp) {
                        println!("lambda+ {lp:?}  rho+ {rp:?}");
                    }
                }
            }
        },
        Command::Cacti(cmd) => match cmd.action {
            CactiAction::Compose { outer, lobe, inner } => {
                let a = load_cactus(&outer)?;
                let b = load_cactus(&inner)?;
                let r = a.compose(lobe, &b)?;
                println!("{}", serde_json::to_string_pretty(&r.to_json()).unwrap());
            }
            CactiAction::Arclist { cactus, from } => match (cactus, from) {
                (Some(path), None) => {
                    let c = load_cactus(&path)?;
                    let list = c.to_arclist();
                    if json {
                        let out: Vec<_> = list
                            .arcs
                            .iter()
                            .map(|(l, x)| serde_json::json!([l, format_q(x)]))
                            .collect();
                        println!("{}", serde_json::to_string_pretty(&out).unwrap());
                    } else {
                        for (l, x) in &list.arcs {
                            println!("lobe {l}  length {}", format_q(x));
                        }
                    }
                }
                (None, Some(s)) => {
                    let mut arcs = Vec::new();
                    for part in s.split(',') {
                        let (l, x) = part
                            .split_once(':')
                            .ok_or_else(|| Error::parse("arclist", "want label:length"))?;
                        arcs.push((
                            l.trim()
                                .parse::<usize>()
                                .map_err(|e| Error::parse("arclist", e.to_string()))?,
                            parse_q(x)?,
                        ));
                    }
                    let c = from_arclist(&ArcList { arcs })?;
                    let p = ProjectiveCactus::from_cactus(c);
                    println!("{}", serde_json::to_string_pretty(&p.to_json()).unwrap());
                }
                _ => return Err(Error::invalid("give exactly one of --cactus or --from")),
            },
            CactiAction::Tree { cactus } => {
                let c = load_cactus(&cactus)?;
                if json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&c.underlying_tree().to_json()).unwrap()
                    );
                } else {
                    println!("{}", c.underlying_tree().key());
                }
            }
        },
        Command::Ov(cmd) => match cmd.action {
            OvAction::Compose { outer, slot, inner } => {
                let a = load_ov(&outer)?;
                let b = load_ov(&inner)?;
                let r = a.compose_at(slot, &b)?;
                println!("{}", serde_json::to_string_pretty(&r.to_json()).unwrap());
            }
            OvAction::Member { element } => {
                let e = load_ov(&element)?;
                match ov1_membership(&e) {
                    Some(w) => {
                        if json {
                            println!(
                                "{}",
                                serde_json::json!({
                                    "member": true,
                                    "tree": w.tree.key(),
                                    "sigma": w.sigma.images(),
                                })
                            );
                        } else {
                            println!(
                                "member: tree {}  heights {:?}",
                                w.tree.key(),
                                w.sigma.images()
                            );
                        }
                    }
                    None => {
                        if json {
                            println!("{}", serde_json::json!({ "member": false }));
                        } else {
                            println!("not a member");
                        }
                    }
                }
            }
            OvAction::Project { element } => {
                let e = load_ov(&element)?;
                let w = ov1_membership(&e)
                    .ok_or_else(|| Error::invalid("element is not in the normalized subspace"))?;
                let c = project_to_cactus(&e, &w)?;
                let p = ProjectiveCactus::from_normalized(c);
                println!("{}", serde_json::to_string_pretty(&p.to_json()).unwrap());
            }
        },
        Command::Cubes(cmd) => match cmd.action {
            CubesAction::Toov { cubes } => {
                let mut parsed = Vec::new();
                for part in cubes.split(';') {
                    let nums: Vec<Q> = parse_times(part)?;
                    if nums.len() != 4 {
                        return Err(Error::parse("cubes", "want xlo,xhi,ylo,yhi"));
                    }
                    parsed.push(Cube2 {
                        x: Interval::new(nums[0].clone(), nums[1].clone())?,
                        y: Interval::new(nums[2].clone(), nums[3].clone())?,
                    });
                }
                let e = cubes_to_ov(&Cubes2Element::new(parsed)?)?;
                println!("{}", serde_json::to_string_pretty(&e.to_json()).unwrap());
            }
        },
        Command::Cells(cmd) => match cmd.action {
            CellsAction::Cact1 { m, betti, field } => {
                let c = cact1_complex(m)?;
                if betti {
                    let f = match field.as_str() {
                        "f2" => Field::F2,
                        "q" => Field::Qq,
                        other => return Err(Error::invalid(format!("unknown field {other}"))),
                    };
                    let b = c.betti(f)?;
                    if json {
                        println!(
                            "{}",
                            serde_json::json!({ "cells": c.cell_counts(), "betti": b })
                        );
                    } else {
                        println!("cells by dimension: {:?}", c.cell_counts());
                        println!("betti numbers:      {b:?}");
                    }
                } else if json {
                    println!("{}", serde_json::to_string_pretty(&c.cells).unwrap());
                } else {
                    println!("cells by dimension: {:?}", c.cell_counts());
                    for t in cact1_trees(m)? {
                        println!("dim {}  {}", t.dim(), t.key());
                    }
                }
            }
            CellsAction::Fiber { cactus } => {
                let c = load_cactus(&cactus)?;
                let f = fiber_complex(c.shape())?;
                let counts = f.complex.cell_counts();
                let acyclic = f.complex.reduced_homology_vanishes()?;
                if json {
                    println!("{}", serde_json::json!({ "cells": counts, "acyclic": acyclic }));
                } else {
                    println!("fiber cells by dimension: {counts:?}");
                    println!("reduced homology vanishes: {acyclic}");
                }
            }
        },
        Command::Config(cmd) => {
            let print_config = |c: &cacti_core::configs::FramedConfig| {
                let mut vs = Vec::new();
                for i in 1..=c.n {
                    for j in i + 1..=c.n {
                        vs.push(serde_json::json!({
                            "pair": [i, j],
                            "v": c.vij(i, j).iter().copied().collect::<Vec<f64>>(),
                        }));
                    }
                }
                let frames: Vec<Vec<f64>> =
                    c.frames.iter().map(|f| f.iter().copied().collect()).collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "n": c.n, "d": c.d, "directions": vs, "frames": frames,
                    }))
                    .unwrap()
                );
            };
            match cmd.action {
                ConfigAction::Insert { knot, at, inner_knot, t } => {
                    let f = KnotMap::by_name(&knot)?;
                    let g = KnotMap::by_name(&inner_knot)?;
                    let times: Vec<f64> =
                        parse_times(&t)?.iter().map(cacti_core::rat::to_f64).collect();
                    let a = cacti_core::knots::q_ev_config(&f, 3, &times)?;
                    let b = cacti_core::knots::q_ev_config(&g, 3, &times)?;
                    print_config(&a.insert(at, &b)?);
                }
                ConfigAction::Coface { knot, i, t } => {
                    let f = KnotMap::by_name(&knot)?;
                    let times: Vec<f64> =
                        parse_times(&t)?.iter().map(cacti_core::rat::to_f64).collect();
                    let c = cacti_core::knots::q_ev_config(&f, 3, &times)?;
                    print_config(&c.coface(i)?);
                }
                ConfigAction::Shrink { knot, t } => {
                    let f = KnotMap::by_name(&knot)?;
                    let times: Vec<f64> =
                        parse_times(&t)?.iter().map(cacti_core::rat::to_f64).collect();
                    print_config(&cacti_core::knots::q_ev_config(&f, 3, &times)?);
                }
            }
        }
        Command::Act(cmd) => match cmd.action {
            ActAction::Eval { cactus, maps, t } => {
                let c = load_cactus(&cactus)?;
                let times = parse_times(&t)?;
                let n = times.len();
                let knots = parse_knots(&maps)?;
                let inputs: Vec<AlignedMap> =
                    knots.into_iter().map(|k| AlignedMap::knot_derived(k, n, 3)).collect();
                let out = cacti_core::action::act(&c, &inputs, &times)?;
                let mut vs = Vec::new();
                for i in 1..=out.n {
                    for j in i + 1..=out.n {
                        vs.push(serde_json::json!({
                            "pair": [i, j],
                            "v": out.vij(i, j).iter().copied().collect::<Vec<f64>>(),
                        }));
                    }
                }
                println!(
                    "{}",
                    serde_json::to_string_pretty(
                        &serde_json::json!({ "n": out.n, "directions": vs })
                    )
                    .unwrap()
                );
            }
            ActAction::Context { cactus, t } => {
                let c = load_cactus(&cactus)?;
                let times = parse_times(&t)?;
                let ctx = action_context(&c, &times)?;
                let tree = upsilon_tree(&c, &times)?;
                if json {
                    let lobes: Vec<_> = ctx
                        .lobes
                        .iter()
                        .map(|lc| {
                            serde_json::json!({
                                "lobe": lc.lobe,
                                "index_set": lc.s_set.iter().copied().collect::<Vec<usize>>(),
                                "slot_values": lc
                                    .slot_values
                                    .iter()
                                    .map(format_q)
                                    .collect::<Vec<String>>(),
                            })
                        })
                        .collect();
                    println!("{}", serde_json::json!({ "lobes": lobes, "tree": tree.key() }));
                } else {
                    for lc in &ctx.lobes {
                        println!("lobe {}  S = {:?}", lc.lobe, lc.s_set);
                    }
                    println!("tree {}", tree.key());
                }
            }
            ActAction::Verify { suite, seed, cases, tol } => {
                // short action-centric aliases for the global suites
                let name = match suite.as_str() {
                    "unit" | "equivariance" | "associativity" => "action-axioms",
                    "faces" => "action-faces",
                    "projection" => "projection-compat",
                    other => other,
                };
                let report = run_suite(name, seed, cases, tol)?;
                if json {
                    println!("{}", report.to_json());
                } else {
                    print!("{}", report.render_human());
                }
                if !report.passed() {
                    std::process::exit(1);
                }
            }
        },
        Command::Knots(cmd) => match cmd.action {
            KnotsAction::Act { ov, knots, samples } => {
                let e = load_ov(&ov)?;
                let ks = parse_knots(&knots)?;
                let f = budney_act(&e, &ks)?;
                let mut rows = Vec::new();
                for k in 0..samples {
                    let t = -1.0 + 2.0 * k as f64 / (samples.max(2) - 1) as f64;
                    let p = f.curve(t, 3);
                    rows.push((t, p));
                }
                if json {
                    let out: Vec<_> = rows
                        .iter()
                        .map(|(t, p)| {
                            serde_json::json!({
                                "t": t,
                                "point": p.iter().copied().collect::<Vec<f64>>(),
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&out).unwrap());
                } else {
                    for (t, p) in rows {
                        println!("t {t:+.4}  ->  ({:+.6}, {:+.6}, {:+.6})", p[0], p[1], p[2]);
                    }
                }
            }
        },
        Command::Verify(cmd) => {
            if !SUITES.contains(&cmd.suite.as_str()) {
                return Err(Error::UnknownSuite(format!(
                    "{} (known: {})",
                    cmd.suite,
                    SUITES.join(", ")
                )));
            }
            let report = run_suite(&cmd.suite, cmd.seed, cmd.cases, cmd.tol)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_human());
            }
            if !report.passed() {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
