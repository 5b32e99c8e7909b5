//! Command-line front end.
//!
//! Exit codes: 0 = success / property certified; 1 = a mathematical
//! violation was found (details as JSON on standard output); 2 = input or
//! usage error (diagnostics on standard error). All randomness flows from
//! an explicit `--seed`; stochastic commands refuse to run without one.

mod manifest;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use treeamle::amle::{
    default_probes, is_amle_exhaustive, is_amle_via_harmonicity, t_comparison_check,
    ComparisonProbe, InterpolatedMap, VertexOpenSet, DEFAULT_OPEN_SET_CAP,
};
use treeamle::discretize::{
    convergence_report, report_to_csv, IntervalDomain, RectDomain,
};
use treeamle::graph::{PartialVertexMap, SimplicialGraph, VertexId};
use treeamle::harmonic::{extend_inf_harmonic, is_inf_harmonic_at, ExtensionStep, TiePolicy};
use treeamle::io::{
    graph_from_json, graph_point_from_value, graph_point_to_value, mapping_from_json,
    mapping_to_json, plane_point_from_value, target_from_json, tree_point_from_value,
    tree_point_to_value, vector_point_from_value, AnyTarget,
};
use treeamle::politics::{
    estimate_value, predicted_value, simulate_game, trial_rng, vertex_amle, GameConfig,
    OptimalStrategy,
};
use treeamle::targets::{MetricTree, TreePoint};
use treeamle::validation;

#[derive(Parser)]
#[command(name = "treeamle", version, about = "Infinity-harmonic extension of tree-valued maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Lex,
    Revlex,
}

impl From<PolicyArg> for TiePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Lex => TiePolicy::Lexicographic,
            PolicyArg::Revlex => TiePolicy::ReverseLexicographic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AmleMode {
    Harmonic,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Interval,
    Rect,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct GraphTargetArgs {
    /// Graph file (JSON)
    #[arg(long)]
    graph: PathBuf,
    /// Target space file (tree JSON, or {"space": "box"|"plane", ...})
    #[arg(long)]
    target: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Extend boundary data to an infinity-harmonic total map
    Extend {
        #[command(flatten)]
        gt: GraphTargetArgs,
        /// Boundary mapping file: {"Ω": [...], "values": {...}}
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long, value_enum, default_value = "lex")]
        policy: PolicyArg,
        /// Emit the per-step trace as JSON lines on standard output
        #[arg(long)]
        trace: bool,
        /// Output mapping file
        #[arg(long)]
        out: PathBuf,
        /// Write a run manifest here
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Evaluate the linear interpolation of a total map at a complex point
    Interpolate {
        #[command(flatten)]
        gt: GraphTargetArgs,
        /// Total mapping file
        #[arg(long)]
        map: PathBuf,
        /// Complex point, e.g. '{"edge": ["u", "v"], "offset": 0.25}'
        #[arg(long)]
        point: String,
    },
    /// Test the midpoint clauses at every non-boundary vertex
    CheckHarmonic {
        #[command(flatten)]
        gt: GraphTargetArgs,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Verify the absolutely-minimal-extension property
    CheckAmle {
        #[arg(long, value_enum)]
        mode: AmleMode,
        #[command(flatten)]
        gt: GraphTargetArgs,
        #[arg(long)]
        map: PathBuf,
        /// Interior samples per edge for the exhaustive oracle
        #[arg(long, default_value_t = 16)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Refuse exhaustive sweeps beyond this many free vertices
        #[arg(long, default_value_t = DEFAULT_OPEN_SET_CAP)]
        cap: usize,
    },
    /// Probe cone comparisons of a tree-valued map (falsifier)
    CheckComparison {
        #[command(flatten)]
        gt: GraphTargetArgs,
        #[arg(long)]
        map: PathBuf,
        /// Probe file; defaults to a generated probe family
        #[arg(long)]
        probes: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// The stochastic game: value estimation and single-trial traces
    Politics {
        #[command(subcommand)]
        sub: PoliticsCmd,
    },
    /// Discretize a length space and report extension convergence
    Discretize {
        #[arg(long, value_enum)]
        space: SpaceArg,
        /// interval: "a,b"; rect: "x0,y0,x1,y1"
        #[arg(long)]
        bounds: String,
        /// Boundary description file
        #[arg(long = "boundary", visible_alias = "Y")]
        boundary: PathBuf,
        /// Target tree file
        #[arg(long)]
        target: PathBuf,
        /// Strictly decreasing list, e.g. "0.04,0.01,0.0025"
        #[arg(long)]
        epsilons: String,
        /// Report output path
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 200)]
        probe_resolution: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: ReportFormat,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Re-run a named validation experiment or a recorded manifest
    Repro {
        /// Experiment name (see --list)
        name: Option<String>,
        /// Re-dispatch the command recorded in a manifest file
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct PoliticsSetup {
    #[command(flatten)]
    gt: GraphTargetArgs,
    /// Terminal data file: {"Ω": Y, "values": f}
    #[arg(long)]
    terminal: PathBuf,
    /// Start vertex name
    #[arg(long)]
    x0: String,
    /// Start target point, e.g. '{"vertex": "p"}'
    #[arg(long)]
    t0: String,
    /// Master seed (required: no wall-clock seeding)
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    max_rounds: u32,
}

#[derive(Subcommand)]
enum PoliticsCmd {
    /// Monte-Carlo estimate of the game value under optimal play
    Estimate {
        #[command(flatten)]
        setup: PoliticsSetup,
        #[arg(long)]
        trials: usize,
        /// Worker threads (output is independent of this)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// JSON-lines trace of a single optimal-play trial
    Trace {
        #[command(flatten)]
        setup: PoliticsSetup,
        #[arg(long, default_value_t = 0)]
        trial_index: u64,
    },
}

enum Outcome {
    Certified,
    Violation(Value),
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(cli.command, &argv) {
        Ok(Outcome::Certified) => ExitCode::SUCCESS,
        Ok(Outcome::Violation(detail)) => {
            println!("{}", serde_json::to_string_pretty(&detail).unwrap());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type CliResult<T = Outcome> = Result<T, Box<dyn std::error::Error>>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()).into())
}

fn load_graph(path: &Path) -> CliResult<SimplicialGraph> {
    Ok(graph_from_json(&read(path)?)?)
}

fn load_target(path: &Path) -> CliResult<AnyTarget> {
    Ok(target_from_json(&read(path)?)?)
}

fn load_tree_target(path: &Path) -> CliResult<MetricTree> {
    match load_target(path)? {
        AnyTarget::Tree(t) => Ok(t),
        _ => Err("this command needs a tree target".into()),
    }
}

/// Parses a mapping file against the target kind and returns the declared
/// domain with the full value table.
fn load_mapping(
    graph: &SimplicialGraph,
    target: &AnyTarget,
    path: &Path,
) -> CliResult<(BTreeSet<VertexId>, MappedValues)> {
    let text = read(path)?;
    Ok(match target {
        AnyTarget::Tree(tree) => {
            let (omega, map) =
                mapping_from_json(graph, &text, |v| tree_point_from_value(tree, v))?;
            (omega, MappedValues::Tree(map))
        }
        AnyTarget::Box(b) => {
            let dim = b.dimension();
            let (omega, map) =
                mapping_from_json(graph, &text, |v| vector_point_from_value(dim, v))?;
            (omega, MappedValues::Box(map))
        }
        AnyTarget::Plane(_) => {
            let (omega, map) = mapping_from_json(graph, &text, plane_point_from_value)?;
            (omega, MappedValues::Plane(map))
        }
    })
}

enum MappedValues {
    Tree(PartialVertexMap<TreePoint>),
    Box(PartialVertexMap<Vec<f64>>),
    Plane(PartialVertexMap<[f64; 2]>),
}

fn restrict<P: Clone>(
    map: &PartialVertexMap<P>,
    omega: &BTreeSet<VertexId>,
) -> CliResult<PartialVertexMap<P>> {
    let mut out = PartialVertexMap::new();
    for v in omega {
        let p = map.get(*v).ok_or("domain vertex without value")?;
        out.insert(*v, p.clone());
    }
    Ok(out)
}

fn run(command: Command, argv: &[String]) -> CliResult {
    match command {
        Command::Extend { gt, boundary, policy, trace, out, manifest } => {
            cmd_extend(gt, boundary, policy.into(), trace, out, manifest, argv)
        }
        Command::Interpolate { gt, map, point } => cmd_interpolate(gt, map, point),
        Command::CheckHarmonic { gt, map, tol } => cmd_check_harmonic(gt, map, tol),
        Command::CheckAmle { mode, gt, map, resolution, tol, cap } => {
            cmd_check_amle(mode, gt, map, resolution, tol, cap)
        }
        Command::CheckComparison { gt, map, probes, resolution, tol } => {
            cmd_check_comparison(gt, map, probes, resolution, tol)
        }
        Command::Politics { sub } => match sub {
            PoliticsCmd::Estimate { setup, trials, jobs } => {
                cmd_politics_estimate(setup, trials, jobs)
            }
            PoliticsCmd::Trace { setup, trial_index } => cmd_politics_trace(setup, trial_index),
        },
        Command::Discretize {
            space,
            bounds,
            boundary,
            target,
            epsilons,
            report,
            probe_resolution,
            format,
            manifest,
        } => cmd_discretize(
            space,
            &bounds,
            &boundary,
            &target,
            &epsilons,
            &report,
            probe_resolution,
            format,
            manifest,
            argv,
        ),
        Command::Repro { name, manifest, list } => cmd_repro(name, manifest, list),
    }
}

fn cmd_extend(
    gt: GraphTargetArgs,
    boundary_path: PathBuf,
    policy: TiePolicy,
    trace: bool,
    out: PathBuf,
    manifest_path: Option<PathBuf>,
    argv: &[String],
) -> CliResult {
    let graph = load_graph(&gt.graph)?;
    let target = load_target(&gt.target)?;
    let (omega, values) = load_mapping(&graph, &target, &boundary_path)?;

    let (output, trace_lines) = match (&target, values) {
        (AnyTarget::Tree(tree), MappedValues::Tree(map)) => {
            let ext = extend_inf_harmonic(&graph, &restrict(&map, &omega)?, tree, policy)?;
            let val = mapping_to_json(&graph, &omega, &ext.map, |p| tree_point_to_value(tree, p));
            (val, trace_json(&graph, &ext.trace))
        }
        (AnyTarget::Box(b), MappedValues::Box(map)) => {
            let ext = extend_inf_harmonic(&graph, &restrict(&map, &omega)?, b, policy)?;
            let val = mapping_to_json(&graph, &omega, &ext.map, |p| json!(p));
            (val, trace_json(&graph, &ext.trace))
        }
        (AnyTarget::Plane(p), MappedValues::Plane(map)) => {
            // fails up front: the plane has no ball-intersection witness
            let ext = extend_inf_harmonic(&graph, &restrict(&map, &omega)?, p, policy)?;
            let val = mapping_to_json(&graph, &omega, &ext.map, |q| json!(q));
            (val, trace_json(&graph, &ext.trace))
        }
        _ => unreachable!("mapping parsed against the same target"),
    };

    if trace {
        for line in trace_lines {
            println!("{line}");
        }
    }
    std::fs::write(&out, format!("{}\n", serde_json::to_string_pretty(&output)?))?;
    if let Some(mpath) = manifest_path {
        let mut mb = manifest::ManifestBuilder::new(argv.to_vec());
        for input in [&gt.graph, &gt.target, &boundary_path] {
            mb.record_input(input)?;
        }
        std::fs::write(&mpath, format!("{}\n", serde_json::to_string_pretty(&mb.to_json())?))?;
    }
    Ok(Outcome::Certified)
}

fn trace_json(graph: &SimplicialGraph, trace: &treeamle::harmonic::ExtensionTrace) -> Vec<String> {
    trace
        .steps
        .iter()
        .map(|step| match step {
            ExtensionStep::Assign { vertex, lipschitz, pair, path_length } => json!({
                "assigned": graph.vertex_name(*vertex),
                "constant": lipschitz,
                "pair": [graph.vertex_name(pair.0), graph.vertex_name(pair.1)],
                "path_length": path_length,
            })
            .to_string(),
            ExtensionStep::Flood { assignments } => json!({
                "flooded": assignments
                    .iter()
                    .map(|(v, a)| json!([graph.vertex_name(*v), graph.vertex_name(*a)]))
                    .collect::<Vec<_>>(),
            })
            .to_string(),
        })
        .collect()
}

fn cmd_interpolate(gt: GraphTargetArgs, map_path: PathBuf, point: String) -> CliResult {
    let graph = load_graph(&gt.graph)?;
    let target = load_target(&gt.target)?;
    let (_, values) = load_mapping(&graph, &target, &map_path)?;
    let point_value: Value = serde_json::from_str(&point)?;
    let gp = graph_point_from_value(&graph, &point_value)?;
    let result = match (&target, values) {
        (AnyTarget::Tree(tree), MappedValues::Tree(map)) => {
            let f = InterpolatedMap::new(&graph, &map, tree)?;
            tree_point_to_value(tree, &f.eval(&gp)?)
        }
        (AnyTarget::Box(b), MappedValues::Box(map)) => {
            let f = InterpolatedMap::new(&graph, &map, b)?;
            json!(f.eval(&gp)?)
        }
        (AnyTarget::Plane(p), MappedValues::Plane(map)) => {
            let f = InterpolatedMap::new(&graph, &map, p)?;
            json!(f.eval(&gp)?)
        }
        _ => unreachable!(),
    };
    println!("{result}");
    Ok(Outcome::Certified)
}

fn cmd_check_harmonic(gt: GraphTargetArgs, map_path: PathBuf, tol: f64) -> CliResult {
    let graph = load_graph(&gt.graph)?;
    let target = load_target(&gt.target)?;
    let (omega, values) = load_mapping(&graph, &target, &map_path)?;
    let mut violations = Vec::new();
    macro_rules! sweep {
        ($target:expr, $map:expr) => {
            for i in 0..graph.vertex_count() {
                let v = VertexId(i);
                if omega.contains(&v) {
                    continue;
                }
                let check = is_inf_harmonic_at(&graph, $map, $target, v, tol)?;
                if !check.harmonic {
                    violations.push(json!({
                        "vertex": graph.vertex_name(v),
                        "max_neighbor_distance": check.max_neighbor_distance,
                        "reason": check.failure,
                    }));
                }
            }
        };
    }
    match (&target, &values) {
        (AnyTarget::Tree(t), MappedValues::Tree(m)) => sweep!(t, m),
        (AnyTarget::Box(b), MappedValues::Box(m)) => sweep!(b, m),
        (AnyTarget::Plane(p), MappedValues::Plane(m)) => sweep!(p, m),
        _ => unreachable!(),
    }
    if violations.is_empty() {
        eprintln!("infinity-harmonic at every non-boundary vertex (tol {tol})");
        Ok(Outcome::Certified)
    } else {
        Ok(Outcome::Violation(json!({"harmonic": false, "violations": violations})))
    }
}

fn open_set_json(graph: &SimplicialGraph, set: &VertexOpenSet) -> Value {
    json!({
        "core": set.core.iter().map(|&v| graph.vertex_name(v)).collect::<Vec<_>>(),
        "boundary": set.boundary.iter().map(|&v| graph.vertex_name(v)).collect::<Vec<_>>(),
    })
}

fn cmd_check_amle(
    mode: AmleMode,
    gt: GraphTargetArgs,
    map_path: PathBuf,
    resolution: usize,
    tol: f64,
    cap: usize,
) -> CliResult {
    let graph = load_graph(&gt.graph)?;
    let target = load_target(&gt.target)?;
    let (omega, values) = load_mapping(&graph, &target, &map_path)?;
    match mode {
        AmleMode::Harmonic => {
            let (AnyTarget::Tree(tree), MappedValues::Tree(map)) = (&target, &values) else {
                return Err("the harmonicity certificate requires a tree target".into());
            };
            if is_amle_via_harmonicity(&graph, &omega, map, tree, tol)? {
                eprintln!("certified: the interpolation is an AMLE of the boundary data");
                Ok(Outcome::Certified)
            } else {
                Ok(Outcome::Violation(json!({
                    "certified": false,
                    "mode": "harmonic",
                    "reason": "a subdivided vertex fails the midpoint clauses",
                })))
            }
        }
        AmleMode::Exhaustive => {
            macro_rules! sweep {
                ($target:expr, $map:expr) => {{
                    let f = InterpolatedMap::new(&graph, $map, $target)?;
                    is_amle_exhaustive(&f, &omega, resolution, tol, cap)?
                }};
            }
            let verdict = match (&target, &values) {
                (AnyTarget::Tree(t), MappedValues::Tree(m)) => sweep!(t, m),
                (AnyTarget::Box(b), MappedValues::Box(m)) => sweep!(b, m),
                (AnyTarget::Plane(p), MappedValues::Plane(m)) => sweep!(p, m),
                _ => unreachable!(),
            };
            match verdict.violation {
                None => {
                    eprintln!("no violating vertex-generated open set found");
                    Ok(Outcome::Certified)
                }
                Some(v) => Ok(Outcome::Violation(json!({
                    "certified": false,
                    "mode": "exhaustive",
                    "open_set": open_set_json(&graph, &v.set),
                    "lip_interior": v.lip_interior,
                    "lip_boundary": v.lip_boundary,
                }))),
            }
        }
    }
}

fn cmd_check_comparison(
    gt: GraphTargetArgs,
    map_path: PathBuf,
    probes_path: Option<PathBuf>,
    resolution: usize,
    tol: f64,
) -> CliResult {
    let graph = load_graph(&gt.graph)?;
    let tree = load_tree_target(&gt.target)?;
    let target = AnyTarget::Tree(tree.clone());
    let (omega, values) = load_mapping(&graph, &target, &map_path)?;
    let MappedValues::Tree(map) = values else { unreachable!() };
    let f = InterpolatedMap::new(&graph, &map, &tree)?;
    let probes: Vec<ComparisonProbe> = match probes_path {
        None => default_probes(&f, &omega)?,
        Some(path) => {
            let list: Vec<Value> = serde_json::from_str(&read(&path)?)?;
            let mut out = Vec::with_capacity(list.len());
            for item in &list {
                let anchor = tree_point_from_value(
                    &tree,
                    item.get("t").ok_or("probe misses \"t\"")?,
                )?;
                let base = graph_point_from_value(
                    &graph,
                    item.get("z").ok_or("probe misses \"z\"")?,
                )?;
                let slope = item.get("b").and_then(Value::as_f64).ok_or("probe misses \"b\"")?;
                let intercept =
                    item.get("c").and_then(Value::as_f64).ok_or("probe misses \"c\"")?;
                let core: BTreeSet<VertexId> = item
                    .get("W")
                    .and_then(Value::as_array)
                    .ok_or("probe misses \"W\"")?
                    .iter()
                    .map(|v| {
                        v.as_str()
                            .ok_or_else(|| "W entries must be vertex names".to_owned())
                            .and_then(|s| graph.vertex_id(s).map_err(|e| e.to_string()))
                    })
                    .collect::<Result<_, _>>()?;
                out.push(ComparisonProbe {
                    anchor,
                    cone_base: base,
                    slope,
                    intercept,
                    region: VertexOpenSet::from_core(&graph, core)?,
                });
            }
            out
        }
    };
    let verdict = t_comparison_check(&f, &probes, resolution, tol)?;
    match verdict.violation {
        None => {
            eprintln!("all {} probes passed (a falsifier: this does not certify)", probes.len());
            Ok(Outcome::Certified)
        }
        Some(v) => Ok(Outcome::Violation(json!({
            "passed": false,
            "probe_index": v.probe_index,
            "point": graph_point_to_value(&graph, &v.point),
            "lhs": v.lhs,
            "rhs": v.rhs,
        }))),
    }
}

fn load_game_config(setup: &PoliticsSetup) -> CliResult<GameConfig> {
    let graph = load_graph(&setup.gt.graph)?;
    let tree = load_tree_target(&setup.gt.target)?;
    let target = AnyTarget::Tree(tree.clone());
    let (terminal_set, values) = load_mapping(&graph, &target, &setup.terminal)?;
    let MappedValues::Tree(all_values) = values else { unreachable!() };
    let terminal_values = restrict(&all_values, &terminal_set)?;
    let start_vertex = graph.vertex_id(&setup.x0)?;
    let t0: Value = serde_json::from_str(&setup.t0)?;
    let start_target = tree_point_from_value(&tree, &t0)?;
    Ok(GameConfig {
        graph,
        terminal_set,
        target: tree,
        terminal_values,
        start_vertex,
        start_target,
        max_rounds: setup.max_rounds,
        master_seed: setup.seed,
    })
}

fn cmd_politics_estimate(
    setup: PoliticsSetup,
    trials: usize,
    jobs: Option<usize>,
) -> CliResult {
    let config = load_game_config(&setup)?;
    let table = vertex_amle(&config)?;
    let est = estimate_value(&config, trials, jobs)?;
    let out = json!({
        "estimate": est.mean,
        "std_error": est.std_error,
        "censored_fraction": est.censored_fraction,
        "trials": est.trials,
        "uncensored": est.uncensored,
        "predicted_value": predicted_value(&config, &table),
        "seed": config.master_seed,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(Outcome::Certified)
}

fn cmd_politics_trace(setup: PoliticsSetup, trial_index: u64) -> CliResult {
    let config = load_game_config(&setup)?;
    let table = vertex_amle(&config)?;
    let mut one = OptimalStrategy;
    let mut two = OptimalStrategy;
    let mut rng = trial_rng(config.master_seed, trial_index);
    let trial = simulate_game(&config, &table, &mut one, &mut two, &mut rng, true)?;
    for rec in trial.trace.as_deref().unwrap_or_default() {
        let line = json!({
            "k": rec.round,
            "x": config.graph.vertex_name(rec.to),
            "o": tree_point_to_value(&config.target, &rec.opposition),
            "t": tree_point_to_value(&config.target, &rec.new_target),
            "round_payoff": rec.net_to_one,
            "monitored": rec.monitored,
        });
        println!("{line}");
    }
    eprintln!(
        "payoff {} after {} rounds{}",
        trial.payoff_to_one,
        trial.rounds,
        if trial.censored { " (censored)" } else { "" }
    );
    Ok(Outcome::Certified)
}

fn parse_floats(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}").into()))
        .collect()
}

/// Maps a real cone value into a single-edge tree as an offset along its
/// only edge.
fn segment_point(tree: &MetricTree, value: f64) -> treeamle::Result<TreePoint> {
    tree.point_on_edge(treeamle::targets::TreeEdgeId(0), value)
}

#[allow(clippy::too_many_arguments)]
fn cmd_discretize(
    space: SpaceArg,
    bounds: &str,
    boundary_path: &Path,
    target_path: &Path,
    epsilons: &str,
    report_path: &Path,
    probe_resolution: usize,
    format: ReportFormat,
    manifest_path: Option<PathBuf>,
    argv: &[String],
) -> CliResult {
    let tree = load_tree_target(target_path)?;
    let eps_list = parse_floats(epsilons)?;
    let bounds_v = parse_floats(bounds)?;
    let spec: Value = serde_json::from_str(&read(boundary_path)?)?;
    let data = spec.get("data").ok_or("boundary file misses \"data\"")?.clone();

    let rows = match space {
        SpaceArg::Interval => {
            let [a, b] = bounds_v[..] else {
                return Err("interval bounds must be \"a,b\"".into());
            };
            let points: Vec<f64> = spec
                .get("points")
                .map(|v| serde_json::from_value(v.clone()))
                .transpose()?
                .unwrap_or_default();
            let (value_fn, reference) = interval_data(&tree, &data)?;
            let dom = IntervalDomain::new(a, b, points, value_fn)?;
            convergence_report(&dom, &tree, &eps_list, probe_resolution, reference.as_deref())?
        }
        SpaceArg::Rect => {
            let [x0, y0, x1, y1] = bounds_v[..] else {
                return Err("rect bounds must be \"x0,y0,x1,y1\"".into());
            };
            let arcs: Vec<(f64, f64)> = spec
                .get("arcs")
                .map(|v| serde_json::from_value(v.clone()))
                .transpose()?
                .unwrap_or_default();
            let points: Vec<[f64; 2]> = spec
                .get("points")
                .map(|v| serde_json::from_value(v.clone()))
                .transpose()?
                .unwrap_or_default();
            let (value_fn, reference) = rect_data(&tree, &data)?;
            let dom = RectDomain::new([x0, y0, x1, y1], arcs, points, value_fn)?;
            convergence_report(&dom, &tree, &eps_list, probe_resolution, reference.as_deref())?
        }
    };

    let content = match format {
        ReportFormat::Csv => report_to_csv(&rows),
        ReportFormat::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "eps": r.eps,
                        "net_size": r.net_size,
                        "metric_discrepancy": r.metric_discrepancy,
                        "lip_bound": r.lip_bound,
                        "sup_error_or_cauchy": r.sup_error,
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&items)?)
        }
    };
    std::fs::write(report_path, content)?;
    if let Some(mpath) = manifest_path {
        let mut mb = manifest::ManifestBuilder::new(argv.to_vec());
        mb.record_input(boundary_path)?;
        mb.record_input(target_path)?;
        std::fs::write(&mpath, format!("{}\n", serde_json::to_string_pretty(&mb.to_json())?))?;
    }
    eprintln!("wrote {} rows to {}", rows.len(), report_path.display());
    Ok(Outcome::Certified)
}

use treeamle::discretize::{BoundaryValueFn, IntervalValueFn};

type RefFn<P> = Box<dyn Fn(&P) -> TreePoint + Sync>;
type IntervalData = (IntervalValueFn, Option<RefFn<f64>>);
type RectData = (BoundaryValueFn<[f64; 2]>, Option<RefFn<[f64; 2]>>);

fn interval_data(tree: &MetricTree, data: &Value) -> CliResult<IntervalData> {
    if let Some(cone) = data.get("cone") {
        if tree.edge_count() != 1 {
            return Err("cone data needs a single-edge tree target".into());
        }
        let b = cone.get("b").and_then(Value::as_f64).ok_or("cone misses \"b\"")?;
        let c = cone.get("c").and_then(Value::as_f64).ok_or("cone misses \"c\"")?;
        let z = cone.get("z").and_then(Value::as_f64).ok_or("cone misses numeric \"z\"")?;
        let t1 = tree.clone();
        let t2 = tree.clone();
        let value: IntervalValueFn =
            Box::new(move |x| segment_point(&t1, b * (x - z).abs() + c).unwrap());
        let reference: RefFn<f64> =
            Box::new(move |x| segment_point(&t2, b * (x - z).abs() + c).unwrap());
        Ok((value, Some(reference)))
    } else if let Some(point) = data.get("constant") {
        let p = tree_point_from_value(tree, point)?;
        Ok((Box::new(move |_| p), Some(Box::new(move |_| p))))
    } else {
        Err("boundary data must be {\"cone\": ...} or {\"constant\": ...}".into())
    }
}

fn rect_data(tree: &MetricTree, data: &Value) -> CliResult<RectData> {
    if let Some(cone) = data.get("cone") {
        if tree.edge_count() != 1 {
            return Err("cone data needs a single-edge tree target".into());
        }
        let b = cone.get("b").and_then(Value::as_f64).ok_or("cone misses \"b\"")?;
        let c = cone.get("c").and_then(Value::as_f64).ok_or("cone misses \"c\"")?;
        let z: [f64; 2] = serde_json::from_value(
            cone.get("z").ok_or("cone misses \"z\"")?.clone(),
        )?;
        let dist = move |p: &[f64; 2]| ((p[0] - z[0]).powi(2) + (p[1] - z[1]).powi(2)).sqrt();
        let t1 = tree.clone();
        let t2 = tree.clone();
        let value: BoundaryValueFn<[f64; 2]> =
            Box::new(move |p| segment_point(&t1, b * dist(p) + c).unwrap());
        let reference: RefFn<[f64; 2]> =
            Box::new(move |p| segment_point(&t2, b * dist(p) + c).unwrap());
        Ok((value, Some(reference)))
    } else if let Some(point) = data.get("constant") {
        let p = tree_point_from_value(tree, point)?;
        Ok((Box::new(move |_| p), Some(Box::new(move |_| p))))
    } else {
        Err("boundary data must be {\"cone\": ...} or {\"constant\": ...}".into())
    }
}

fn cmd_repro(name: Option<String>, manifest_path: Option<PathBuf>, list: bool) -> CliResult {
    if list {
        for n in validation::EXPERIMENT_NAMES {
            println!("{n}");
        }
        return Ok(Outcome::Certified);
    }
    if let Some(path) = manifest_path {
        let doc: Value = serde_json::from_str(&read(&path)?)?;
        let args =
            manifest::command_of(&doc).ok_or("manifest has no usable \"command\" array")?;
        let mut argv = vec!["treeamle".to_owned()];
        argv.extend(args.clone());
        let cli = Cli::try_parse_from(&argv)?;
        return run(cli.command, &args);
    }
    let name = name.ok_or("give an experiment name, --manifest, or --list")?;
    let report = validation::run_experiment(&name)?;
    println!("{report}");
    if report.passed {
        Ok(Outcome::Certified)
    } else {
        Ok(Outcome::Violation(json!({"experiment": name, "details": report.details})))
    }
}
