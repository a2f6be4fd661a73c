//! Command-line front end. Every command is deterministic given its full
//! flag set; machine-readable outputs carry a provenance block echoing the
//! invocation. Exit codes: 0 success, 1 internal error, 2 bad input,
//! 3 inconclusive verdict.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use stocomp::adapted_metrics::{
    adaptedness, intrinsic_metric, path_metric, standard_lengths, LengthKind,
};
use stocomp::graph_core::{
    generate_antitree, generate_birth_death, generate_lattice, generate_random_connected,
    generate_spherical_tree, load_graph, save_graph, to_json as graph_to_json, validate_graph,
    BranchingFn, WeightedGraph,
};
use stocomp::metric_graph::{
    cover_permutation, cycle_cover_feasible, exit_probabilities, exit_time_moments,
    unit_vertex_weights, CycleCoverResult, StarView,
};
use stocomp::simulate::{csrw_trajectory, explosion_stats, star_walk_oracle, vsrw_trajectory};
use stocomp::volume_growth::{
    birth_death_exact, classify_growth, geometric_grid, tree_exact, BirthDeathInput,
    Classification, volume_profile,
};
use stocomp::{Error, Result};

#[derive(Parser)]
#[command(name = "stocomp", version, about = "Stochastic completeness toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph from a parametric family and write it as JSON.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Path metrics from standard edge lengths, or the intrinsic metric.
    Metric(MetricArgs),
    /// Volume-growth / exact completeness verdicts.
    Criterion(CriterionArgs),
    /// Monte Carlo explosion statistics for the VSRW (or a time change).
    Simulate(SimulateArgs),
    /// Closed-form exit law vs the discretized star-walk oracle.
    VerifyStar(VerifyStarArgs),
    /// Disjoint-cycle-cover feasibility and unit vertex weights.
    Cyclecover {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Birth-death chain pi_{n,n+1} = (n+1)^2 log_+^beta(n+1).
    BirthDeath {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Spherically symmetric tree with branching ~ n^alpha.
    Tree {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        depth: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Antitree with level sizes r(n), e.g. --r "n+1".
    Antitree {
        #[arg(long)]
        r: String,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Square lattice patch with unit weights.
    Lattice {
        #[arg(long)]
        side: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random connected graph with log-uniform weights.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        extra_edges: usize,
        #[arg(long, default_value_t = 0.1)]
        w_lo: f64,
        #[arg(long, default_value_t = 10.0)]
        w_hi: f64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MetricArgs {
    graph: PathBuf,
    /// dE | dV | dW | intrinsic
    kind: String,
    #[arg(long)]
    from: usize,
    /// Target vertex (required for the intrinsic metric).
    #[arg(long)]
    to: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Verify sqrt(2) dV <= dI <= 2 dE on every reachable pair from --from.
    #[arg(long)]
    check_bounds: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CriterionArgs {
    /// Graph JSON path (omit when using --family).
    graph: Option<PathBuf>,
    /// Metric kind for the growth fit (dE | dV | dW).
    kind: Option<String>,
    /// Smallest grid radius, or "auto".
    #[arg(long, default_value = "auto")]
    r0: String,
    #[arg(long)]
    r_max: Option<f64>,
    /// Ball center for the growth fit.
    #[arg(long, default_value_t = 0)]
    center: usize,
    /// Exact family test: birth-death | tree.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Use the exact series/threshold test for --family.
    #[arg(long)]
    exact: bool,
    /// Write the profile CSV here (growth fit only).
    #[arg(long)]
    profile_out: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    x0: usize,
    #[arg(long)]
    replicas: usize,
    #[arg(long)]
    horizon: f64,
    #[arg(long)]
    cap: usize,
    #[arg(long)]
    seed: u64,
    /// Time-change by theta = pi (constant-speed walk) and emit one
    /// trajectory instead of aggregate statistics.
    #[arg(long)]
    csrw: bool,
    /// Emit a single trajectory CSV instead of aggregate statistics.
    #[arg(long)]
    trajectory: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyStarArgs {
    #[arg(long)]
    star: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    #[arg(long)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn provenance() -> serde_json::Value {
    json!({
        "tool": "stocomp",
        "version": env!("CARGO_PKG_VERSION"),
        "argv": std::env::args().collect::<Vec<_>>(),
    })
}

fn emit(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => println!("{content}"),
    }
    Ok(())
}

fn parse_kind(s: &str) -> Result<LengthKind> {
    match s {
        "dE" | "de" => Ok(LengthKind::DE),
        "dV" | "dv" => Ok(LengthKind::DV),
        "dW" | "dw" => Ok(LengthKind::DW),
        other => Err(Error::InvalidParameter(format!(
            "unknown metric kind '{other}' (expected dE, dV, dW or intrinsic)"
        ))),
    }
}

fn checked(g: WeightedGraph) -> Result<WeightedGraph> {
    let report = validate_graph(&g);
    if report.is_valid() {
        Ok(g)
    } else {
        Err(Error::InvalidGraph(format!("{:?}", report.violations)))
    }
}

fn run_generate(family: Family) -> Result<()> {
    let (g, output) = match family {
        Family::BirthDeath { beta, n, output } => (generate_birth_death(beta, n)?, output),
        Family::Tree { alpha, depth, output } => (generate_spherical_tree(alpha, depth)?, output),
        Family::Antitree { r, n, output } => {
            let f: BranchingFn = r.parse()?;
            (generate_antitree(|k| f.eval(k), n)?, output)
        }
        Family::Lattice { side, output } => (generate_lattice(side)?, output),
        Family::Random { n, extra_edges, w_lo, w_hi, seed, output } => {
            (generate_random_connected(n, extra_edges, w_lo, w_hi, seed)?, output)
        }
    };
    let g = checked(g)?;
    match output {
        Some(p) => save_graph(&g, &p)?,
        None => println!("{}", graph_to_json(&g)),
    }
    Ok(())
}

fn run_metric(args: MetricArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    if args.kind == "intrinsic" {
        let t = args.to.ok_or_else(|| {
            Error::InvalidParameter("intrinsic metric requires --to".into())
        })?;
        let r = intrinsic_metric(&g, args.from, t, args.tol)?;
        let doc = json!({
            "provenance": provenance(),
            "from": args.from,
            "to": t,
            "value": r.value,
            "iterations": r.iterations,
            "truncation_radius": r.truncation_radius,
            "witness": r.witness,
        });
        return emit(&args.output, &serde_json::to_string_pretty(&doc)?);
    }
    let kind = parse_kind(&args.kind)?;
    let lengths = standard_lengths(&g, kind)?;
    let dm = path_metric(&g, &lengths, args.from)?;
    if args.check_bounds {
        check_metric_bounds(&g, args.from, args.tol)?;
    }
    emit(&args.output, &dm.to_csv())
}

/// Metric sandwich sqrt(2) dV <= dI <= 2 dE for every uncontaminated
/// target reachable from `s`.
fn check_metric_bounds(g: &WeightedGraph, s: usize, tol: f64) -> Result<()> {
    let dv = path_metric(g, &standard_lengths(g, LengthKind::DV)?, s)?;
    let de = path_metric(g, &standard_lengths(g, LengthKind::DE)?, s)?;
    for t in 0..g.vertex_count() {
        if t == s || g.is_frontier(t) || dv.contaminated[t] || de.contaminated[t] {
            continue;
        }
        let di = intrinsic_metric(g, s, t, tol)?.value;
        let lo = 2f64.sqrt() * dv.distance(t);
        let hi = 2.0 * de.distance(t);
        if lo > di + 1e-6 || di > hi + 1e-6 {
            return Err(Error::InvalidGraph(format!(
                "metric bound violated at target {t}: sqrt2*dV={lo:.16e} dI={di:.16e} 2*dE={hi:.16e}"
            )));
        }
    }
    Ok(())
}

fn run_criterion(args: CriterionArgs) -> Result<Classification> {
    if let Some(family) = &args.family {
        if !args.exact {
            return Err(Error::InvalidParameter(
                "--family currently implies --exact; pass a graph file for the growth fit".into(),
            ));
        }
        let verdict = match family.as_str() {
            "birth-death" => {
                let beta = args.beta.ok_or_else(|| {
                    Error::InvalidParameter("birth-death family requires --beta".into())
                })?;
                birth_death_exact(BirthDeathInput::Beta(beta))?
            }
            "tree" => {
                let alpha = args.alpha.ok_or_else(|| {
                    Error::InvalidParameter("tree family requires --alpha".into())
                })?;
                tree_exact(alpha)?
            }
            other => {
                return Err(Error::InvalidParameter(format!("unknown family '{other}'")))
            }
        };
        let doc = json!({ "provenance": provenance(), "verdict": verdict });
        emit(&args.output, &serde_json::to_string_pretty(&doc)?)?;
        return Ok(verdict.classification);
    }
    let graph = args.graph.as_ref().ok_or_else(|| {
        Error::InvalidParameter("need a graph file or --family".into())
    })?;
    let kind = parse_kind(args.kind.as_deref().unwrap_or("dV"))?;
    let g = load_graph(graph)?;
    let lengths = standard_lengths(&g, kind)?;
    let r0 = match args.r0.as_str() {
        "auto" => {
            // Smallest edge length / 2: below the first nontrivial ball.
            lengths.values.iter().copied().fold(f64::INFINITY, f64::min) / 2.0
        }
        s => s
            .parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("bad --r0 '{s}'")))?,
    };
    let r_max = args.r_max.unwrap_or(1e4);
    let grid = geometric_grid(r0, r_max, 1.1)?;
    let profile = volume_profile(&g, &lengths, args.center, &grid)?;
    if let Some(p) = &args.profile_out {
        std::fs::write(p, profile.to_csv())?;
    }
    let verdict = classify_growth(&profile)?;
    let doc = json!({
        "provenance": provenance(),
        "adaptedness": {
            "c_sup": adaptedness(&g, &lengths).c_sup,
            "c_inf": adaptedness(&g, &lengths).c_inf,
        },
        "r_trust": profile.r_trust,
        "verdict": verdict,
    });
    emit(&args.output, &serde_json::to_string_pretty(&doc)?)?;
    Ok(verdict.classification)
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    if args.trajectory || args.csrw {
        let tr = if args.csrw {
            let theta: Vec<f64> = (0..g.vertex_count())
                .map(|x| stocomp::graph_core::vertex_measure(&g, x).unwrap_or(1.0))
                .collect();
            csrw_trajectory(&g, &theta, args.x0, args.seed, args.horizon, args.cap)?
        } else {
            vsrw_trajectory(&g, args.x0, args.seed, args.horizon, args.cap)?
        };
        return emit(&args.output, &tr.to_csv());
    }
    let stats = explosion_stats(&g, args.x0, args.replicas, args.horizon, args.cap, args.seed)?;
    let doc = json!({ "provenance": provenance(), "stats": stats });
    emit(&args.output, &serde_json::to_string_pretty(&doc)?)
}

fn run_verify_star(args: VerifyStarArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.star)?;
    let star: StarView = serde_json::from_str(&text)?;
    let star = StarView::new(star.edges, star.loop_edge)?;
    let law = exit_time_moments(&star);
    let probs = exit_probabilities(&star);
    let emp = star_walk_oracle(&star, args.h, args.seed, args.replicas)?;
    let mut table = String::from("quantity,closed_form,empirical,std_error\n");
    for (j, (&p, (&q, &se))) in
        probs.iter().zip(emp.probabilities.iter().zip(&emp.prob_se)).enumerate()
    {
        table.push_str(&format!("p_{j},{p:.16e},{q:.16e},{se:.16e}\n"));
    }
    table.push_str(&format!("mean,{:.16e},{:.16e},{:.16e}\n", law.mean, emp.mean, emp.mean_se));
    table.push_str(&format!(
        "second_moment,{:.16e},{:.16e},{:.16e}\n",
        law.second_moment, emp.second_moment, emp.second_moment_se
    ));
    emit(&args.output, &table)
}

fn run_cyclecover(graph: PathBuf, output: Option<PathBuf>) -> Result<()> {
    let g = load_graph(&graph)?;
    let mut per_edge = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        let feasible = cycle_cover_feasible(&g, id)?;
        let witness = if feasible { cover_permutation(&g, id)? } else { None };
        per_edge.push(json!({
            "edge": [e.u, e.v],
            "feasible": feasible,
            "cover_permutation": witness,
        }));
    }
    let weights = match unit_vertex_weights(&g)? {
        CycleCoverResult::Feasible(c) => json!({ "feasible": true, "c": c }),
        CycleCoverResult::Infeasible { edge } => {
            json!({ "feasible": false, "witness_edge": edge })
        }
    };
    let doc = json!({
        "provenance": provenance(),
        "edges": per_edge,
        "unit_vertex_weights": weights,
    });
    emit(&output, &serde_json::to_string_pretty(&doc)?)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnknownVertex(_)
        | Error::UnknownEdge(_)
        | Error::InvalidParameter(_)
        | Error::MemoryGuard { .. }
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("SGL_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate { family } => run_generate(family).map(|()| 0u8),
        Command::Metric(args) => run_metric(args).map(|()| 0),
        Command::Criterion(args) => run_criterion(args).map(|c| match c {
            Classification::Inconclusive => 3,
            _ => 0,
        }),
        Command::Simulate(args) => run_simulate(args).map(|()| 0),
        Command::VerifyStar(args) => run_verify_star(args).map(|()| 0),
        Command::Cyclecover { graph, output } => run_cyclecover(graph, output).map(|()| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
