//! `dcgraph`: structure recognition, convexity checks, steepest-descent
//! minimization, and the 0-extension / multiway-cut solvers, driven by JSON
//! instance files.
//!
//! Exit codes: 0 on success, 1 when a check or comparison fails, 2 on
//! malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use dcgraph_core::graph::{complete_graph, OrientedGraph, SubdivisionMap};
use dcgraph_core::io::{
    cut_from_json, fn_from_json, graph_from_json, poset_from_json, trace_to_json,
    values_from_json, zero_ext_from_json,
};
use dcgraph_core::lconvex::{
    is_l_convex, iteration_bound_report, sda_minimize, ProductSpace,
    SumFn, TupleIter, BRUTE_FORCE_BUDGET, LOCAL_STEP_BUDGET,
};
use dcgraph_core::midpoint::{alternating_grid, linear_grid};
use dcgraph_core::rational::{rat_int, ExtRat, Rat};
use dcgraph_core::semilattice::Semilattice;
use dcgraph_core::solver::{
    solve_multiway_cut, solve_zero_ext_brute, solve_zero_ext_sda,
    CutInstance,
};
use dcgraph_core::submodular::{is_submodular, Valuation};

#[derive(Parser)]
#[command(name = "dcgraph", about = "discrete convexity toolkit", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Recognize the structure of a graph file (modular, swm, orientable).
    Verify { file: PathBuf },
    /// Check a function table over a modular semilattice for submodularity.
    #[command(name = "check-submodular")]
    CheckSubmodular {
        /// Function file with a "domain" poset and "values".
        func: PathBuf,
        /// Optional valuation file (defaults to the rank valuation).
        valuation: Option<PathBuf>,
    },
    /// Check a function on an oriented modular graph for L-convexity.
    #[command(name = "check-lconvex")]
    CheckLconvex { graph: PathBuf, func: PathBuf },
    /// Minimize an L-convex function by steepest descent.
    Minimize {
        graph: PathBuf,
        func: PathBuf,
        /// Start vertex: an index, a vertex name, or a tuple like "0,0".
        #[arg(long)]
        start: Option<String>,
        /// Write the descent trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Solve a minimum 0-extension instance by relaxation + descent.
    #[command(name = "solve-0ext")]
    Solve0Ext { instance: PathBuf },
    /// Solve a multiway cut instance by relaxation + persistency rounding.
    #[command(name = "solve-multiway-cut")]
    SolveMultiwayCut { instance: PathBuf },
    /// Benchmark descent on a named family; emits CSV.
    #[command(name = "bench-sda")]
    BenchSda {
        /// One of: linear_grid, alternating_grid, k3_star.
        family: String,
        /// Number of (function, start) samples.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Base RNG seed; runs are deterministic given this.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Brute-force oracle for a 0-extension or cut instance; without
    /// --brute, also runs the solver and compares.
    Oracle {
        instance: PathBuf,
        /// Print only the brute-force optimum.
        #[arg(long)]
        brute: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("{} is not valid JSON: {e}", path.display()))?)
}

/// Writes atomically: temp file in the same directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Verify { file } => verify(&file),
        Cmd::CheckSubmodular { func, valuation } => check_submodular(&func, valuation.as_deref()),
        Cmd::CheckLconvex { graph, func } => check_lconvex(&graph, &func),
        Cmd::Minimize { graph, func, start, trace } => {
            minimize(&graph, &func, start.as_deref(), trace.as_deref())
        }
        Cmd::Solve0Ext { instance } => solve_0ext(&instance),
        Cmd::SolveMultiwayCut { instance } => solve_cut(&instance),
        Cmd::BenchSda { family, seeds, seed } => bench_sda(&family, seeds, seed),
        Cmd::Oracle { instance, brute } => oracle(&instance, brute),
    }
}

fn verify(file: &Path) -> anyhow::Result<ExitCode> {
    let g = graph_from_json(&load_json(file)?)?;
    println!("vertices: {}", g.len());
    println!("edges: {}", g.edges().len());
    println!("edge_length: {}", g.edge_length());
    let modular = g.is_modular_graph();
    println!("modular: {modular}");
    println!("swm: {}", g.is_swm()?);
    let oriented = g.is_oriented();
    let orientable = if oriented {
        true
    } else {
        modular && g.clone().orient().is_ok()
    };
    println!("orientable: {orientable}");
    println!("oriented: {oriented}");
    if oriented {
        println!("well_oriented: {}", g.is_well_oriented());
    }
    Ok(ExitCode::SUCCESS)
}

fn check_submodular(func: &Path, valuation: Option<&Path>) -> anyhow::Result<ExitCode> {
    let v = load_json(func)?;
    let domain = v
        .get("domain")
        .ok_or_else(|| anyhow::anyhow!("function file needs a \"domain\" poset"))?;
    let poset = poset_from_json(domain)?;
    let lattice = Semilattice::new(poset)
        .map_err(|e| anyhow::anyhow!("domain is not a modular semilattice: {e:?}"))?;
    let f = values_from_json(&v, lattice.len(), |i| lattice.poset().name(i).to_owned())?;
    let val = match valuation {
        None => Valuation::rank(&lattice),
        Some(path) => {
            let vv = load_json(path)?;
            let values = values_from_json(&vv, lattice.len(), |i| {
                lattice.poset().name(i).to_owned()
            })?;
            let values: Vec<Rat> = values
                .into_iter()
                .map(|x| match x {
                    ExtRat::Finite(r) => Ok(r),
                    ExtRat::Inf => Err(anyhow::anyhow!("valuations must be finite")),
                })
                .collect::<Result<_, _>>()?;
            let val = Valuation { values };
            if let Some(w) = val.validate(&lattice) {
                anyhow::bail!("not a valid valuation: {w:?}");
            }
            val
        }
    };
    match is_submodular(&lattice, &f, &val) {
        None => {
            println!("submodular: true");
            Ok(ExitCode::SUCCESS)
        }
        Some((p, q)) => {
            println!("submodular: false");
            println!(
                "violated at p={} q={}",
                lattice.poset().name(p),
                lattice.poset().name(q)
            );
            Ok(ExitCode::from(1))
        }
    }
}

fn check_lconvex(graph: &Path, func: &Path) -> anyhow::Result<ExitCode> {
    let g = graph_from_json(&load_json(graph)?)?;
    let f = fn_from_json(&load_json(func)?, &g)?;
    match is_l_convex(&g, &f)? {
        None => {
            println!("l_convex: true");
            Ok(ExitCode::SUCCESS)
        }
        Some(w) => {
            println!("l_convex: false");
            println!("witness: {w:?}");
            Ok(ExitCode::from(1))
        }
    }
}

fn resolve_vertex(g: &OrientedGraph, spec: &str) -> anyhow::Result<usize> {
    if let Some(i) = (0..g.len()).find(|&i| g.name(i) == spec) {
        return Ok(i);
    }
    // Tuple shorthand: "0,1" matches the product vertex named "(0,1)".
    let wrapped = format!("({spec})");
    if let Some(i) = (0..g.len()).find(|&i| g.name(i) == wrapped) {
        return Ok(i);
    }
    spec.parse::<usize>()
        .ok()
        .filter(|&i| i < g.len())
        .ok_or_else(|| anyhow::anyhow!("unknown start vertex \"{spec}\""))
}

fn minimize(
    graph: &Path,
    func: &Path,
    start: Option<&str>,
    trace_out: Option<&Path>,
) -> anyhow::Result<ExitCode> {
    let g = graph_from_json(&load_json(graph)?)?;
    let f = fn_from_json(&load_json(func)?, &g)?;
    let start = match start {
        Some(s) => resolve_vertex(&g, s)?,
        None => f
            .iter()
            .position(ExtRat::is_finite)
            .ok_or_else(|| anyhow::anyhow!("function is infinite everywhere"))?,
    };
    if !f[start].is_finite() {
        anyhow::bail!("start vertex {} is outside the domain", g.name(start));
    }
    let space = ProductSpace::single(&g)?;
    let sum = SumFn::dense(&space, f);
    let trace = sda_minimize(&space, &sum, &[start], LOCAL_STEP_BUDGET)?;
    let report = iteration_bound_report(&space, &sum, &trace, BRUTE_FORCE_BUDGET)?;
    let opt = trace.terminal()[0];
    println!("optimum: {}", trace.values.last().unwrap());
    println!("argmin: {}", g.name(opt));
    println!("N: {}", trace.moves);
    println!("d_delta: {}", report.d_delta);
    println!("bound_ok: {}", report.bound_ok);
    println!("exact_case: {}", report.exact_case);
    if report.lifted {
        // The bound audit reran the descent on the subdivision; its step
        // count is the one d_delta refers to.
        println!("audited_on: subdivision");
        println!("audited_N: {}", report.n);
    }
    if let Some(path) = trace_out {
        write_atomic(path, &serde_json::to_string_pretty(&trace_to_json(&trace))?)?;
    }
    Ok(if report.bound_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn tuple_name(x: &[usize]) -> String {
    x.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn solve_0ext(instance: &Path) -> anyhow::Result<ExitCode> {
    let inst = zero_ext_from_json(&load_json(instance)?)?;
    let sol = solve_zero_ext_sda(&inst)?;
    println!("value: {}", sol.value);
    println!("x: {}", tuple_name(&sol.x));
    println!("y: {}", tuple_name(&sol.y));
    println!("relaxed_value: {}", sol.relaxed_value);
    println!("iterations: {}", sol.trace.moves);
    println!("iteration_bound: {}", sol.iteration_bound);
    Ok(ExitCode::SUCCESS)
}

fn solve_cut(instance: &Path) -> anyhow::Result<ExitCode> {
    let cut = cut_from_json(&load_json(instance)?)?;
    let sol = solve_multiway_cut(&cut)?;
    println!("cut_value: {}", sol.cut_value);
    println!(
        "labeling: {}",
        sol.labeling
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    let edges: Vec<String> = sol.cut_edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
    println!("cut_edges: {}", edges.join(" "));
    println!("relaxed_value: {}", sol.relaxed_value);
    Ok(ExitCode::SUCCESS)
}

fn cut_brute(cut: &CutInstance) -> anyhow::Result<Rat> {
    let k = cut.terminals.len();
    let states = k
        .checked_pow(cut.n_nodes as u32)
        .filter(|&s| s <= BRUTE_FORCE_BUDGET)
        .ok_or_else(|| anyhow::anyhow!("too many labelings to enumerate"))?;
    let _ = states;
    let mut best: Option<Rat> = None;
    for labeling in TupleIter::new(vec![k; cut.n_nodes]) {
        if (0..k).any(|t| labeling[cut.terminals[t]] != t) {
            continue;
        }
        let value: Rat = cut
            .edges
            .iter()
            .filter(|&&(u, v, _)| labeling[u] != labeling[v])
            .map(|(_, _, w)| w.clone())
            .sum();
        if best.as_ref().is_none_or(|b| value < *b) {
            best = Some(value);
        }
    }
    best.ok_or_else(|| anyhow::anyhow!("no feasible labeling"))
}

fn oracle(instance: &Path, brute_only: bool) -> anyhow::Result<ExitCode> {
    let v = load_json(instance)?;
    if v.get("terminals").is_some() {
        let cut = cut_from_json(&v)?;
        let brute = cut_brute(&cut)?;
        println!("brute_value: {brute}");
        if brute_only {
            return Ok(ExitCode::SUCCESS);
        }
        let sol = solve_multiway_cut(&cut)?;
        println!("solver_value: {}", sol.cut_value);
        return Ok(if sol.cut_value == brute {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    let inst = zero_ext_from_json(&v)?;
    let (x, brute) = solve_zero_ext_brute(&inst, BRUTE_FORCE_BUDGET)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    println!("brute_value: {brute}");
    println!("brute_argmin: {}", tuple_name(&x));
    if brute_only {
        return Ok(ExitCode::SUCCESS);
    }
    let sol = solve_zero_ext_sda(&inst)?;
    println!("solver_value: {}", sol.value);
    Ok(if sol.value == brute { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// A random L-convex sample: a positive combination of vertex distance
/// functions on the product graph.
fn random_distance_sum(
    space: &ProductSpace,
    graph: &OrientedGraph,
    rng: &mut ChaCha8Rng,
) -> SumFn {
    let n = graph.len();
    let anchors = rng.gen_range(1..=3);
    let picks: Vec<(usize, Rat)> = (0..anchors)
        .map(|_| (rng.gen_range(0..n), rat_int(rng.gen_range(1..=4))))
        .collect();
    let values: Vec<ExtRat> = (0..n)
        .map(|u| {
            let mut t = rat_int(0);
            for (a, w) in &picks {
                t += w * graph.metric_dist(u, *a);
            }
            ExtRat::Finite(t)
        })
        .collect();
    SumFn::dense(space, values)
}

fn bench_space(family: &str) -> anyhow::Result<ProductSpace> {
    match family {
        "linear_grid" => {
            let p = linear_grid(2, (0, 5)).map_err(|e| anyhow::anyhow!("{e}"))?;
            Ok(ProductSpace::new(p.factors().to_vec())?)
        }
        "alternating_grid" => {
            let p = alternating_grid(2, (0, 6)).map_err(|e| anyhow::anyhow!("{e}"))?;
            Ok(ProductSpace::new(p.factors().to_vec())?)
        }
        "k3_star" => {
            let star = SubdivisionMap::new(&complete_graph(3))?.star;
            Ok(ProductSpace::new(vec![star.clone(), star])?)
        }
        other => anyhow::bail!("unknown family \"{other}\" (try linear_grid, alternating_grid, k3_star)"),
    }
}

fn bench_sda(family: &str, seeds: u64, base_seed: u64) -> anyhow::Result<ExitCode> {
    let space = bench_space(family)?;
    let graph = space.graph();
    println!("family,seed,n,start,dDelta,N,bound_ok,exact_case");
    for s in 0..seeds {
        let seed = base_seed + s;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_distance_sum(&space, &graph, &mut rng);
        let start: Vec<usize> = space
            .sizes()
            .iter()
            .map(|&k| rng.gen_range(0..k))
            .collect();
        let trace = sda_minimize(&space, &g, &start, LOCAL_STEP_BUDGET)?;
        let report = iteration_bound_report(&space, &g, &trace, BRUTE_FORCE_BUDGET)?;
        let start_str: Vec<String> = start.iter().map(usize::to_string).collect();
        println!(
            "{family},{seed},{n},\"{start}\",{d},{moves},{bound},{exact}",
            n = space.dim(),
            start = start_str.join(","),
            d = report.d_delta,
            moves = trace.moves,
            bound = report.bound_ok,
            exact = report.exact_case,
        );
    }
    Ok(ExitCode::SUCCESS)
}
