use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use forestpack::connectivity::{constrained_min_cut, min_terminal_separating_cut, steiner_connectivity};
use forestpack::counterexample::{
    bottleneck_certificate, build_lau_counterexample, check_condition2, check_neighborhood_condition,
    exhaustive_refute, CounterexampleParams,
};
use forestpack::io::{load_graph, save_graph};
use forestpack::kg_family::{audit_kg, check_treepacking_hypotheses, make_parity_g, DEFAULT_AUDIT_BOUND};
use forestpack::packing::{
    decompose_and_pack, exact_pack, pack_spanning_trees, verify_packing, BaseSolver, DecomposeConfig,
    EdgeSubpartition, PackOptions, Packing, SpanningOutcome,
};
use forestpack::sweep::{run_sweep, SweepConfig};
use forestpack::transforms::{all_pairs_connectivity, mader_split};
use forestpack::{EdgeId, EdgeSet, TerminalSystem, VertexId, VertexSet};

/// Largest `Q * k` for which `counterexample --refute` runs the search.
const REFUTE_MAX_QK: usize = 15;

#[derive(Parser)]
#[command(name = "forestpack", version, about = "Steiner tree and forest packing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steiner connectivity, terminal-separating or constrained minimum cut.
    Cut(CutArgs),
    /// Pack k edge-disjoint classes connecting every terminal group.
    Pack(PackArgs),
    /// Split off a pair of edges at a vertex, preserving local connectivity.
    Split(SplitArgs),
    /// Audit the (k,g)-family functional over admissible partitions.
    Kgcheck(KgArgs),
    /// Build and check the extension counterexample.
    Counterexample(CounterexampleArgs),
    /// Seeded sweep of random instances, written as CSV.
    Sweep(SweepArgs),
    /// Re-verify a packing stored in a pack report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CutArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Group indices to consider (default: all groups).
    #[arg(long, value_delimiter = ',')]
    groups: Vec<usize>,
    /// Seed sets `a1,a2:b1,b2` kept on opposite sides.
    #[arg(long)]
    constrain: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Exact,
    Spanning,
    Decompose,
}

#[derive(Args)]
struct PackArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    /// Prescribed labels at a vertex: `v:edge=label,...` with labels in 1..=k.
    #[arg(long)]
    extend: Option<String>,
    /// Vertices whose induced subpartitions must be balanced.
    #[arg(long, value_delimiter = ',')]
    balance: Vec<u64>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Search-node budget (0 = unlimited).
    #[arg(long, env = "FORESTPACK_BUDGET", default_value_t = 1_000_000)]
    budget: u64,
    /// Degree multiplier for the decompose driver.
    #[arg(long, default_value_t = 36)]
    q: usize,
    /// Base solver for the decompose driver.
    #[arg(long, value_enum, default_value = "exact")]
    base: Base,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    Exact,
    Spanning,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    vertex: u64,
    /// Write the split graph to this file.
    #[arg(long)]
    graph_out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct KgArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    /// Edges deleted before the audit.
    #[arg(long, value_delimiter = ',')]
    deleted: Vec<u64>,
    /// Largest vertex count the enumeration accepts.
    #[arg(long, default_value_t = DEFAULT_AUDIT_BOUND)]
    bound: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long = "Q", short = 'Q', default_value_t = 30)]
    q: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Raise |Y| to k - 1 so the instance becomes extendable.
    #[arg(long)]
    control: bool,
    /// Run the exhaustive search (small Q * k only).
    #[arg(long)]
    refute: bool,
    #[arg(long, env = "FORESTPACK_BUDGET", default_value_t = 0)]
    budget: u64,
    /// Write the generated graph to this file.
    #[arg(long)]
    graph_out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    n_min: usize,
    #[arg(long, default_value_t = 7)]
    n_max: usize,
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    #[arg(long, default_value_t = 1)]
    t: usize,
    /// Vertices per group; 0 with t = 1 makes every vertex a terminal.
    #[arg(long, default_value_t = 0)]
    group_size: usize,
    #[arg(long, default_value_t = 1)]
    k_min: usize,
    #[arg(long, default_value_t = 2)]
    k_max: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, env = "FORESTPACK_BUDGET", default_value_t = 200_000)]
    budget: u64,
    #[arg(long, default_value_t = 9)]
    q: usize,
    /// CSV output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary CSV comparing against the 2k, 9k and 36k lines.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// A report written by `pack`.
    #[arg(long)]
    report: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Done,
    Feasible,
    Infeasible,
    Timeout,
}

impl Verdict {
    fn from_str(s: &str) -> Self {
        match s {
            "FEASIBLE" => Verdict::Feasible,
            "INFEASIBLE" => Verdict::Infeasible,
            "TIMEOUT" => Verdict::Timeout,
            _ => Verdict::Done,
        }
    }

    fn code(self) -> ExitCode {
        match self {
            Verdict::Done | Verdict::Feasible => ExitCode::SUCCESS,
            Verdict::Infeasible => ExitCode::from(2),
            Verdict::Timeout => ExitCode::from(3),
        }
    }
}

/// Stored by `pack` and read back by `verify`.
#[derive(Serialize, Deserialize)]
struct PackReport {
    mode: String,
    k: usize,
    verdict: String,
    options: PackOptions,
    packing: Option<Packing>,
    checks: Option<Value>,
    details: Value,
}

fn emit(out: &Output, report: &impl Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match &out.out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => print_stdout(&(text + "\n"))?,
    }
    Ok(())
}

// Writes to stdout, treating a closed pipe as success.
fn print_stdout(text: &str) -> anyhow::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn load(path: &Path) -> anyhow::Result<(forestpack::MultiGraph, TerminalSystem)> {
    load_graph(path).with_context(|| format!("loading {}", path.display()))
}

fn vertex_list(s: &str) -> anyhow::Result<VertexSet> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| Ok(VertexId(t.trim().parse().with_context(|| format!("bad vertex `{t}`"))?)))
        .collect()
}

fn parse_extend(g: &forestpack::MultiGraph, k: usize, spec: &str) -> anyhow::Result<EdgeSubpartition> {
    let (v, labels) = spec.split_once(':').unwrap_or((spec, ""));
    let at = VertexId(v.trim().parse().with_context(|| format!("bad vertex `{v}`"))?);
    let mut pairs = Vec::new();
    for item in labels.split(',').filter(|t| !t.is_empty()) {
        let (e, l) = item.split_once('=').with_context(|| format!("expected edge=label, got `{item}`"))?;
        pairs.push((EdgeId(e.trim().parse()?), l.trim().parse::<usize>()?));
    }
    Ok(EdgeSubpartition::from_labels(g, at, k, pairs)?)
}

fn cmd_cut(a: CutArgs) -> anyhow::Result<Verdict> {
    let (g, ts) = load(&a.graph)?;
    let report = if let Some(c) = &a.constrain {
        let (sa, sb) = c.split_once(':').context("--constrain expects A:B")?;
        let (value, cert) = constrained_min_cut(&g, &vertex_list(sa)?, &vertex_list(sb)?)?;
        json!({ "kind": "constrained", "value": value, "cut": cert })
    } else {
        let idx: Vec<usize> = if a.groups.is_empty() { (0..ts.groups.len()).collect() } else { a.groups.clone() };
        let mut groups = Vec::new();
        for &i in &idx {
            groups.push(ts.groups.get(i).with_context(|| format!("no group {i}"))?.clone());
        }
        match groups.len() {
            0 => bail!("the graph has no terminal groups"),
            1 => {
                let (value, cert) = steiner_connectivity(&g, &groups[0])?;
                json!({ "kind": "steiner", "group": idx[0], "value": value, "cut": cert })
            }
            _ => {
                let sub = TerminalSystem::new(groups, VertexSet::new());
                let (value, cert, split) = min_terminal_separating_cut(&g, &sub)?;
                let side_a: Vec<usize> = split.side_a.iter().map(|&j| idx[j]).collect();
                let side_b: Vec<usize> = split.side_b.iter().map(|&j| idx[j]).collect();
                json!({ "kind": "terminal_separating", "value": value, "cut": cert,
                        "groups_a": side_a, "groups_b": side_b })
            }
        }
    };
    emit(&a.output, &report)?;
    Ok(Verdict::Done)
}

fn cmd_pack(a: PackArgs) -> anyhow::Result<Verdict> {
    let (g, ts) = load(&a.graph)?;
    let mut opts = PackOptions::with_budget(a.budget);
    if let Some(spec) = &a.extend {
        opts.extend = Some(parse_extend(&g, a.k, spec)?);
    }
    opts.balance = a.balance.iter().map(|&v| VertexId(v)).collect();
    let (verdict, packing, details) = match a.mode {
        Mode::Exact => {
            let (out, stats) = exact_pack(&g, &ts, a.k, &opts)?;
            (out.verdict().to_string(), out.packing().cloned(), json!({ "nodes": stats.nodes }))
        }
        Mode::Spanning => {
            if opts.extend.is_some() || !opts.balance.is_empty() {
                bail!("spanning mode takes no --extend or --balance");
            }
            match pack_spanning_trees(&g, a.k)? {
                SpanningOutcome::Trees(p) => ("FEASIBLE".to_string(), Some(p), Value::Null),
                SpanningOutcome::Infeasible { partition, crossing } => (
                    "INFEASIBLE".to_string(),
                    None,
                    json!({ "partition": partition, "crossing": crossing }),
                ),
            }
        }
        Mode::Decompose => {
            if opts.extend.is_some() || !opts.balance.is_empty() {
                bail!("decompose mode takes no --extend or --balance");
            }
            let base = match a.base {
                Base::Exact => BaseSolver::Exact,
                Base::Spanning => BaseSolver::Spanning,
            };
            let cfg = DecomposeConfig { q: a.q, base, budget: a.budget, ..DecomposeConfig::default() };
            let out = decompose_and_pack(&g, &ts, a.k, &cfg)?;
            // a driver failure is not a proof of infeasibility
            let verdict = if out.packing().is_some() { "FEASIBLE" } else { "FAIL" };
            (verdict.to_string(), out.packing().cloned(), serde_json::to_value(&out)?)
        }
    };
    let checks = match &packing {
        Some(p) => Some(serde_json::to_value(verify_packing(&g, &ts, p, &opts))?),
        None => None,
    };
    let report = PackReport {
        mode: serde_json::to_value(a.mode)?.as_str().unwrap_or_default().to_string(),
        k: a.k,
        verdict: verdict.clone(),
        options: opts,
        packing,
        checks,
        details,
    };
    emit(&a.output, &report)?;
    Ok(if verdict == "FAIL" { Verdict::Infeasible } else { Verdict::from_str(&verdict) })
}

fn cmd_split(a: SplitArgs) -> anyhow::Result<Verdict> {
    let (g, ts) = load(&a.graph)?;
    let x = VertexId(a.vertex);
    let (h, rec) = mader_split(&g, x)?;
    let others: Vec<VertexId> = g.vertices().filter(|&v| v != x).collect();
    let preserved = all_pairs_connectivity(&g, &others)? == all_pairs_connectivity(&h, &others)?;
    if let Some(p) = &a.graph_out {
        save_graph(p, &h, &ts)?;
    }
    emit(&a.output, &json!({ "split": rec, "connectivity_preserved": preserved }))?;
    Ok(Verdict::Done)
}

fn cmd_kgcheck(a: KgArgs) -> anyhow::Result<Verdict> {
    let (g, ts) = load(&a.graph)?;
    let s = ts.terminals();
    let t: EdgeSet = a.deleted.iter().map(|&e| EdgeId(e)).collect();
    let hyp = check_treepacking_hypotheses(&g, &s, &t, a.k);
    let mut h = g.clone();
    for &e in &t {
        h.remove_edge(e)?;
    }
    let pf = make_parity_g(&h, &s);
    let audit = audit_kg(&h, &s, &pf, a.k, a.bound)?;
    emit(
        &a.output,
        &json!({
            "k": a.k,
            "hypotheses": hyp,
            "hypotheses_passed": hyp.passed(),
            "min_value": audit.min_value,
            "argmin": audit.argmin,
            "partitions": audit.partitions,
        }),
    )?;
    Ok(Verdict::Done)
}

fn cmd_counterexample(a: CounterexampleArgs) -> anyhow::Result<Verdict> {
    let mut params = CounterexampleParams::new(a.q, a.k, a.seed);
    if a.control {
        params = params.control();
    }
    let inst = build_lau_counterexample(params)?;
    if let Some(p) = &a.graph_out {
        save_graph(p, &inst.graph, &inst.terminal_system())?;
    }
    let bottleneck = bottleneck_certificate(&inst)?;
    let mut verdict = Verdict::Done;
    let refute = if !a.refute {
        Value::Null
    } else if inst.qk() > REFUTE_MAX_QK {
        json!({ "skipped": format!("Q*k = {} exceeds {}", inst.qk(), REFUTE_MAX_QK) })
    } else {
        let (out, stats) = exhaustive_refute(&inst, a.budget)?;
        verdict = Verdict::from_str(out.verdict());
        json!({ "verdict": out.verdict(), "nodes": stats.nodes })
    };
    emit(
        &a.output,
        &json!({
            "params": inst.params,
            "below_stated_range": inst.below_stated_range,
            "vertices": inst.graph.vertex_count(),
            "edges": inst.graph.edge_count(),
            "structural_violations": inst.structural_violations(),
            "neighborhood_condition": check_neighborhood_condition(&inst),
            "condition2": check_condition2(&inst)?,
            "bottleneck": bottleneck,
            "refute": refute,
        }),
    )?;
    Ok(verdict)
}

fn cmd_sweep(a: SweepArgs) -> anyhow::Result<Verdict> {
    let cfg = SweepConfig {
        seed: a.seed,
        n_min: a.n_min,
        n_max: a.n_max,
        density: a.density,
        t: a.t,
        group_size: a.group_size,
        k_min: a.k_min,
        k_max: a.k_max,
        trials: a.trials,
        budget: a.budget,
        decompose: DecomposeConfig { q: a.q, budget: a.budget, ..DecomposeConfig::default() },
    };
    let rep = run_sweep(&cfg)?;
    match &a.out {
        Some(p) => std::fs::write(p, rep.to_csv())?,
        None => print_stdout(&rep.to_csv())?,
    }
    match &a.summary {
        Some(p) => std::fs::write(p, rep.summary_csv())?,
        None => eprint!("{}", rep.summary_csv()),
    }
    Ok(Verdict::Done)
}

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<Verdict> {
    let (g, ts) = load(&a.graph)?;
    let text = std::fs::read_to_string(&a.report).with_context(|| format!("reading {}", a.report.display()))?;
    let rep: PackReport = serde_json::from_str(&text).context("parsing pack report")?;
    let packing = rep.packing.context("report holds no packing")?;
    let checks = verify_packing(&g, &ts, &packing, &rep.options);
    let passed = checks.passed();
    emit(&a.output, &json!({ "passed": passed, "checks": checks }))?;
    Ok(if passed { Verdict::Feasible } else { Verdict::Infeasible })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Cut(a) => cmd_cut(a),
        Command::Pack(a) => cmd_pack(a),
        Command::Split(a) => cmd_split(a),
        Command::Kgcheck(a) => cmd_kgcheck(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match res {
        Ok(v) => v.code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
