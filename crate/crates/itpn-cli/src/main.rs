//! Command-line front end: builds state-class graphs of `.itpn` models,
//! diffs their languages, extracts duration bounds and response times, and
//! replays random timed runs against them.
//!
//! Exit codes: 0 ok, 2 parse error, 3 bounded/truncated result, 4 oracle
//! budget exceeded, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use itpn::dot::{export_dot, DotVerbosity};
use itpn::graph::{build, BuildError, BuildOptions, Equivalence, Method, StateClassGraph};
use itpn::model::parse_model;
use itpn::net::{Net, TransId};
use itpn::quant::{self, Limits, PathQuery, TaskSpec};
use itpn::Rational;

const EXIT_PARSE: u8 = 2;
const EXIT_BOUNDED: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "itpn", about = "State-class analysis of time Petri nets with inhibitor arcs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state-class graph and report its size.
    Build(BuildCmd),
    /// Compare the untimed languages of two construction methods.
    Diff(DiffCmd),
    /// Duration bounds of a firing path measured from a recorded point.
    Bounds(BoundsCmd),
    /// Best/worst-case response time between two transitions.
    Wcrt(WcrtCmd),
    /// Random timed run of the net, optionally replayed against a graph.
    Simulate(SimulateCmd),
}

#[derive(Args)]
struct BuildCmd {
    model: PathBuf,
    #[arg(long)]
    method: Method,
    #[arg(long, default_value = "equality")]
    equiv: Equivalence,
    #[arg(long, default_value_t = 100_000)]
    max_classes: usize,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Write the graph as DOT to this file.
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long, default_value = "compact")]
    dot_verbosity: DotVerbosity,
    /// Write the stats record to this file (`-` for stdout).
    #[arg(long)]
    stats: Option<String>,
}

#[derive(Args)]
struct DiffCmd {
    model: PathBuf,
    /// Two comma-separated methods, e.g. `exact,dbm`.
    #[arg(long)]
    methods: String,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, default_value_t = 100_000)]
    max_classes: usize,
}

#[derive(Args)]
struct BoundsCmd {
    model: PathBuf,
    #[arg(long, default_value = "tdis")]
    method: Method,
    /// Comma-separated transition names from the root.
    #[arg(long)]
    path: String,
    /// Point to measure from.
    #[arg(long, default_value_t = 0)]
    from: u32,
}

#[derive(Args)]
struct WcrtCmd {
    model: PathBuf,
    #[arg(long)]
    start: String,
    #[arg(long)]
    end: String,
    #[arg(long, default_value_t = 64)]
    max_len: usize,
    #[arg(long, default_value_t = 10_000)]
    max_paths: usize,
}

#[derive(Args)]
struct SimulateCmd {
    model: PathBuf,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replay the run as a path of this method's graph.
    #[arg(long)]
    check_against: Option<Method>,
}

fn load(path: &PathBuf) -> Result<Net<Rational>, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_PARSE
    })?;
    parse_model(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_PARSE
    })
}

fn transition(net: &Net<Rational>, name: &str) -> Result<TransId, u8> {
    net.transition_by_name(name).ok_or_else(|| {
        eprintln!("error: unknown transition `{name}`");
        EXIT_PARSE
    })
}

fn build_graph(
    net: &Net<Rational>,
    opts: &BuildOptions,
) -> Result<(StateClassGraph<Rational>, u8), u8> {
    match build(net, opts) {
        Ok(g) => Ok((g, 0)),
        Err(BuildError::Bounded { partial }) => {
            eprintln!("warning: exploration bounds reached; result is partial");
            Ok((partial, EXIT_BOUNDED))
        }
        Err(BuildError::Oracle { source, .. }) => {
            eprintln!("error: {source}");
            Err(EXIT_BUDGET)
        }
    }
}

fn stats_record(graph: &StateClassGraph<Rational>) -> String {
    format!(
        "method={}\nclasses={}\nedges={}\ntime_ms={}\nequivalence={}\ntruncated={}\n",
        graph.method.name(),
        graph.stats.classes,
        graph.stats.edges,
        graph.stats.wall_ms,
        graph.equivalence.name(),
        graph.stats.truncated,
    )
}

fn run_build(cmd: &BuildCmd) -> Result<u8, u8> {
    let net = load(&cmd.model)?;
    let opts = BuildOptions {
        method: cmd.method,
        equivalence: cmd.equiv,
        max_classes: cmd.max_classes,
        max_depth: cmd.max_depth.unwrap_or(usize::MAX),
        ..Default::default()
    };
    let (graph, status) = build_graph(&net, &opts)?;
    let record = stats_record(&graph);
    match cmd.stats.as_deref() {
        Some("-") => print!("{record}"),
        Some(path) => std::fs::write(path, &record).map_err(|e| {
            eprintln!("error: cannot write {path}: {e}");
            1u8
        })?,
        None => print!("{record}"),
    }
    if let Some(path) = &cmd.dot {
        let dot = export_dot(&net, &graph, cmd.dot_verbosity);
        std::fs::write(path, dot).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            1u8
        })?;
    }
    Ok(status)
}

fn run_diff(cmd: &DiffCmd) -> Result<u8, u8> {
    let net = load(&cmd.model)?;
    let (a, b) = cmd.methods.split_once(',').ok_or_else(|| {
        eprintln!("error: --methods expects two comma-separated methods");
        EXIT_PARSE
    })?;
    let parse_method = |s: &str| -> Result<Method, u8> {
        s.trim().parse().map_err(|e| {
            eprintln!("error: {e}");
            EXIT_PARSE
        })
    };
    let ma = parse_method(a)?;
    let mb = parse_method(b)?;
    let mut status = 0u8;
    let mut graphs = Vec::new();
    for m in [ma, mb] {
        let opts = BuildOptions {
            max_classes: cmd.max_classes,
            max_depth: cmd.depth,
            ..BuildOptions::method(m)
        };
        // a depth-limited graph still holds every sequence up to the diff
        // depth; only the class cap makes the comparison incomplete
        let g = match build(&net, &opts) {
            Ok(g) => g,
            Err(BuildError::Bounded { partial }) => {
                if partial.stats.classes >= cmd.max_classes {
                    eprintln!("warning: class cap reached; diff may be incomplete");
                    status = status.max(EXIT_BOUNDED);
                }
                partial
            }
            Err(BuildError::Oracle { source, .. }) => {
                eprintln!("error: {source}");
                return Err(EXIT_BUDGET);
            }
        };
        graphs.push(g);
    }
    let report = itpn::graph::diff_graphs(&graphs[0], &graphs[1], cmd.depth);
    let show = |tag: &str, seqs: &[Vec<TransId>]| {
        for seq in seqs {
            let names: Vec<&str> = seq.iter().map(|&t| net.transition_name(t)).collect();
            println!("only {}: {}", tag, names.join(","));
        }
    };
    show(ma.name(), &report.only_in_first);
    show(mb.name(), &report.only_in_second);
    if report.is_empty() {
        println!("languages identical to depth {}", cmd.depth);
    }
    Ok(status)
}

fn run_bounds(cmd: &BoundsCmd) -> Result<u8, u8> {
    let net = load(&cmd.model)?;
    if cmd.method != Method::Tdis {
        eprintln!("error: bounds requires --method tdis");
        return Err(EXIT_PARSE);
    }
    let labels = cmd
        .path
        .split(',')
        .map(|n| transition(&net, n.trim()))
        .collect::<Result<Vec<_>, u8>>()?;
    let (graph, status) = build_graph(&net, &BuildOptions::method(Method::Tdis))?;
    let query = PathQuery { start: 0, transitions: labels, origin: cmd.from };
    match quant::path_duration_bounds(&net, &graph, &query) {
        Ok((lo, hi)) => {
            println!("[{lo}, {hi}]");
            Ok(status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(1)
        }
    }
}

fn run_wcrt(cmd: &WcrtCmd) -> Result<u8, u8> {
    let net = load(&cmd.model)?;
    let task = TaskSpec {
        start: transition(&net, &cmd.start)?,
        end: transition(&net, &cmd.end)?,
    };
    let (graph, mut status) = build_graph(&net, &BuildOptions::method(Method::Tdis))?;
    let limits = Limits { max_paths: cmd.max_paths, max_len: cmd.max_len };
    match quant::response_time(&net, &graph, task, limits) {
        Ok(rt) => {
            println!("bcrt={}", rt.bcrt);
            println!("wcrt={}", rt.wcrt);
            println!("windows={}", rt.windows);
            println!("truncated={}", rt.truncated);
            if rt.truncated {
                status = status.max(EXIT_BOUNDED);
            }
            Ok(status)
        }
        Err(quant::QuantError::NoPath { start, end }) => {
            println!("no path fires `{start}` and later `{end}`");
            Ok(status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(1)
        }
    }
}

fn run_simulate(cmd: &SimulateCmd) -> Result<u8, u8> {
    let net = load(&cmd.model)?;
    let run = itpn::sim::random_run(&net, cmd.steps, cmd.seed);
    for (t, delay) in &run.steps {
        println!("{} {}", net.transition_name(*t), delay);
    }
    if run.deadlocked {
        println!("deadlocked after {} steps", run.steps.len());
    }
    if let Some(method) = cmd.check_against {
        let (graph, status) = build_graph(&net, &BuildOptions::method(method))?;
        let labels: Vec<TransId> = run.steps.iter().map(|(t, _)| *t).collect();
        if graph.contains_path(&labels) {
            println!("replay ok in {} graph", method.name());
            Ok(status)
        } else {
            eprintln!("error: run is not a path of the {} graph", method.name());
            Err(1)
        }
    } else {
        Ok(0)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(cmd) => run_build(cmd),
        Command::Diff(cmd) => run_diff(cmd),
        Command::Bounds(cmd) => run_bounds(cmd),
        Command::Wcrt(cmd) => run_wcrt(cmd),
        Command::Simulate(cmd) => run_simulate(cmd),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(code) => ExitCode::from(code),
    }
}
