use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use selfstab::algorithms::{AlgorithmId, AlgorithmRegistry};
use selfstab::chart::{emit_chart, XAxis};
use selfstab::engine::{DaemonKind, InitPreset, Simulator};
use selfstab::experiment::{
    derive_seed, emit_csv, emit_summary_csv, load_csv, run_experiment, summarize, ExperimentSpec, MoveCapPolicy,
};
use selfstab::formats::{read_graph, read_states, write_graph, write_state_file, write_trace_file};
use selfstab::verifier::Property;
use selfstab::{gen_random_graph, GraphGenSpec};

/// Simulate and verify self-stabilizing independent-set algorithms.
#[derive(Parser)]
#[command(name = "selfstab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a G(n, p) graph and write it as an edge list.
    Gen(GenArgs),
    /// Run one algorithm to a fixpoint (or to the move cap).
    Run(RunArgs),
    /// Check a state file against a set property.
    Verify(VerifyArgs),
    /// Sweep sizes x densities x trials and write per-trial rows.
    Experiment(ExperimentArgs),
    /// Render an SVG chart of mean cardinality from an experiment CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    /// md2is | mis | mis-id
    #[arg(long, default_value = "md2is")]
    algo: AlgorithmId,
    /// central-random | central-adversarial:NAME | distributed:Q | synchronous
    #[arg(long, default_value = "central-random")]
    daemon: DaemonKind,
    /// all-out | all-in | random:P
    #[arg(long, default_value = "random:0.5")]
    init: InitPreset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to 2n+1 (central) or 10n (subset daemons).
    #[arg(long)]
    move_cap: Option<u64>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    final_state: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    state: PathBuf,
    /// d2is | mis
    #[arg(long, default_value = "d2is")]
    property: Property,
}

#[derive(Args)]
struct ExperimentArgs {
    /// A:B:STEP, inclusive, or a single size
    #[arg(long, value_parser = parse_sizes)]
    sizes: Sizes,
    #[arg(long, value_delimiter = ',', required = true)]
    densities: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "md2is,mis")]
    algos: Vec<AlgorithmId>,
    #[arg(long, default_value = "central-random")]
    daemon: DaemonKind,
    #[arg(long, default_value = "random:0.5")]
    init: InitPreset,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    move_cap: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Per-cell aggregates (mean, min, max, stddev).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// size | density
    #[arg(long, default_value = "size")]
    x: XAxis,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Debug)]
struct Sizes(Vec<usize>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let nums: Vec<usize> = s
        .split(':')
        .map(|p| p.parse::<usize>().map_err(|_| format!("bad size `{p}`")))
        .collect::<Result<_, _>>()?;
    let sizes: Vec<usize> = match nums.as_slice() {
        [n] => vec![*n],
        [a, b] => vec![*a, *b],
        [_, _, 0] => return Err("step must be positive".into()),
        [a, b, step] => (*a..=*b).step_by(*step).collect(),
        _ => return Err("expected A:B:STEP".into()),
    };
    if sizes.is_empty() {
        return Err(format!("empty size range `{s}`"));
    }
    Ok(Sizes(sizes))
}

fn gen(args: GenArgs) -> anyhow::Result<ExitCode> {
    let g = gen_random_graph(&GraphGenSpec::new(args.nodes, args.density, args.seed))?;
    write_graph(&g, &args.out)?;
    println!(
        "wrote {} nodes, {} edges to {}",
        g.node_count(),
        g.edge_count(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let g = read_graph(&args.graph)?;
    let n = g.node_count();
    let registry = AlgorithmRegistry::builtin();
    let algo = registry.get(args.algo);
    let init = args.init.build(n, derive_seed(args.seed, &[1]));
    let mut daemon = args.daemon.build(derive_seed(args.seed, &[2]))?;
    let cap = args.move_cap.map_or(MoveCapPolicy::Default, MoveCapPolicy::Fixed).cap(n, &args.daemon);
    let trace = Simulator::new(&g, algo.rules(), init)?.run(daemon.as_mut(), cap)?;

    if let Some(path) = &args.trace {
        write_trace_file(&trace, path)?;
    }
    if let Some(path) = &args.final_state {
        write_state_file(&trace.final_config, path)?;
    }
    let members = trace.final_config.members();
    let report = algo.fixpoint_property().check(&g, &members);
    println!(
        "algo={} daemon={} init={} seed={} n={} converged={} moves={} rounds={} cardinality={} {}",
        args.algo,
        trace.daemon,
        args.init,
        args.seed,
        n,
        trace.converged,
        trace.move_count(),
        trace.rounds,
        members.len(),
        report
    );
    Ok(if trace.converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("did not converge within {cap} moves");
        ExitCode::from(1)
    })
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let g = read_graph(&args.graph)?;
    let c = read_states(&args.state, g.node_count())?;
    let report = args.property.check(&g, &c.members());
    println!("{report}");
    Ok(if report.holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn experiment(args: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let spec = ExperimentSpec {
        sizes: args.sizes.0,
        densities: args.densities,
        trials: args.trials,
        algorithms: args.algos,
        daemon: args.daemon,
        init: args.init,
        base_seed: args.seed,
        move_cap: args.move_cap.map_or(MoveCapPolicy::Default, MoveCapPolicy::Fixed),
    };
    let rows = run_experiment(&spec)?;
    emit_csv(&rows, &args.out)?;
    let cells = summarize(&rows);
    if let Some(path) = &args.summary {
        emit_summary_csv(&cells, path)?;
    }
    for c in &cells {
        println!(
            "n={} density={} algo={} trials={} cardinality={:.1} ({:.2}%) moves={:.1}",
            c.n,
            c.density,
            c.algorithm,
            c.trials,
            c.cardinality.mean,
            100.0 * c.cardinality.mean / c.n as f64,
            c.moves.mean
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn plot(args: PlotArgs) -> anyhow::Result<ExitCode> {
    let rows = load_csv(&args.input)?;
    let cells = summarize(&rows);
    emit_chart(&cells, args.x, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Verify(a) => verify(a),
        Command::Experiment(a) => experiment(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let usage = e
                .chain()
                .find_map(|c| c.downcast_ref::<selfstab::Error>())
                .is_some_and(|e| e.is_usage());
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
