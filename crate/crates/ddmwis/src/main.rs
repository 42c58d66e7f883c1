//! Command-line front end: instance generation, single solves, experiment
//! sweeps and the brute-force oracle. Vertex ids are 1-based on every
//! user-facing surface (matching the instance file format); exit code 2
//! signals a parse or contract error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ddmwis::bench::{brute_force, run_sweep, ConfigSpec, SweepParams};
use ddmwis::bnb::{solve_with, NodeReport, SolveOptions};
use ddmwis::clustering::PolicyKind;
use ddmwis::dd::CompiledDiagram;
use ddmwis::{generate_instance, parse_graph, serialize_graph, Strategy, StrategyConfig, WeightedGraph};

#[derive(Parser)]
#[command(name = "ddmwis", version, about = "Decision-diagram branch-and-bound MWISP solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write it to a file.
    Generate {
        #[arg(long)]
        n: usize,
        /// Edge probability in [0, 1].
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one instance file to optimality.
    Solve(SolveArgs),
    /// Solve generated instances under several configurations, emitting CSV.
    Sweep {
        /// Comma-separated densities, e.g. `0.9,0.5`.
        #[arg(long, value_delimiter = ',', required = true)]
        densities: Vec<f64>,
        #[arg(long)]
        n: usize,
        /// Instances per density.
        #[arg(long)]
        count: usize,
        /// Comma-separated configurations: `baseline`, `cbc:fixed`,
        /// `pas:adaptive`, `pas-vo:fixed`, ... or `all`.
        #[arg(long, value_delimiter = ',', required = true)]
        configs: Vec<String>,
        #[arg(long, default_value_t = 100)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Directory caching generated instances (reused on later sweeps).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Solver worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print the brute-force optimum of an instance file (n <= 30).
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "baseline")]
    strategy: Strategy,
    #[arg(long, default_value = "fixed")]
    policy: PolicyKind,
    #[arg(long, default_value_t = 100)]
    width: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print one line per compiled layer to stderr.
    #[arg(long)]
    trace: bool,
    /// Bound cutset children by the whole relaxed-diagram bound instead of
    /// the per-node attribution.
    #[arg(long)]
    whole_diagram_bound: bool,
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

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Generate {
            n,
            density,
            seed,
            out,
        } => {
            if n < 1 {
                return Err("n must be at least 1".into());
            }
            if !(0.0..=1.0).contains(&density) {
                return Err("density must lie in [0, 1]".into());
            }
            let g = generate_instance(n, density, seed);
            fs::write(&out, serialize_graph(&g))
                .map_err(|e| format!("{}: {e}", out.display()))?;
            println!(
                "wrote {} (n={}, m={}, density={}, seed={})",
                out.display(),
                g.n(),
                g.edge_count(),
                density,
                seed
            );
            Ok(())
        }
        Command::Solve(args) => run_solve(args),
        Command::Sweep {
            densities,
            n,
            count,
            configs,
            width,
            seed,
            out,
            cache_dir,
            jobs,
        } => {
            if width < 2 {
                return Err("width must be at least 2".into());
            }
            if densities.iter().any(|d| !(0.0..=1.0).contains(d)) {
                return Err("densities must lie in [0, 1]".into());
            }
            let configs = parse_configs(&configs)?;
            let params = SweepParams {
                densities,
                n,
                instances_per_density: count,
                configs,
                width,
                seed,
                cache_dir,
                jobs: jobs.max(1),
            };
            let mut sink = fs::File::create(&out)
                .map_err(|e| format!("{}: {e}", out.display()))?;
            let rows = run_sweep(&params, &mut sink).map_err(|e| e.to_string())?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
        Command::Oracle { instance } => {
            let g = load_instance(&instance)?;
            let optimum = brute_force(&g).map_err(|e| e.to_string())?;
            println!("optimum: {optimum}");
            Ok(())
        }
    }
}

fn run_solve(args: SolveArgs) -> Result<(), String> {
    if args.width < 2 {
        return Err("width must be at least 2".into());
    }
    let g = load_instance(&args.instance)?;
    let cfg = StrategyConfig::new(args.strategy, args.policy, args.width, args.seed);
    let opts = SolveOptions {
        whole_diagram_bound: args.whole_diagram_bound,
    };
    let mut node_idx = 0u64;
    let mut tracer = |report: &NodeReport| {
        node_idx += 1;
        print_trace(node_idx, "restricted", report.restricted);
        if let Some(relaxed) = report.relaxed {
            print_trace(node_idx, "relaxed", relaxed);
        }
    };
    let observer: Option<&mut dyn FnMut(&NodeReport)> =
        if args.trace { Some(&mut tracer) } else { None };
    let res = solve_with(&g, &cfg, opts, observer);

    println!(
        "instance: {} (n={}, m={})",
        args.instance.display(),
        g.n(),
        g.edge_count()
    );
    println!(
        "strategy={} policy={} width={} seed={}",
        cfg.strategy, cfg.policy, cfg.width, cfg.seed
    );
    println!("optimum: {}", res.optimum);
    let best: Vec<String> = res.best_set.iter().map(|v| (v + 1).to_string()).collect();
    println!("best_set: {}", best.join(" "));
    println!("nodes_processed: {}", res.nodes_processed);
    println!("candidate_evaluations: {}", res.candidate_evaluations);
    println!("relaxed_compilations: {}", res.relaxed_compilations);
    println!("wall_time_s: {}", res.wall_time.as_secs_f64());
    Ok(())
}

fn print_trace(node: u64, kind: &str, dd: &CompiledDiagram) {
    eprintln!(
        "# node {node} {kind} dd: bound={} exact={}",
        dd.bound, dd.is_exact
    );
    for t in &dd.stats.layer_log {
        eprintln!(
            "layer={} var={} width_pre={} width_post={} merged={}",
            t.index,
            t.variable + 1,
            t.width_pre,
            t.width_post,
            t.merged
        );
    }
}

fn load_instance(path: &PathBuf) -> Result<WeightedGraph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_graph(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_configs(tokens: &[String]) -> Result<Vec<ConfigSpec>, String> {
    let mut out = Vec::new();
    for token in tokens {
        if token == "all" {
            out.extend(ConfigSpec::all());
        } else {
            out.push(token.parse()?);
        }
    }
    if out.is_empty() {
        return Err("no configurations given".into());
    }
    Ok(out)
}
