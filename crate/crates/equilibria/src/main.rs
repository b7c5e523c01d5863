use clap::{Args, Parser, Subcommand};
use equilibria::cli::{self, Mode, RunFlags};
use std::path::PathBuf;

/// Equilibrium points of generalized point-charge potentials: solvers,
/// Voronoi effective-cell analysis, exact 1-D root counting, and fewnomial
/// bound calculators.
#[derive(Parser)]
#[command(name = "equilibria", version, after_long_help = CONFIG_DEFAULTS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

const CONFIG_DEFAULTS: &str = "Config defaults (echoed into every record):\n\
  seed = 0; limits.seeds = 64*l; limits.max_iters = 200;\n\
  limits.region_inflation = 0.1 for all-positive charges, 10.0 for mixed signs.\n\
Exact alphas can be written as strings, e.g. \"alpha\": \"7/3\".\n\
Exit codes: 0 ok, 2 validation error, 3 numerical failure present.";

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration (sites, charges, alpha/alphas, optional
    /// subspace, seed, limits, grid section)
    #[arg(long)]
    config: PathBuf,
    /// Output path: JSON Lines records (CSV for the grid mode)
    #[arg(long)]
    out: PathBuf,
    /// Worker pool size; 0 = machine parallelism, 1 = sequential
    /// (outputs are identical regardless)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// RNG seed for solver seeding (default 0; overrides the config)
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-check certified 1-D sweep counts against the exact Sturm route
    /// (integer alpha only)
    #[arg(long)]
    exact: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Find and classify the critical points of V_alpha
    Solve(RunArgs),
    /// Per-alpha census sweep (1-D certified counts when a line subspace is given)
    Sweep(RunArgs),
    /// Voronoi diagram with genericity and effective-cell census
    Voronoi(RunArgs),
    /// Fewnomial/charge bounds; includes the three-charge pipeline for l = 3
    Bounds(RunArgs),
    /// Full symbolic three-charge pipeline with solver cross-check
    Three(RunArgs),
    /// CSV grid of V_alpha over a window (sites masked as empty fields)
    Grid(RunArgs),
    /// Summarize a JSONL record file as a table
    Report {
        /// JSONL records produced by a run
        #[arg(long)]
        records: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(a) => dispatch(Mode::Solve, a),
        Command::Sweep(a) => dispatch(Mode::Sweep, a),
        Command::Voronoi(a) => dispatch(Mode::Voronoi, a),
        Command::Bounds(a) => dispatch(Mode::Bounds, a),
        Command::Three(a) => dispatch(Mode::Three, a),
        Command::Grid(a) => dispatch(Mode::Grid, a),
        Command::Report { records } => match cli::report(&records) {
            Ok(table) => {
                print!("{table}");
                cli::EXIT_OK
            }
            Err(e) => {
                eprintln!("equilibria: {e}");
                cli::EXIT_VALIDATION
            }
        },
    };
    std::process::exit(code);
}

fn dispatch(mode: Mode, args: RunArgs) -> i32 {
    #[cfg(feature = "parallel")]
    if args.jobs > 1 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build_global();
    }
    let flags = RunFlags { jobs: args.jobs, seed: args.seed, exact: args.exact };
    cli::run(mode, &args.config, &args.out, &flags)
}
