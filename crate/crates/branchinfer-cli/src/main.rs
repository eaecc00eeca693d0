//! `branchinfer`: dataset statistics, descriptors, training, MILP emission
//! and graph enumeration.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Infeasible;

#[derive(Parser, Debug)]
#[command(
    name = "branchinfer",
    version,
    about = "Infer acyclic chemical graphs with bounded branch-height"
)]
struct Cli {
    /// Seed for randomized steps (default 0; env BRANCHINFER_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap (env BRANCHINFER_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat key=value config file (keys: solver_cmd, seed, threads).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

/// Options shared by commands that read graph files.
#[derive(Args, Debug, Clone)]
pub struct InputOpts {
    /// Element alphabet as `SYM:valence,...`.
    #[arg(long, default_value = "C:4,N:3,O:2")]
    pub alphabet: String,
    /// Drop graphs failing the stage-1 curation rules instead of erroring.
    #[arg(long)]
    pub filter: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Branch statistics of a graph corpus (graph text or SDF).
    Stats {
        input: PathBuf,
        #[command(flatten)]
        opts: InputOpts,
        /// Branch parameters, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        k: Vec<usize>,
        /// Also write the statistics as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Descriptor vectors of a corpus as CSV.
    Features {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        opts: InputOpts,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Property values, one per input record, appended as column `y`.
        #[arg(long)]
        values: Option<PathBuf>,
    },
    /// Cross-validated training of a ReLU network on a feature CSV.
    Train {
        csv: PathBuf,
        /// Output weight file.
        #[arg(long)]
        weights: PathBuf,
        /// Name of the property column.
        #[arg(long, default_value = "y")]
        target: String,
        /// Hidden layer widths, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "10")]
        hidden: Vec<usize>,
        #[arg(long, default_value_t = 0.01)]
        lr: f64,
        #[arg(long, default_value_t = 500)]
        epochs: usize,
        #[arg(long, default_value_t = 16)]
        batch: usize,
        #[arg(long, default_value_t = 5)]
        folds: usize,
    },
    /// Emit the inverse MILP; optionally solve, decode and validate.
    Infer(commands::InferArgs),
    /// Enumerate all graphs realizing a target frequency vector.
    Enumerate {
        /// Target file written by `vector` or `infer --solve`.
        target: PathBuf,
        /// Override the number of leaf 2-branches.
        #[arg(long)]
        bl: Option<usize>,
        /// Output graph file; graphs go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-step time limit in seconds (makes runs timing dependent).
        #[arg(long)]
        time_limit: Option<f64>,
        /// Maximum vectors per bucket.
        #[arg(long, default_value_t = 1_000_000)]
        ub: usize,
        /// Maximum number of output graphs.
        #[arg(long, default_value_t = 100)]
        max_output: usize,
        /// Keep every construction so that all realizations are produced.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Write the enumeration target of the first graph in a file.
    Vector {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value = "C:4,N:3,O:2")]
        alphabet: String,
        #[arg(long, default_value_t = 4)]
        dmax: u8,
    },
    /// Check a solution file against an LP model.
    Check {
        model: PathBuf,
        solution: PathBuf,
        /// Maximum number of violations to list.
        #[arg(long, default_value_t = 20)]
        show: usize,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = config::Config::load(cli.config.as_deref())?;
    let seed = cfg.resolve_parsed(cli.seed, "seed")?.unwrap_or(0u64);
    if let Some(t) = cfg.resolve_parsed(cli.threads, "threads")? {
        anyhow::ensure!(t > 0, "--threads must be positive");
        branchinfer::par::init_threads(t);
    }
    match cli.cmd {
        Command::Stats { input, opts, k, csv } => commands::stats(&input, &opts, &k, csv.as_deref()),
        Command::Features {
            input,
            output,
            opts,
            k,
            values,
        } => commands::features(&input, &output, &opts, k, values.as_deref()),
        Command::Train {
            csv,
            weights,
            target,
            hidden,
            lr,
            epochs,
            batch,
            folds,
        } => {
            let hyper = branchinfer::ann::Hyper {
                hidden,
                lr,
                epochs,
                batch,
                seed,
            };
            commands::train(&csv, &weights, &target, &hyper, folds)
        }
        Command::Infer(args) => {
            let solver = cfg.resolve(args.solver_cmd.clone(), "solver_cmd");
            commands::infer(&args, solver.as_deref())
        }
        Command::Enumerate {
            target,
            bl,
            out,
            time_limit,
            ub,
            max_output,
            exhaustive,
        } => {
            let limits = branchinfer::graphsearch::SearchLimits {
                step_time: time_limit.map(std::time::Duration::from_secs_f64),
                ub,
                max_output,
                exhaustive,
            };
            commands::enumerate(&target, bl, out.as_deref(), &limits)
        }
        Command::Vector {
            input,
            output,
            alphabet,
            dmax,
        } => commands::vector(&input, &output, &alphabet, dmax),
        Command::Check { model, solution, show } => commands::check(&model, &solution, show),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<Infeasible>()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
