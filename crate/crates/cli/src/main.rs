//! Single-binary front end: config ingestion, subcommands, machine-readable
//! JSON on stdout (schemas under `docs/schemas/`), CSV side outputs.
//!
//! Exit codes: 0 success, 2 input error, 3 infeasible instance, 4 internal
//! oracle disagreement.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Environment variable supplying the default seed when neither the flag
/// nor the config file sets one.
pub const SEED_ENV_VAR: &str = "AOI_SEED";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: String) -> Self {
        CliError { code: 2, message }
    }

    pub fn infeasible(message: String) -> Self {
        CliError { code: 3, message }
    }

    pub fn oracle(message: String) -> Self {
        CliError { code: 4, message }
    }

    pub fn from_core(err: aoi_core::Error) -> Self {
        match err {
            aoi_core::Error::Infeasible(_) | aoi_core::Error::NoneAbove => {
                CliError::infeasible(err.to_string())
            }
            other => CliError::input(other.to_string()),
        }
    }

    pub fn io(err: std::io::Error, what: &str) -> Self {
        CliError::input(format!("{what}: {err}"))
    }
}

#[derive(Parser)]
#[command(
    name = "aoi",
    version,
    about = "Age-of-information scheduling under a power-constrained jamming adversary"
)]
struct Cli {
    /// Worker threads for parallel replications (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form age bounds, optimality ratios, and derived indices.
    Bounds { config: PathBuf },
    /// Optimal power pmf for one side given the other side's pmf, checked
    /// against the vertex-enumeration oracle.
    OptimizePower {
        config: PathBuf,
        /// Which side's pmf is given: "d" (blocking) or "e" (transmit).
        #[arg(long, value_parser = ["d", "e"])]
        given: String,
        /// Comma-separated pmf over the given side's power levels.
        #[arg(long)]
        pmf: String,
    },
    /// Best-response cycle and minimax probe on the built-in 3x3 instance.
    Counterexample {
        /// Write the best-response trace as CSV (step,e...,d...,value).
        #[arg(long)]
        trace_csv: Option<PathBuf>,
    },
    /// Monte Carlo simulation of a policy pair.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        slots: Option<u64>,
        #[arg(long)]
        reps: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        /// Slots discarded at the start of every replication.
        #[arg(long, default_value_t = 0)]
        burn_in: u64,
        /// "uniform", "max-age", or "from-config" (default).
        #[arg(long, default_value = "from-config")]
        policy: String,
        /// "uniform-x" (benchmark), "uniform-xbar" (over-budget probe), or
        /// "from-config" (default).
        #[arg(long, default_value = "from-config")]
        adversary: String,
        /// Write replication 0's trajectory as CSV (slot,user,age).
        #[arg(long)]
        trajectories: Option<PathBuf>,
    },
    /// Equilibrium analysis: frozen-power verification, the shift-structure
    /// special case, or best-response dynamics plus the minimax probe.
    Nash {
        config: PathBuf,
        /// Verify the uniform triple with the power pmfs frozen at --e/--d.
        #[arg(long, requires = "e", requires = "d")]
        fixed_powers: bool,
        /// Comma-separated transmit power pmf (with --fixed-powers).
        #[arg(long)]
        e: Option<String>,
        /// Comma-separated blocking power pmf (with --fixed-powers).
        #[arg(long)]
        d: Option<String>,
        /// Iteration cap for best-response dynamics.
        #[arg(long, default_value_t = 256)]
        max_iters: usize,
        /// Write the best-response trace as CSV when dynamics run.
        #[arg(long)]
        trace_csv: Option<PathBuf>,
    },
    /// Simulate the reference policies against the implemented adversaries
    /// and tabulate them against the closed-form bounds.
    Suite {
        config: PathBuf,
        #[arg(long)]
        slots: Option<u64>,
        #[arg(long)]
        reps: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Bounds { config } => commands::bounds(&config),
        Command::OptimizePower { config, given, pmf } => {
            commands::optimize_power(&config, &given, &pmf)
        }
        Command::Counterexample { trace_csv } => commands::counterexample(trace_csv.as_deref()),
        Command::Simulate {
            config,
            slots,
            reps,
            seed,
            burn_in,
            policy,
            adversary,
            trajectories,
        } => commands::simulate(
            &config,
            slots,
            reps,
            seed,
            burn_in,
            &policy,
            &adversary,
            trajectories.as_deref(),
        ),
        Command::Nash {
            config,
            fixed_powers,
            e,
            d,
            max_iters,
            trace_csv,
        } => commands::nash(
            &config,
            fixed_powers,
            e.as_deref(),
            d.as_deref(),
            max_iters,
            trace_csv.as_deref(),
        ),
        Command::Suite {
            config,
            slots,
            reps,
            seed,
        } => commands::suite(&config, slots, reps, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.workers {
        Some(workers) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("error: failed to build worker pool: {e}");
                    return ExitCode::from(2);
                }
            };
            pool.install(|| dispatch(cli.command))
        }
        None => dispatch(cli.command),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
