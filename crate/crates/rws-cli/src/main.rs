//! `rws` — robust, well-conditioned sparse covariance estimation.
//!
//! Subcommands: `estimate`, `project`, `tune`, `simulate`, `bench`, `lda`,
//! `portfolio`. Every run writes its data outputs plus a JSON run report;
//! all randomness derives from `--seed`, and results are independent of
//! `--threads`.
//!
//! Exit codes: 0 success; 2 invalid input or usage; 3 numerical failure
//! (non-convergence is only fatal under `--strict`).

mod commands;
mod report;

use clap::{Args, Parser, Subcommand};
use rws_core::Error;

#[derive(Debug, Parser)]
#[command(name = "rws", version, about = "Robust well-conditioned sparse covariance estimation")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct GlobalArgs {
    /// Seed for every random component of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all available cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Exit with code 3 when an iterative solver fails to converge.
    #[arg(long, global = true, default_value_t = false)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate a covariance matrix from observations.
    Estimate(commands::estimate::EstimateArgs),
    /// Project a symmetric matrix onto a spectral constraint set.
    Project(commands::project::ProjectArgs),
    /// Grid-search cross-validation for (lambda, kappa).
    Tune(commands::tune::TuneArgs),
    /// Generate synthetic scenario datasets.
    Simulate(commands::simulate::SimulateArgs),
    /// Repeated-simulation estimator comparison.
    Bench(commands::bench::BenchArgs),
    /// Two-class LDA with a plug-in covariance estimate.
    Lda(commands::lda::LdaArgs),
    /// Rolling-window minimum-variance portfolio backtest.
    Portfolio(commands::portfolio::PortfolioArgs),
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_)
        | Error::InsufficientData { .. }
        | Error::DegenerateScale { .. }
        | Error::Io(_)
        | Error::Parse { .. } => 2,
        Error::SolverFailure(_) | Error::NotPositiveDefinite | Error::CvFailure(_) => 3,
    }
}

fn main() {
    let cli = Cli::parse();
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .expect("thread pool is initialized once");
    }
    let global = commands::Global {
        seed: cli.global.seed,
        threads: cli.global.threads,
        strict: cli.global.strict,
    };
    let outcome = match cli.command {
        Command::Estimate(args) => commands::estimate::run(&args, &global),
        Command::Project(args) => commands::project::run(&args, &global),
        Command::Tune(args) => commands::tune::run(&args, &global),
        Command::Simulate(args) => commands::simulate::run(&args, &global),
        Command::Bench(args) => commands::bench::run(&args, &global),
        Command::Lda(args) => commands::lda::run(&args, &global),
        Command::Portfolio(args) => commands::portfolio::run(&args, &global),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}
