//! `echomit`: generate echo datasets, train correction networks, evaluate them
//! and run width sweeps.

mod commands;
mod config;
mod error;
mod files;

use clap::{Parser, Subcommand};

use commands::{eval, generate, inspect, sweep, train};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "echomit", version, about = "Echo-evolution error mitigation experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate the echo dataset and the forward test set.
    Generate(generate::GenerateArgs),
    /// Train a correction network on an echo dataset.
    Train(train::TrainArgs),
    /// Evaluate a trained network.
    Eval(eval::EvalArgs),
    /// Hidden-width study over noise levels and realizations.
    Sweep(sweep::SweepArgs),
    /// Print gate counts and the gate listing of a circuit.
    InspectCircuit(inspect::InspectArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    match &cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Train(a) => train::run(a),
        Command::Eval(a) => eval::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::InspectCircuit(a) => inspect::run(a),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
