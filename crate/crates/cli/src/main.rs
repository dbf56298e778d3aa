use std::process::ExitCode;

use clap::{Parser, Subcommand};
use factscreen_cli::{run_analyze, run_generate, run_simulate, AnalyzeArgs, CliResult, GenerateArgs, SimulateArgs};

/// Design-based screening and inference for 2^K factorial experiments.
#[derive(Parser)]
#[command(name = "factscreen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Screen effects and estimate targets from a dataset CSV.
    Analyze(AnalyzeArgs),
    /// Run the Monte Carlo harness and write tidy metrics.
    Simulate(SimulateArgs),
    /// Write one simulated dataset CSV.
    Generate(GenerateArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze(args) => run_analyze(&args).map(drop),
        Command::Simulate(args) => run_simulate(&args).map(drop),
        Command::Generate(args) => run_generate(&args).map(drop),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("factscreen: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
