mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::LoadedConfig;
use run::RunOptions;

/// Builds open-system generators from a JSON run configuration and writes
/// trajectories, kernels, Choi matrices and gate matrices.
#[derive(Parser)]
#[command(name = "qpath", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density-matrix trajectory at every slice boundary.
    Propagate(RunArgs),
    /// Generator kernel and symbol on a position grid, plus the Gaussian short-time kernel.
    Kernel(RunArgs),
    /// Choi matrix, its spectrum and a Kraus summary of the propagated operation.
    Choi(RunArgs),
    /// Real Pauli-basis matrix of a qubit operation.
    GateMatrix(RunArgs),
    /// First and second moments of the oscillator model.
    Moments(RunArgs),
    /// Superoperator identity suite on random operator triples.
    CheckAlgebra(AlgebraArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AlgebraArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

type Pipeline = fn(&LoadedConfig, &RunOptions) -> anyhow::Result<()>;

fn dispatch(command: Command) -> anyhow::Result<bool> {
    let (args, pipeline): (RunArgs, Pipeline) = match command {
        Command::Propagate(a) => (a, run::propagate),
        Command::Kernel(a) => (a, run::kernel),
        Command::Choi(a) => (a, run::choi),
        Command::GateMatrix(a) => (a, run::gate_matrix),
        Command::Moments(a) => (a, run::moments),
        Command::CheckAlgebra(a) => {
            let cfg = a.config.as_deref().map(LoadedConfig::load).transpose()?;
            let opts = RunOptions { out: a.out, tol: a.tol, seed: a.seed };
            return run::check_algebra(cfg.as_ref(), &opts);
        }
    };
    let cfg = LoadedConfig::load(&args.config)?;
    pipeline(&cfg, &RunOptions { out: args.out, tol: args.tol, seed: args.seed })?;
    Ok(true)
}
