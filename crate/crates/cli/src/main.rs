use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mkdv_cli::app::{run, Command, RunConfig};

/// Complex mKdV experiments: solver runs, ill-posedness sweeps, estimate
/// probes and norm evaluation.
#[derive(Parser, Debug)]
#[command(name = "mkdv", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Flat key = value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Evolve initial data with the spectral solver.
    Solve,
    /// Run the two-soliton ill-posedness sweep and its verdict.
    Illposed,
    /// Run estimate probes.
    Probe,
    /// Evaluate norms of a stored field.
    Norms,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let command = match cli.command {
        Sub::Solve => Command::Solve,
        Sub::Illposed => Command::Illposed,
        Sub::Probe => Command::Probe,
        Sub::Norms => Command::Norms,
    };
    let rc = RunConfig {
        command,
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        jobs: cli.jobs,
    };
    ExitCode::from(run(&rc) as u8)
}
