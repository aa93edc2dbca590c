//! `qlt-pme`: configuration-driven runs of the regularized porous-medium solver.

mod commands;
mod config;
mod data;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

/// Exit codes: 0 success, 1 configuration error, 2 numerical failure or
/// interruption, 3 invariant violation or failed acceptance criterion.
#[derive(Parser)]
#[command(name = "qlt-pme", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the regularized problem for one n; writes solution.csv and report.json.
    Solve(ConfigArg),
    /// Sweep over n (and optionally refine the mesh); writes convergence.csv/json.
    Sweep(ConfigArg),
    /// Compute the stationary state; writes equilibrium.csv/json.
    Equilibrium(ConfigArg),
    /// Run the acceptance criteria and print a pass/fail table.
    Validate(ConfigArg),
}

#[derive(Args)]
struct ConfigArg {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

fn run(cli: Cli, cancel: &AtomicBool) -> Result<commands::Outcome, CliError> {
    let (Command::Solve(arg) | Command::Sweep(arg) | Command::Equilibrium(arg) | Command::Validate(arg)) = &cli.command;
    let config = RunConfig::load(arg.config.as_deref())?;
    match cli.command {
        Command::Solve(_) => commands::solve(&config, cancel),
        Command::Sweep(_) => commands::sweep(&config, cancel),
        Command::Equilibrium(_) => commands::equilibrium(&config),
        Command::Validate(_) => commands::validate(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cancel = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&cancel);
    if let Err(e) = ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed)) {
        eprintln!("warning: cannot install interrupt handler: {e}");
    }
    match run(cli, &cancel) {
        Ok(outcome) => {
            for path in &outcome.written {
                eprintln!("wrote {}", path.display());
            }
            match outcome.violation {
                Some(msg) => {
                    eprintln!("{}", CliError::Invariant(msg));
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
