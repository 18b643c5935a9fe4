use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;
mod config;

use config::{CliError, FileConfig, Overrides, RunConfig};

/// Curvature integrals, deficits and asymmetry of nearly spherical domains.
#[derive(Debug, Parser)]
#[command(name = "quermass", version, about)]
struct Cli {
    /// JSON config file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Volume, barycenter, curvature integrals, deficits, asymmetry and sup
    /// norms of one domain.
    Info(Overrides),
    /// Run the identity and accuracy suites on random domains.
    Verify(Overrides),
    /// Run a stability check across a list of ε and write CSV and JSON.
    Sweep {
        #[command(flatten)]
        flags: Overrides,
        #[arg(long, value_enum, default_value_t = Check::Stability)]
        check: Check,
    },
    /// Fraenkel asymmetry and optimal center of one domain.
    Asymmetry(Overrides),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// `δ ≥ (C − η) α²` per sample.
    Stability,
    /// Boundedness of `‖u‖_∞^n / branch(δ)` as ε decreases.
    Growth,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let (name, flags) = match &cli.command {
        Command::Info(f) => ("info", f.clone()),
        Command::Verify(f) => ("verify", f.clone()),
        Command::Sweep { flags, .. } => ("sweep", flags.clone()),
        Command::Asymmetry(f) => ("asymmetry", f.clone()),
    };
    let config = RunConfig::resolve(name, file, flags)?;
    match cli.command {
        Command::Info(_) => commands::info(&config),
        Command::Verify(_) => commands::verify(&config),
        Command::Sweep { check, .. } => commands::sweep(&config, check),
        Command::Asymmetry(_) => commands::asymmetry(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
