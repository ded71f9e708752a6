use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use molwalk_cli::{execute, Experiment};

#[derive(Debug, Parser)]
#[command(name = "molwalk", version, about = "Interacting two-particle quantum walk experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(flatten)]
    Experiment(Experiment),
    /// Re-runs a configuration file, or the configuration inside a JSON result.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Replaces the output path stored in the configuration.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Experiment(e) => execute(e),
        Command::Run { config, output } => {
            let text =
                fs::read_to_string(&config).with_context(|| format!("cannot read --config {}", config.display()))?;
            let mut e = Experiment::from_json(&text)
                .with_context(|| format!("invalid configuration in {}", config.display()))?;
            if output.is_some() {
                e.output_mut().path = output;
            }
            execute(e)
        }
    }
}
