//! `chandisc`: divergences, channel discrimination and inequality checks
//! from the command line.

mod commands;
mod io;
mod table;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use table::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] chandisc::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(chandisc::Error::Resource(_)) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "chandisc", version, about = "Quantum channel divergences and discrimination")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every command.
#[derive(Debug, Args)]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Violation tolerance; each check has its own default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "out", global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Divergence between two states.
    Divergence(commands::DivergenceArgs),
    /// Channel divergence, its regularisation or a Stein sequence.
    Chandiv(commands::ChandivArgs),
    /// Strong converse and error exponents at a rate.
    Exponents(commands::ExponentsArgs),
    /// Run a verification suite.
    Verify(commands::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Divergence(a) => commands::divergence(a, &cli.run),
        Command::Chandiv(a) => commands::chandiv(a, &cli.run),
        Command::Exponents(a) => commands::exponents(a, &cli.run),
        Command::Verify(a) => commands::verify(a, &cli.run),
    };
    match result {
        Ok((tables, ok)) => {
            print!("{}", table::render(&tables, cli.run.format));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
