//! `rssloc`: ingest fingerprint surveys, train and query localization
//! models, and run the evaluation experiments.
//!
//! Exit status is 0 on success, 1 when the work itself fails and 2 for
//! usage errors.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "rssloc", version, about = "Wi-Fi RSS fingerprint localization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a survey file and rewrite it in canonical CSV layout
    Ingest(commands::IngestArgs),
    /// Train a model (autoencoder augmentation + boosted trees) and save it
    Train(commands::TrainArgs),
    /// Locate one scan; prints `x,y,z,rp_label`
    Predict(commands::PredictArgs),
    /// Cross-device error matrix and summary statistics
    Evaluate(commands::EvaluateArgs),
    /// Paired runs with and without autoencoder augmentation
    Ablate(commands::AblateArgs),
    /// Single-query prediction latency
    Bench(commands::BenchArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Core(rssloc_core::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) | Self::Config(m) => f.write_str(m),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<rssloc_core::Error> for CliError {
    fn from(e: rssloc_core::Error) -> Self {
        Self::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Train(a) => commands::train(a),
        Command::Predict(a) => commands::predict(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Ablate(a) => commands::ablate(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
