mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::Settings;
use crate::error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::resolve(&cli.global)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    match &cli.command {
        Command::GenData(a) => commands::gen_data(&settings, a),
        Command::Optimize(a) => commands::optimize(&settings, a),
        Command::Sweep => commands::sweep(&settings),
        Command::Sensitivity(a) => commands::sensitivity(&settings, a),
        Command::Experiment(a) => commands::experiment(&settings, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
