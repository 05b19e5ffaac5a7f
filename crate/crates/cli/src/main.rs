use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;

use config::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Constants(args) => commands::constants(args),
        Command::Curve(args) => commands::curve(args),
        Command::Surface(args) => commands::surface(args),
        Command::Verify(args) => commands::verify(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
