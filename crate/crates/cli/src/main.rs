mod args;
mod commands;
mod potential;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => commands::verify(&cli.common, a),
        Command::GaugeCheck(a) => commands::gauge_check(&cli.common, a),
        Command::Expand(a) => commands::expand(&cli.common, a),
        Command::Simulate(a) => commands::simulate(&cli.common, a),
        Command::Winding(a) => commands::winding_cmd(&cli.common, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
