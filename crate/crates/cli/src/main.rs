mod args;
mod commands;
mod failure;
mod sweep;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use failure::EXIT_USAGE;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&a),
        Command::Residual(a) => commands::residual(&a),
        Command::Integrate(a) => commands::integrate(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::Sweep(a) => sweep::run(&a),
        Command::MlTable(a) => commands::ml_table(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
