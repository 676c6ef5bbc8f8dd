mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::commands::run;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli.command, &cli.global) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("bernzeta: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("bernzeta: {e}");
        return ExitCode::from(1);
    }
    match out.failure {
        Some(e) => {
            eprintln!("bernzeta: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        None => ExitCode::SUCCESS,
    }
}
