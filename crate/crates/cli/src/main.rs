//! `enr`: command-line front end for the enr-design toolkit.
//!
//! Exit status: 0 success, 1 usage error, 2 domain error, 3 no solution.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Inputs};
use error::CliError;

fn load(cli: &Cli) -> Result<Inputs, CliError> {
    let flags = cli.command.inputs().clone();
    let Some(path) = flags.config.clone() else {
        return Ok(flags);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: Inputs = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(flags.merged_with(file))
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let inputs = load(cli)?;
    let (cfg, warnings) = config::resolve(&cli.command, inputs)?;
    let out = commands::run(&cli.command, cfg, warnings)?;

    let stdout = io::stdout();
    let mut lock = stdout.lock();
    out.render(&mut lock)
        .and_then(|_| lock.flush())
        .map_err(|e| CliError::Domain(e.into()))?;

    if out.config.format != args::Format::Json {
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
    }
    if out.unsolved.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for m in &out.unsolved {
            eprintln!("no solution: {m}");
        }
        Ok(CliError::NoSolution(String::new()).exit_code())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::from(1),
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
