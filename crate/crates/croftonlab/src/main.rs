use std::process::ExitCode;

use clap::Parser;
use croftonlab::cli::{Cli, Command};
use croftonlab::commands::{cmd_check, cmd_coeffs, cmd_volumes};
use croftonlab::exec::Parallel;
use croftonlab::output::write_report;

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    let exec = Parallel::from_env()?;
    let (report, common) = match &cli.command {
        Command::Coeffs(a) => (cmd_coeffs(a)?, &a.common),
        Command::Volumes(a) => (cmd_volumes(&exec, a)?, &a.common),
        Command::Check(a) => (cmd_check(&exec, a)?, &a.common),
    };
    write_report(&report.value, common.format, common.out.as_deref())?;
    Ok(report.passed.unwrap_or(true))
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
