use std::process::ExitCode;

use clap::Parser;
use mermin_cli::args::Cli;
use mermin_cli::commands::worker_count;
use mermin_cli::{execute, write_run, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mermin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    if let Some(n) = worker_count(&cli.command) {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Compute(e.to_string()))?;
    }
    let run = execute(&cli.command)?;
    write_run(&run)?;
    if run.failures > 0 {
        eprintln!("mermin: {} point(s) or check(s) failed", run.failures);
        return Ok(1);
    }
    Ok(0)
}
