use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lognet_cli::{execute, Cli, CliError, RunConfig};

fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let outcome = execute(&cfg)?;
    match &cfg.output_path {
        Some(path) => std::fs::write(path, &outcome.body)?,
        None => std::io::stdout()
            .lock()
            .write_all(outcome.body.as_bytes())?,
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("lognet: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
