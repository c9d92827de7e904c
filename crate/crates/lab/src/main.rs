use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use threshold_lab::config::Cli;
use threshold_lab::{run, LabError, RunConfig};

fn write_output(config: &RunConfig, body: &str) -> Result<(), LabError> {
    match &config.out {
        Some(path) => std::fs::write(path, body).map_err(|e| LabError::Output(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| LabError::Output(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::from_cli(cli).and_then(|config| {
        let outcome = run(&config)?;
        write_output(&config, &outcome.body)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            eprintln!("status: {:?}", outcome.status);
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
