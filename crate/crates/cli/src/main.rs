use std::process::ExitCode;

use clap::Parser;

use multiflow_cli::args::Cli;
use multiflow_cli::error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = multiflow_cli::check_thread_env()
        .and_then(|_| cli.command.resolve())
        .and_then(|inv| multiflow_cli::run(&inv))
        .and_then(|outcome| {
            multiflow_cli::write_artifacts(&outcome.artifacts)?;
            outcome.failure.map_or(Ok(()), Err)
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("multiflow: {e}");
            ExitCode::from(exit_byte(&e))
        }
    }
}

fn exit_byte(e: &CliError) -> u8 {
    e.exit_code() as u8
}
