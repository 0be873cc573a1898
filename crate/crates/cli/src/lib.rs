//! Command-line front end for `multiflow`.
//!
//! Commands build a [`config::RunConfig`] from an optional config file plus
//! flags, run one core routine and return the files to write. Exit codes:
//! 0 ok, 1 validation failure, 2 config or i/o error, 3 numeric error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod svg;
pub mod validate;

use std::io::Write;

use args::Invocation;
use commands::Artifact;
use config::Command;
use error::{io_error, CliError};

/// Files produced by a run, and the validation failure if any.
#[derive(Debug)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub failure: Option<CliError>,
}

pub fn check_thread_env() -> Result<(), CliError> {
    match std::env::var(multiflow::parallel::THREADS_ENV) {
        Ok(v) if !matches!(v.trim().parse::<usize>(), Ok(n) if n > 0) => Err(CliError::Config(format!(
            "{} must be a positive integer, got '{v}'",
            multiflow::parallel::THREADS_ENV
        ))),
        _ => Ok(()),
    }
}

pub fn run(inv: &Invocation) -> Result<Outcome, CliError> {
    let cfg = &inv.config;
    let artifacts = match inv.command {
        Command::Flow => commands::run_flow(cfg)?,
        Command::Kernel => commands::run_kernel(cfg)?,
        Command::Pdf => commands::run_pdf(cfg)?,
        Command::Simulate => commands::run_simulate(cfg)?,
        Command::Validate => {
            let checks = validate::run_checks(inv.validate)?;
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            let failure = (!failed.is_empty()).then(|| CliError::Validation(failed.join(", ")));
            let report = Artifact { path: cfg.output.path.clone(), contents: validate::report(&checks) };
            return Ok(Outcome { artifacts: vec![report], failure });
        }
    };
    Ok(Outcome { artifacts, failure: None })
}

pub fn write_artifacts(artifacts: &[Artifact]) -> Result<(), CliError> {
    for a in artifacts {
        match &a.path {
            Some(p) => std::fs::write(p, &a.contents).map_err(|e| io_error(p, e))?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(a.contents.as_bytes()).map_err(|e| io_error("<stdout>", e))?;
            }
        }
    }
    Ok(())
}
