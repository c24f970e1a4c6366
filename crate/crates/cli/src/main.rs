//! `mmac`: rate regions, thresholds, error rates and figure data.
//!
//! Exit status is 0 on success, 2 on a usage or configuration error and 3
//! on a numerical failure. `MMAC_THREADS` caps the worker count.

mod args;
mod commands;
mod defaults;
mod figures;
mod output;
mod sweep;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Io(_) => 2,
            Self::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Io(m) | Self::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<mmac_core::Error> for CliError {
    fn from(e: mmac_core::Error) -> Self {
        use mmac_core::Error as E;
        match e {
            E::Bracket { .. } | E::Convergence { .. } | E::Quadrature { .. } | E::DegenerateInput(_) => {
                Self::Numeric(e.to_string())
            }
            E::Domain(_) | E::Shape(_) | E::Config(_) | E::Unsupported(_) | E::Precondition(_) => Self::Usage(e.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("MMAC_THREADS") else { return Ok(()) };
    let n = v
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("MMAC_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match args::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|()| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("exiting with {e:?}");
            eprintln!("mmac: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
