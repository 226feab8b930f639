//! `kahler-hardy`: command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input or schema
//! violation, 3 non-convergence, 4 divergent geometry, 5 degenerate metric.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// A failure with its exit code; the message goes to stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<kahler_hardy::Error> for Failure {
    fn from(e: kahler_hardy::Error) -> Self {
        use kahler_hardy::Error as E;
        let code = match &e {
            E::NonConvergent { .. } | E::GridTooCoarse { .. } => 3,
            E::Divergent(_) => 4,
            E::DegenerateMetric { .. } => 5,
            E::InvalidInput(_)
            | E::DivergentInput(_)
            | E::InvalidIndex { .. }
            | E::IncompatibleWeight(_)
            | E::PoleHit(_)
            | E::BranchPoint(_)
            | E::StepTooLarge { .. } => 2,
        };
        let message = match &e {
            E::Divergent(_) => format!("{e}; a nonzero fractional order d with a power weight m >= 1 has no finite geometry"),
            _ => e.to_string(),
        };
        Self { code, message }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("KAHLER_HARDY_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::input(format!("KAHLER_HARDY_THREADS: expected a positive integer, got {value:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::input(format!("KAHLER_HARDY_THREADS: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
