//! Config-driven batch runner: kernel tables, oracle checks, sourced solves
//! and the verification suite, all written as CSV.

pub mod config;
pub mod output;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use thiserror::Error;

use config::{RunConfig, RunKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("{0}")]
    Run(#[from] chiralq_core::Error),
}

impl CliError {
    /// 1 for failed checks and numerical errors, 2 for bad configuration,
    /// 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) | CliError::Run(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

pub const THREADS_ENV: &str = "CHIRALQ_THREADS";

#[derive(Debug, Parser)]
#[command(name = "chiralq", version, about = "Chiral-medium Maxwell kernels, solver and checks")]
pub struct Cli {
    #[arg(value_enum)]
    pub kind: RunKind,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV destination, overriding the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; the CHIRALQ_THREADS variable takes precedence.
    #[arg(long)]
    pub threads: Option<usize>,
}

fn thread_count(flag: Option<usize>, env: Option<String>) -> Result<Option<usize>, CliError> {
    let n = match env {
        Some(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        ),
        None => flag,
    };
    if n == Some(0) {
        return Err(CliError::Config("thread count must be positive".into()));
    }
    Ok(n)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let threads = thread_count(cli.threads, std::env::var(THREADS_ENV).ok())?;
    let cfg = RunConfig::load(&cli.config)?;
    let go = || run::run(cli.kind, &cfg, cli.out.as_deref());
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(go),
        None => go(),
    }
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("chiralq: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn environment_overrides_flag() {
        assert_eq!(thread_count(Some(4), Some("2".into())).unwrap(), Some(2));
        assert_eq!(thread_count(Some(4), None).unwrap(), Some(4));
        assert_eq!(thread_count(None, None).unwrap(), None);
        assert!(matches!(thread_count(None, Some("x".into())), Err(CliError::Config(_))));
        assert!(matches!(thread_count(Some(0), None), Err(CliError::Config(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Assertion(String::new()).exit_code(), 1);
        assert_eq!(CliError::Run(chiralq_core::Error::Domain(String::new())).exit_code(), 1);
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::Io(String::new()).exit_code(), 3);
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(main_with_args(["chiralq", "bogus", "--config", "x.json"]), 2);
        assert_eq!(main_with_args(["chiralq", "verify"]), 2);
    }
}
