//! Command-line front end for the `ruinlab` engines: argument parsing,
//! CSV and JSON output, and an on-disk cache of step functions.

pub mod args;
pub mod cache;
pub mod commands;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

use ruinlab::analysis::{AnalysisError, Report};
use ruinlab::exactnum::ExactError;
use ruinlab::gambler::GamblerError;
use ruinlab::ruinrec::RecError;

use args::{Cli, Format};
use cache::CacheError;
use commands::{command_name, run_command};
use output::{render_csv, render_json, write_output, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_INVARIANT: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error("invariant check failed: {}", .0.join("; "))]
    Invariant(Vec<String>),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::InvalidArgument(_) => EXIT_INVALID,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Cache(_) | CliError::Io(_) | CliError::Csv(_) => EXIT_FAILURE,
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::ExponentOverflow { .. } => CliError::Budget(e.to_string()),
            ExactError::Parse(_) => CliError::InvalidArgument(e.to_string()),
        }
    }
}

impl From<RecError> for CliError {
    fn from(e: RecError) -> Self {
        match e {
            RecError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            RecError::Exact(x) => x.into(),
            RecError::InvalidArgument(_) | RecError::InvalidStepFunction(_) => CliError::InvalidArgument(e.to_string()),
        }
    }
}

impl From<GamblerError> for CliError {
    fn from(e: GamblerError) -> Self {
        match e {
            GamblerError::BlockCap { .. } => CliError::Budget(e.to_string()),
            GamblerError::Exact(x) => x.into(),
            GamblerError::AlreadyRuined => CliError::Invariant(vec![e.to_string()]),
            GamblerError::InvalidArgument(_) => CliError::InvalidArgument(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::NonConvergent { .. } => CliError::Budget(e.to_string()),
            AnalysisError::Rec(r) => r.into(),
            AnalysisError::Gambler(g) => g.into(),
            AnalysisError::Degenerate(_) | AnalysisError::InvalidArgument(_) => CliError::InvalidArgument(e.to_string()),
        }
    }
}

/// Runs a parsed command line and returns the rendered output. Invariant
/// failures still produce output; they are reported alongside it.
pub fn execute(cli: &Cli) -> Result<(String, Vec<String>), CliError> {
    let outcome = run_command(&cli.global, &cli.command)?;
    let config = RunConfig {
        command: command_name(&cli.command).to_string(),
        seed: cli.global.seed,
        mode: cli.global.mode(),
        format: cli.global.format,
        out: cli.global.out.as_ref().map(|p| p.display().to_string()),
        params: outcome.params.clone(),
    };
    let text = match cli.global.format {
        Format::Csv => render_csv(&config, &outcome.csv)?,
        Format::Json => render_json(&Report::new(config, outcome.result.clone())),
    };
    Ok((text, outcome.failures))
}

/// Full entry point: parse, run, write, and map the result to an exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return if code == 0 { EXIT_OK } else { EXIT_INVALID };
        }
    };
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: invalid argument: threads must be positive");
            return EXIT_INVALID;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: could not configure threads: {e}");
            return EXIT_FAILURE;
        }
    }
    let result = execute(&cli).and_then(|(text, failures)| {
        write_output(cli.global.out.as_deref(), &text)?;
        if failures.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invariant(failures))
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
