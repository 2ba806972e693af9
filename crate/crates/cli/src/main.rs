mod args;
mod commands;
mod output;
mod settings;

use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

/// Failure classes, mapped onto exit codes 2 (usage) and 1 (everything else).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(stickbreak::Error),
    Io(String),
}

impl From<stickbreak::Error> for CliError {
    fn from(e: stickbreak::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    kind: &'a str,
    message: String,
}

fn kind(e: &stickbreak::Error) -> &'static str {
    use stickbreak::Error::*;
    match e {
        Domain(_) => "domain",
        Divergence(_) => "divergence",
        Pole(_) => "pole",
        Unsupported(_) => "unsupported",
        TruncationFailure { .. } => "truncation_failure",
        SeriesDivergence { .. } => "series_divergence",
        Degenerate(_) => "degenerate",
        Size(_) => "size",
        ConditionViolated(_) => "condition_violated",
        Overflow(_) => "overflow",
        Quadrature { .. } => "quadrature",
        Config(_) => "config",
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::dispatch(&cli.command, cli.config.as_deref(), cli.stamp) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(err) => {
            let record = match &err {
                CliError::Core(e) => ErrorRecord { error: "runtime", kind: kind(e), message: e.to_string() },
                CliError::Io(m) => ErrorRecord { error: "runtime", kind: "io", message: m.clone() },
                CliError::Usage(_) => unreachable!(),
            };
            eprintln!("{}", serde_json::to_string(&record).expect("error record serializes"));
            ExitCode::from(1)
        }
    }
}
