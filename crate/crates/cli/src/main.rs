//! `td`: iteration toolkit for entire and meromorphic maps.
//!
//! Exit codes: 0 success, 1 configuration error (flags, config file, map
//! source), 2 runtime error (computation or I/O). Errors also land on
//! stderr as one JSON object, so harnesses never have to parse prose.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod catalog;
mod run;

use args::{Cli, Cmd};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn config(msg: String) -> CliError {
        CliError::Config(msg)
    }

    pub fn runtime(msg: String) -> CliError {
        CliError::Runtime(msg)
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Runtime(_) => "runtime",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }

    fn exit(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(1),
            CliError::Runtime(_) => ExitCode::from(2),
        }
    }
}

fn fail(e: &CliError) -> ExitCode {
    let json = serde_json::json!({ "error": { "kind": e.kind(), "message": e.message() } });
    eprintln!("{json}");
    e.exit()
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("TD_THREADS") {
        Ok(text) => text
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::config(format!("TD_THREADS must be an integer, got {text:?}"))),
        Err(_) => Ok(None),
    }
}

fn load_config(path: &std::path::Path) -> Result<Cmd, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {path:?}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("cannot parse config {path:?}: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::config(e.to_string())),
    };

    let threads = match cli.threads {
        Some(n) => Some(n),
        None => match threads_from_env() {
            Ok(n) => n,
            Err(e) => return fail(&e),
        },
    };

    let cmd = match (cli.config, cli.cmd) {
        (Some(path), None) => match load_config(&path) {
            Ok(cmd) => cmd,
            Err(e) => return fail(&e),
        },
        (None, Some(cmd)) => cmd,
        (Some(_), Some(_)) => {
            return fail(&CliError::config(
                "pass either --config or a subcommand, not both".into(),
            ))
        }
        (None, None) => {
            return fail(&CliError::config(
                "missing subcommand; try `td --help` or `td --config run.json`".into(),
            ))
        }
    };

    match td_core::exec::with_threads(threads, || run::run(&cmd)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
