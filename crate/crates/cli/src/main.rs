mod args;
mod backends;
mod commands;
mod config;

use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ColorChoice, CommandFactory, FromArgMatches};

use gradient_core::corpus::{CorpusError, DEFAULT_SEED};
use gradient_core::eval::EvalError;
use gradient_core::gateway::GatewayError;

use args::Cli;
use config::FileConfig;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_BACKEND: u8 = 3;

/// Marks an error as a usage mistake (exit code 1).
#[derive(Debug)]
pub struct Usage(String);

impl Usage {
    pub fn err(msg: impl Into<String>) -> anyhow::Error {
        anyhow::Error::new(Usage(msg.into()))
    }
}

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Settings shared by every subcommand.
pub struct Ctx {
    pub seed: u64,
    pub config: FileConfig,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return EXIT_USAGE;
        }
        if let Some(g) = cause.downcast_ref::<GatewayError>() {
            return match g {
                GatewayError::Config(_) => EXIT_USAGE,
                _ => EXIT_BACKEND,
            };
        }
        if matches!(cause.downcast_ref::<CorpusError>(), Some(CorpusError::Gateway { .. }))
            || matches!(cause.downcast_ref::<EvalError>(), Some(EvalError::Gateway { .. }))
        {
            return EXIT_BACKEND;
        }
    }
    EXIT_DATA
}

fn no_color() -> bool {
    std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty())
}

fn main() -> ExitCode {
    let color = if no_color() {
        ColorChoice::Never
    } else {
        ColorChoice::Auto
    };
    let parsed = Cli::command()
        .color(color)
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };

    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .write_style(if no_color() {
            env_logger::WriteStyle::Never
        } else {
            env_logger::WriteStyle::Auto
        })
        .init();

    let config = match &cli.config {
        Some(path) => match FileConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    eprintln!("seed: {seed}");

    let ctx = Ctx { seed, config };
    match commands::run(cli.command, &ctx) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
