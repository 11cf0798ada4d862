//! Command-line front end for the `qss` binary.

pub mod args;
pub mod commands;
pub mod error;
pub mod numfmt;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::Path;

use args::{Cli, Command, Format, OutputArgs};
use commands::{angle_grid, cmd_oracle, cmd_run, cmd_shor, cmd_sweep, ShorTarget, SweepConfig};
pub use error::{CliError, Result};

fn warn(message: Option<String>) {
    if let Some(m) = message {
        eprintln!("warning: {m}");
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn format_or(output: &OutputArgs, default: Format) -> Format {
    output.format.unwrap_or(default)
}

/// Runs a parsed command line and writes its output.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => {
            let (config, warning) = a.config()?;
            warn(warning);
            let report = cmd_run(&config)?;
            emit(
                &report.render(config.format)?,
                config.output_path.as_deref(),
            )
        }
        Command::Oracle(a) => {
            let parsed = a.secret.parse()?;
            warn(parsed.warning);
            let report = cmd_oracle(&parsed.secret)?;
            emit(
                &report.render(format_or(&a.output, Format::Table))?,
                a.output.out.as_deref(),
            )
        }
        Command::Sweep(a) => {
            let parsed = a.secret.parse()?;
            warn(parsed.warning);
            let config = SweepConfig {
                secret: parsed.secret,
                who: a.who.into(),
                angles: angle_grid(a.start, a.stop, a.step)?,
                trials: a.trials,
                seed: a.seed,
            };
            let report = cmd_sweep(&config)?;
            emit(
                &report.render(format_or(&a.output, Format::Csv))?,
                a.output.out.as_deref(),
            )
        }
        Command::Shor(a) => {
            let parsed = a.secret.parse()?;
            warn(parsed.warning);
            let target: ShorTarget = a.error.parse()?;
            let report = cmd_shor(&parsed.secret, target, a.seed)?;
            emit(
                &report.render(format_or(&a.output, Format::Table))?,
                a.output.out.as_deref(),
            )
        }
    }
}
