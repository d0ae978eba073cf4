//! Command-line experiments for LT-V profit maximization: weighting edge
//! lists, fitting valuation models, simulating diffusions and running the
//! seed-and-price optimizers with reproducible CSV output.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use args::{Cli, Command};
use commands::{cmd_exact, cmd_fit, cmd_optimize, cmd_simulate, cmd_weights};
use config::ExperimentConfig;
pub use error::{CliError, Result};

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Weights(a) => {
            let g = cmd_weights(&a)?;
            writeln!(out, "nodes={}", g.node_count())?;
            writeln!(out, "edges={}", g.edge_count())?;
        }
        Command::Optimize(a) => {
            let config = ExperimentConfig::from_args(&a)?;
            write!(out, "{}", cmd_optimize(&config)?)?;
        }
        Command::Fit(a) => write!(out, "{}", cmd_fit(&a)?)?,
        Command::Simulate(a) => cmd_simulate(&a, out)?,
        Command::Exact(a) => cmd_exact(&a, out)?,
    }
    Ok(())
}
