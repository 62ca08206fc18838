//! Command-line driver for the `qphase` library: parameter sweeps, single
//! optimizations, the continuous-limit state, and the acceptance checks.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod verify;

use std::process::ExitCode;

use args::{Cli, Command, Settings};
use error::CliResult;

pub fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::CostSweep(a) => commands::cost_sweep(&Settings::resolve(&a, None)?)?,
        Command::Optimize(a) => commands::optimize(&Settings::resolve(&a, None)?)?,
        Command::MutualInfo(a) => commands::mutual_info(&Settings::resolve(&a, None)?)?,
        Command::Dpss(a) => commands::dpss(&Settings::resolve(&a, None)?)?,
        Command::Verify(v) => {
            let settings = Settings::resolve(&v.common, v.filter.as_deref())?;
            if !verify::verify(&settings)? {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
