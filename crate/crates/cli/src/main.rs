use std::process::ExitCode;

use clap::Parser;
use qphase_cli::args::Cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match qphase_cli::run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qphase: {e}");
            e.exit_code()
        }
    }
}
