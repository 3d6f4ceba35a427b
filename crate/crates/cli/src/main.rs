//! `returnset`: compute and analyze return sets from the command line.

mod analyze;
mod args;
mod bounds;
mod error;
mod generate;
mod output;
mod verify;
mod witness;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RETURNSET_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { error::EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => analyze::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Bounds(a) => bounds::run(a),
        Command::Generate(a) => generate::run(a),
        Command::Witness(a) => witness::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
