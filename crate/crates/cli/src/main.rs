use std::process::ExitCode;

use clap::Parser;
use transmon_cli::error::EXIT_PARTIAL;
use transmon_cli::{dispatch, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(flags) if flags.is_empty() => ExitCode::SUCCESS,
        Ok(flags) => {
            for f in &flags {
                eprintln!("warning: {f}");
            }
            ExitCode::from(EXIT_PARTIAL as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
