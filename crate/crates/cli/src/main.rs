use std::process::ExitCode;

use clap::Parser;
use clap::error::ErrorKind;

use curvature_cli::{run, Cli, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_PASS as u8),
                _ => ExitCode::from(EXIT_ERROR as u8),
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::from(EXIT_PASS as u8),
        Ok(false) => ExitCode::from(EXIT_FAIL as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
