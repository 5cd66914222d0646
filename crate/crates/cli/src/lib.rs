//! Command-line front end for the `curvature` library.
//!
//! Every run writes its artifacts into one output directory, records the
//! config hash, seed and version alongside them, and prints one PASS/FAIL
//! line per check.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

use std::path::PathBuf;

pub use args::{Cli, Command, Params, Preset};
pub use config::ExperimentConfig;
pub use error::{CliError, Result};

/// Exit status for a run whose checks all passed.
pub const EXIT_PASS: i32 = 0;
/// Usage, parse or I/O error.
pub const EXIT_ERROR: i32 = 1;
/// Some certificate failed.
pub const EXIT_FAIL: i32 = 2;

/// Runs one command; `Ok(false)` means some check failed.
pub fn run(cli: Cli) -> Result<bool> {
    let Cli { seed, out, format, command } = cli;
    let fixed_seed = seed.unwrap_or(0);
    let fixed_out = || out.clone().unwrap_or_else(|| PathBuf::from("out"));
    match command {
        Command::Certify(a) => commands::certify(&a, fixed_seed, &fixed_out(), format),
        Command::Curve(a) => commands::curve(&a, fixed_seed, &fixed_out(), format),
        Command::Olo(a) => commands::olo(&a, fixed_seed, &fixed_out(), format),
        Command::Fw(a) => commands::fw(&a, fixed_seed, &fixed_out(), format),
        Command::Preset(a) => presets::run(a, seed, out, format),
    }
}
