//! Command-line front end for `nitrq-core`.

pub mod args;
mod commands;
pub mod error;
pub mod io;
pub mod report;
pub mod svg;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use error::{CliError, CliResult};

/// Parses arguments and runs one command; returns the process exit status
/// (0 ok, 1 input error, 2 non-convergence).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
