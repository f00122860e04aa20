//! Command-line front end: parameter sweeps written as CSV or JSON.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use std::ffi::OsString;

pub use args::{parse_args, RunConfig};
pub use commands::run;
pub use error::CliError;

/// Parse, run and report; returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv).and_then(|cfg| run(&cfg)) {
        Ok(()) => 0,
        Err(CliError::Info(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("lhz: {e}");
            e.exit_code()
        }
    }
}
