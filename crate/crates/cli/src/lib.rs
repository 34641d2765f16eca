//! Command-line front end for `bandinv`: spec files, reports and the
//! benchmark harness.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod commands;
pub mod error;
pub mod format;
pub mod selftest;
pub mod specfile;
pub mod suite;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::Cli;
pub use error::CliError;

/// Environment variable that overrides the default tolerance.
pub const TOL_ENV: &str = "BANDINV_TOL";

/// Parses `args`, runs the command and returns the process exit status.
/// Results go to stdout (or `--output`); errors go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.execute() {
        Ok(outcome) => {
            if let Err(e) = cli.emit(&outcome.text) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            match outcome.failure {
                Some(e) => {
                    let _ = std::io::stdout().flush();
                    eprintln!("error: {e}");
                    e.exit_code()
                }
                None => 0,
            }
        }
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
