//! The `fejer` command line: argument handling, dispatch and JSON-lines
//! output. Exit status is 0 when every check passes, 1 when any check
//! fails and 2 on usage or configuration errors.

pub mod args;
mod commands;

use std::ffi::OsString;
use std::io::{self, Write};

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, PRECISION_ENV};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Failure(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit status. Records go to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_PASS
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    exit_code(commands::dispatch(&cli, out), err)
}

fn exit_code(result: Result<bool, CliError>, err: &mut dyn Write) -> i32 {
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAIL
        }
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_PASS,
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
    }
}
