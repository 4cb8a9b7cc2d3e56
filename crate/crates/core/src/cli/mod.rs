//! The `ppoll` command-line front end.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 invalid configuration,
//! 4 inputs that disagree with each other (for example pattern files for different pieces).
//! Every output file is written to a temporary name and renamed into place.

mod args;
mod commands;
mod config;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn inconsistent(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INCONSISTENT, message: message.into() }
    }

    fn context(self, path: &Path) -> Self {
        CliError { message: format!("{}: {}", path.display(), self.message), ..self }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::ClassTooSmall { .. } => EXIT_CONFIG,
            _ => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
/// Errors are reported on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::expand(args) {
        Ok(a) => a,
        Err(e) => return report(e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    let level = if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Warn };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    match commands::dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => report(e),
    }
}

/// Entry point for the binary.
pub fn main() -> ! {
    std::process::exit(run(std::env::args_os()))
}

fn report(e: CliError) -> i32 {
    eprintln!("error: {e}");
    e.code
}

pub(crate) struct Output<'a> {
    dir: &'a Path,
    quiet: bool,
    written: Vec<PathBuf>,
}

impl<'a> Output<'a> {
    fn new(cli: &'a Cli) -> Self {
        Output { dir: &cli.out_dir, quiet: cli.quiet, written: Vec::new() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        write_atomic(&path, bytes.as_ref())?;
        self.written.push(path.clone());
        Ok(path)
    }

    fn say(&self, line: impl fmt::Display) {
        if !self.quiet {
            println!("{line}");
        }
    }
}

/// Writes next to the destination and renames, so readers never see a partial file.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::input(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}
