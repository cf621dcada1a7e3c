//! The `lexishot` command line.
//!
//! Exit codes: 0 success, 1 data or validation error, 2 usage error.

mod args;
mod commands;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    /// Ran fine but found problems (e.g. lexicon-validate discrepancies).
    Invalid,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
            CliError::Invalid => f.write_str("validation failed"),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Runs the CLI on `argv` (including the program name), writing primary
/// output to `stdout` unless `-o` is given. Returns the exit code.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => return report(e),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> i32 {
    match e {
        CliError::Usage(m) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        CliError::Data(m) => {
            eprintln!("error: {m}");
            EXIT_DATA
        }
        CliError::Invalid => EXIT_DATA,
    }
}

/// Expands `--config FILE` into command-line flags. Each non-comment line is
/// `key=value`; it becomes `--key value` unless `--key` already appears on
/// the command line. Repeated keys are all kept.
fn merge_config(argv: Vec<String>) -> CliResult<Vec<String>> {
    let pos = argv.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else {
        return Ok(argv);
    };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => argv
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| CliError::Usage("--config requires a file".into()))?,
    };
    let text = read_input(Path::new(&path))?;
    let given = |key: &str| {
        let flag = format!("--{key}");
        argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{path}:{}: expected key=value", i + 1)))?;
        let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
        if key == "config" || given(key) {
            continue;
        }
        if args::SWITCHES.contains(&key) {
            match value {
                "true" | "1" | "yes" => extra.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => {
                    return Err(CliError::Usage(format!(
                        "{path}:{}: {key} expects true or false",
                        i + 1
                    )))
                }
            }
        } else {
            extra.push(format!("--{key}={value}"));
        }
    }
    let mut out = argv;
    out.extend(extra);
    Ok(out)
}

/// Resolves an input path, falling back to `$LEXISHOT_DATA/<path>` for
/// relative paths that do not exist in the working directory.
pub fn resolve_input(path: &Path) -> CliResult<PathBuf> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if path.is_relative() {
        if let Some(dir) = std::env::var_os("LEXISHOT_DATA") {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return Ok(candidate);
            }
        }
    }
    Err(CliError::Usage(format!("{}: no such file", path.display())))
}

pub fn read_input(path: &Path) -> CliResult<String> {
    let resolved = resolve_input(path)?;
    fs::read_to_string(&resolved).map_err(|e| CliError::Data(format!("{}: {e}", resolved.display())))
}
