use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use serde_json::{json, Value};

use crate::args::Cli;

/// Optional base directory for relative `--out` paths.
pub const OUT_DIR_VAR: &str = "BRANCHING_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    /// exit 1
    Config(String),
    /// exit 2
    Verification(String),
    /// exit 3
    Internal(String),
}

impl CliError {
    fn parts(&self) -> (&'static str, &str, u8) {
        match self {
            CliError::Config(m) => ("invalid_config", m, 1),
            CliError::Verification(m) => ("verification_failed", m, 2),
            CliError::Internal(m) => ("internal_error", m, 3),
        }
    }

    /// Prints one JSON line on stderr and returns the exit code.
    pub fn report(&self) -> ExitCode {
        let (kind, msg, code) = self.parts();
        eprintln!("{}", json!({"error": kind, "message": msg}));
        ExitCode::from(code)
    }
}

impl From<branching::Error> for CliError {
    fn from(e: branching::Error) -> Self {
        use branching::Error::*;
        match e {
            InvalidInput(_) | NotCentral(_) => CliError::Config(e.to_string()),
            Inconsistent(_) | Invariant(_) | NoConvergence(_) => CliError::Internal(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

/// Tool version and the normalized command line.
pub fn metadata(cli: &Cli, extra: Value) -> Value {
    json!({
        "tool": "branching",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cli,
        "run": extra,
    })
}

pub fn csv_header(meta: &Value) -> String {
    format!("# {}\n", meta)
}

fn resolve(path: &str) -> PathBuf {
    let p = PathBuf::from(path);
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p,
    }
}

/// Writes `text` to `out`, or to stdout without one.
pub fn emit(out: Option<&str>, text: &str) -> CliResult<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let path = resolve(path);
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
                }
            }
            fs::write(&path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }
}

/// Writes `PREFIX.csv` and `PREFIX.json`, or prints the JSON summary without a prefix.
pub fn emit_pair(out: Option<&str>, csv: &str, summary: &Value) -> CliResult<()> {
    let json = serde_json::to_string_pretty(summary).expect("serializable") + "\n";
    match out {
        None => emit(None, &json),
        Some(prefix) => {
            emit(Some(&format!("{prefix}.csv")), csv)?;
            emit(Some(&format!("{prefix}.json")), &json)
        }
    }
}
