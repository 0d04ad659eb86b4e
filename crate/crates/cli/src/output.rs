//! Result files and process exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::config::{Command, ConfigError};
use crate::run::Outcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

pub const RESULT_JSON: &str = "result.json";
pub const RESULT_CSV: &str = "result.csv";
pub const TIMING_JSON: &str = "timing.json";
pub const ERROR_JSON: &str = "error.json";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Library(#[from] pathscatter::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Library(pathscatter::Error::Numerical { .. }) => EXIT_NUMERICAL,
            Self::Library(pathscatter::Error::Domain(_)) => EXIT_DOMAIN,
        }
    }

    fn class(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Library(pathscatter::Error::Numerical { .. }) => "numerical",
            Self::Library(pathscatter::Error::Domain(_)) => "domain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDocument {
    pub command: String,
    pub class: String,
    pub message: String,
    pub exit_code: i32,
}

/// Wall-clock information, kept apart from the result so that result files
/// compare byte-for-byte between runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingDocument {
    pub command: String,
    pub seconds: f64,
    pub threads: usize,
}

fn io_error(path: &Path, e: std::io::Error) -> ConfigError {
    ConfigError::Io(format!("{}: {e}", path.display()))
}

/// Creates `dir` if needed and checks that a file can be written there.
pub fn prepare_output_dir(dir: &Path) -> Result<(), ConfigError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let probe = dir.join(".pathscatter-write-probe");
    fs::write(&probe, b"").map_err(|e| io_error(dir, e))?;
    fs::remove_file(&probe).map_err(|e| io_error(&probe, e))
}

fn write(path: PathBuf, contents: &[u8]) -> Result<(), ConfigError> {
    fs::write(&path, contents).map_err(|e| io_error(&path, e))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("result types serialize");
    s.push('\n');
    s.into_bytes()
}

pub fn write_outcome(dir: &Path, outcome: &Outcome, elapsed: Duration) -> Result<(), ConfigError> {
    write(dir.join(RESULT_JSON), &to_json(&outcome.document))?;
    write(dir.join(RESULT_CSV), outcome.csv.as_bytes())?;
    let timing = TimingDocument {
        command: outcome.document.config.command().name().to_string(),
        seconds: elapsed.as_secs_f64(),
        threads: rayon::current_num_threads(),
    };
    write(dir.join(TIMING_JSON), &to_json(&timing))
}

/// Best-effort `error.json`; failures to write it are ignored.
pub fn write_error(dir: &Path, command: Command, err: &RunError) {
    let doc = ErrorDocument {
        command: command.name().to_string(),
        class: err.class().to_string(),
        message: err.to_string(),
        exit_code: err.exit_code(),
    };
    let _ = fs::write(dir.join(ERROR_JSON), to_json(&doc));
}
