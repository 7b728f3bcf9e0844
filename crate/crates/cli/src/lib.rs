//! Command implementations behind the `conslaw` binary: configuration
//! loading, the eight subcommands and their file outputs.
//!
//! Every run reads one structured config file, writes its artifacts under
//! an output directory and finishes with a `manifest.json` echoing the
//! resolved configuration, so a run can be reproduced from its artifacts
//! alone.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::path::PathBuf;

/// Why a run failed, mapped onto the process exit code: configuration
/// problems exit 2, everything else (tolerance violations included)
/// exits 1.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Tolerance(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Tolerance(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "config error: {msg}"),
            Failure::Tolerance(msg) => write!(f, "tolerance failure: {msg}"),
            Failure::Runtime(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl From<conslaw_core::Error> for Failure {
    fn from(e: conslaw_core::Error) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

/// Flags shared by every subcommand, already resolved against defaults.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub tolerance: Option<f64>,
}
