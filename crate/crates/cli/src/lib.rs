//! Configuration-driven front end that turns the core computations into
//! plot-ready CSV and JSON files.

use std::path::PathBuf;

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_ep, cmd_phases, cmd_sweep, cmd_wavefunction, Context};
pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] ptscatter_core::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical or bracket failures,
    /// 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Output(_) => 1,
        }
    }
}
