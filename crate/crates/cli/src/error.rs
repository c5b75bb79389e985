use std::path::PathBuf;

use shrinkreg_sim::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Input { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Estimator(#[from] shrinkreg::Error),

    #[error(transparent)]
    Simulation(#[from] SimError),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 2 for bad input, 3 for numerical failures and 1
    /// for I/O trouble outside the program's control.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Estimator(e) if e.is_validation() => 2,
            CliError::Simulation(e) if e.is_validation() => 2,
            CliError::Estimator(_) | CliError::Simulation(SimError::Estimator(_)) => 3,
            CliError::Simulation(_) | CliError::Io { .. } | CliError::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
