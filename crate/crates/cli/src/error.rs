use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input file.
    #[error("{source_name}: {message}")]
    Validation { source_name: String, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] backcast_core::Error),
    #[error("optimizer stopped after {iterations} iterations without converging (stationarity {stationarity:e}, violation {violation:e} Mt)")]
    NotConverged {
        iterations: usize,
        stationarity: f64,
        violation: f64,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            source_name: source_name.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 bad input, 3 infeasible target, 4 solver not
    /// converged, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } | CliError::Config(_) => 2,
            CliError::Model(backcast_core::Error::Infeasible { .. }) => 3,
            CliError::Model(_) => 2,
            CliError::NotConverged { .. } => 4,
            CliError::Io { .. } => 1,
        }
    }
}
