use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown suite `{name}`; available suites: {available}")]
    UnknownSuite { name: String, available: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("missing inputs: {}", .0.join(", "))]
    MissingInputs(Vec<String>),

    #[error("digest mismatch for {path}: manifest records {expected}, file has {actual}")]
    Digest {
        path: PathBuf,
        expected: String,
        actual: String,
    },

    #[error("{failed} of {total} verification probes failed")]
    Verification { failed: usize, total: usize },

    #[error(transparent)]
    Model(#[from] levywalk::Error),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::UnknownSuite { .. } => EXIT_CONFIG,
            CliError::Model(
                levywalk::Error::InvalidParameter { .. } | levywalk::Error::MixingDensity { .. },
            ) => EXIT_CONFIG,
            CliError::Io { .. } | CliError::MissingInputs(_) | CliError::Digest { .. } => EXIT_IO,
            CliError::Verification { .. } => EXIT_VERIFICATION,
            CliError::Model(_) | CliError::Other(_) => EXIT_FAILURE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
