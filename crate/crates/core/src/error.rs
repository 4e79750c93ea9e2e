use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: unsupported schema version {found} (expected {expected})")]
    SchemaVersion {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("inventory grid too small in period {period}: {detail}")]
    GridTooSmall { period: usize, detail: String },

    #[error("inventory level {0} is not on the grid")]
    OffGrid(f64),

    #[error("model construction failed: {0}")]
    ModelBuild(String),

    #[error(
        "horizon {horizon} exceeds the enumeration bound {max}; export the model with export_lp and use an external MIP solver"
    )]
    HorizonTooLarge { horizon: usize, max: usize },

    #[error("model is infeasible: {0}")]
    Infeasible(String),

    #[error("model is unbounded: {0}")]
    Unbounded(String),

    #[error("solution file: {0}")]
    SolutionImport(String),

    #[error("constraint `{row}` violated by {violation:.3e}")]
    ConstraintViolation { row: String, violation: f64 },

    #[error("linking root not bracketed on [{low}, {high}]")]
    NotBracketed { low: f64, high: f64 },

    #[error("suffix k={k}: {source}")]
    Heuristic {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input data rather than a solver failure.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::InvalidArgument(_)
                | Error::Io { .. }
                | Error::Parse { .. }
                | Error::SchemaVersion { .. }
                | Error::SolutionImport(_)
                | Error::Csv(_)
                | Error::OffGrid(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
