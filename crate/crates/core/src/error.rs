use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("cell index {index} out of range 1..={n_cells}")]
    IndexOutOfRange { index: usize, n_cells: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("singular pivot at row {index}")]
    SingularPivot { index: usize },

    #[error("non-finite value in {context} at cell {cell}")]
    NonFinite { context: &'static str, cell: usize },

    #[error("time march failed at step {step}: {source}")]
    March {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("characteristic iteration did not converge at x = {x}, t = {t}")]
    Characteristics { x: f64, t: f64 },

    #[error("steady solve did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("{scheme} on {n_cells} cells: {source}")]
    Run {
        scheme: String,
        n_cells: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems, 1 for
    /// numerical or I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidGrid(_) => 2,
            Error::Run { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
