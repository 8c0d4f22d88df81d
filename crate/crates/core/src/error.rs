use thiserror::Error;

/// Errors raised by graph construction, partitioning and scoring.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// An argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver hit its iteration cap.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// The graph or partition structure makes a measure undefined.
    #[error("degenerate structure: {0}")]
    Degenerate(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Parse { .. } | Error::Domain(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::Degenerate(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
