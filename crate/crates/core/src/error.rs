use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient scales: {0}")]
    InsufficientScales(String),

    #[error("degenerate regression: log-scales have zero variance")]
    DegenerateRegression,

    #[error("degenerate series: {method} has zero fluctuation at scale {scale}")]
    DegenerateSeries { method: &'static str, scale: usize },

    #[error("cell failure: all {failed} replications failed ({last_error})")]
    CellFailure { failed: usize, last_error: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("ordering error: timestamp on line {line} precedes the previous row")]
    Ordering { line: u64 },

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.kind() {
            csv::ErrorKind::Io(_) => Error::Io(err.to_string()),
            _ => Error::Format(err.to_string()),
        }
    }
}
