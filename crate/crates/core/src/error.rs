use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("vector is not unit-norm (norm {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("normalizing denominator vanishes ({0:e})")]
    VanishingDenominator(f64),

    #[error("infeasible model: {0}")]
    Infeasible(String),

    #[error("projection did not converge after {iterations} sweeps (sum residual {sum_residual:e}, min eigenvalue {min_eigenvalue:e})")]
    ProjectionDiverged {
        iterations: usize,
        sum_residual: f64,
        min_eigenvalue: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("parse error at line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column: None,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}
