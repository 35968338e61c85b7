use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for dimension {len}")]
    Index { index: usize, len: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("state not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid device: {0}")]
    InvalidDevice(String),

    #[error("response tensor is not an isometry (max |Gram - I| = {max_deviation:e})")]
    NotAnIsometry { max_deviation: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with any context layers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors that come from an unphysical response tensor.
    pub fn is_physicality(&self) -> bool {
        matches!(
            self.root(),
            Error::NotAnIsometry { .. } | Error::InvalidDevice(_)
        )
    }
}
