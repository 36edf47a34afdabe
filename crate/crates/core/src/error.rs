use thiserror::Error;

/// Errors raised by the fitting and search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("no varying predictors")]
    NoVaryingPredictors,

    #[error("degenerate response")]
    DegenerateResponse,

    #[error("degenerate response in the training rows of fold {fold}")]
    DegenerateFold { fold: usize },

    #[error("numeric failure at alpha={alpha}, lambda={lambda}: {reason}")]
    NumericFailure {
        alpha: f64,
        lambda: f64,
        reason: String,
    },

    #[error("alpha={alpha}: {source}")]
    AtAlpha {
        alpha: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at_alpha(self, alpha: f64) -> Self {
        match self {
            e @ Error::AtAlpha { .. } => e,
            e => Error::AtAlpha {
                alpha,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, with any alpha annotation stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtAlpha { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures caused by the input data rather than by the numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self.root(),
            Error::InvalidData(_)
                | Error::NoVaryingPredictors
                | Error::DegenerateResponse
                | Error::DegenerateFold { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
