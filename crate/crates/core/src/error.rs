use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid bit value {0}, expected 0 or 1")]
    InvalidBit(u8),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("amplitude is not finite")]
    NonFinite,

    #[error("duration must be positive, got {0} s")]
    NonPositiveDuration(f64),

    #[error("{0} is undefined on empty input")]
    Undefined(&'static str),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}
