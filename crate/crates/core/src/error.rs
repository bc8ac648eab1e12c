use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("invalid sample space: {0}")]
    InvalidSpace(String),

    #[error("gamble has {got} values but the space has {expected} symbols")]
    Length { expected: usize, got: usize },

    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),

    /// A model representation whose construction preconditions fail.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("interval [{lo}, {hi}] is not inside the gamble range [{min}, {max}]")]
    IntervalOutsideRange { lo: String, hi: String, min: String, max: String },

    #[error("invalid strategy parameters: {0}")]
    InvalidStrategy(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("empty battery")]
    EmptyBattery,

    #[error("empty grid")]
    EmptyGrid,

    #[error("{0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}:{line}: unknown token {token:?}")]
    UnknownToken { path: String, line: usize, token: String },

    #[error("{path}: alphabet mismatch: file declares {found:?}, expected {expected:?}")]
    AlphabetMismatch { path: String, expected: Vec<String>, found: Vec<String> },

    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl Error {
    /// True for errors caused by a model, strategy or process that violates
    /// its own invariants (as opposed to unreadable input).
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::InvalidPmf(_)
                | Error::InvalidModel(_)
                | Error::IntervalOutsideRange { .. }
                | Error::InvalidStrategy(_)
                | Error::Contract(_)
                | Error::SpaceMismatch { .. }
                | Error::Length { .. }
                | Error::InvalidSpace(_)
        )
    }

    pub(crate) fn mismatch(left: &crate::space::SampleSpace, right: &crate::space::SampleSpace) -> Self {
        Error::SpaceMismatch { left: left.to_string(), right: right.to_string() }
    }
}
