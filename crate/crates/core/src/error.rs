use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid measure parameter: {0}")]
    InvalidParameter(String),

    #[error("moments available up to degree {available}, but degree {needed} is required")]
    InsufficientMoments { needed: u32, available: u32 },

    #[error("moment Gram matrix at level {level} is not positive semidefinite: {detail}")]
    NotPositiveSemidefinite { level: usize, detail: String },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("polynomial degree {degree} exceeds decomposition level {max_level}")]
    DegreeTooHigh { degree: i64, max_level: usize },

    #[error("internal invariant breached: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::DimensionMismatch { .. }
            | Error::SingularMatrix(_)
            | Error::Precondition(_)
            | Error::DegreeTooHigh { .. } => 1,
            Error::InvalidParameter(_)
            | Error::InsufficientMoments { .. }
            | Error::NotPositiveSemidefinite { .. } => 2,
            Error::Internal(_) => 3,
        }
    }
}
