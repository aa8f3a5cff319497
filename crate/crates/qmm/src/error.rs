use thiserror::Error;

/// Crate-wide error type. The CLI maps variants onto exit codes:
/// configuration problems exit 2, numerical precondition failures exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient periodicity: {0}")]
    InsufficientPeriodicity(String),

    #[error("unphysical parameters: {0}")]
    Unphysical(String),

    #[error("norm violation: {0}")]
    NormViolation(String),

    #[error("CFL violation: {0}")]
    Cfl(String),

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("charge-basis truncation too small: {0}")]
    Truncation(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("parse error in {0}: {1}")]
    Parse(String, String),
}

impl Error {
    /// Exit code contract: 0 success, 2 config error, 3 numerical
    /// precondition failure, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(..) => 2,
            Error::Precondition(_)
            | Error::InsufficientPeriodicity(_)
            | Error::Unphysical(_)
            | Error::NormViolation(_)
            | Error::Cfl(_)
            | Error::NoConvergence(_)
            | Error::Truncation(_) => 3,
            Error::Io { .. } => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
