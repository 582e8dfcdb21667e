use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("singular curve: the discriminant vanishes")]
    SingularCurve,
    #[error("rank deficient: {0}")]
    RankDeficient(String),
    #[error("resource limit reached: {0}")]
    ResourceLimit(String),
    #[error("outside the range of the theorem: {0}")]
    OutOfRange(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("point at infinity where an affine point is required")]
    NotAffine,
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceLimit(_) => 2,
            Error::Internal(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
