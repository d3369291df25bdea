use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} for `{name}` is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("bracket expansion exceeded {limit:e} without reaching the target level")]
    BracketExpansion { limit: f64 },

    #[error("bisection did not reach tolerance {tol:e} (best residual {residual:e})")]
    NotConverged { tol: f64, residual: f64 },

    #[error("basis is rank deficient (rank {rank} < {len})")]
    RankDeficient { rank: usize, len: usize },

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("expected verdict not reproduced: {0}")]
    VerdictMismatch(String),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn is_precondition(&self) -> bool {
        matches!(self, Error::PreconditionUnmet(_))
    }
}
