use thiserror::Error;

/// Failures shared by every module.
///
/// Exhausting a search budget is reported as [`Error::Budget`] and is never
/// confused with a refutation, which is an ordinary `Ok` result.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("search budget of {limit} nodes exhausted during {during}")]
    Budget { limit: u64, during: String },
    #[error("hom-table budget of {limit} entries exceeded (needed {needed})")]
    HomBudget { limit: u64, needed: u64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("objects live over different sites")]
    SiteMismatch,
    #[error("validity underflow: {0}")]
    ValidityUnderflow(String),
    #[error("fiber of size {size} is too large for a universe of bound {alpha}")]
    FiberTooLarge { size: usize, alpha: usize },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("malformed data: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
