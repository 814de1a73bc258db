use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("lowest-order coefficient vanishes, series is not invertible")]
    ZeroLeadingTerm,
    #[error("infinite product does not truncate: {0}")]
    NonTruncating(String),
    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),
    #[error("bilateral sum diverges: {0}")]
    Divergent(String),
    #[error("series is zero on the requested window")]
    ZeroSeries,
    #[error("window of {available} exponents is too small, need at least {needed}")]
    WindowTooSmall { available: usize, needed: usize },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    Singular,
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("required scale {0} exceeds the configured cap")]
    ScaleOverflow(String),
    #[error("denominator series vanishes identically: {0}")]
    DivisionByZeroSeries(String),
    #[error("factor 1 - a q^(2n) vanishes at n = {0}")]
    PoleAtUnit(usize),
    #[error("Bailey pair of length {len} is too short for order {order}")]
    InsufficientLength { len: usize, order: String },
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("invalid binding: {0}")]
    InvalidBinding(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
