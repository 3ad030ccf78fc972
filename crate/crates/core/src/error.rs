use alloc::string::String;

/// Errors reported by geometric operations and solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shrink factor {s} exceeds the admissible bound {bound}")]
    ShrinkTooLarge { s: f64, bound: f64 },
    #[error("point lies inside horoball {index}")]
    PointInsideHoroball { index: usize },
    #[error("packing violation between members {a} and {b}")]
    PackingViolation { a: usize, b: usize },
    #[error("start member {start} is blocked by larger member {blocker}")]
    StartBlocked { start: usize, blocker: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("exact mode requires rational data: {0}")]
    NotRational(String),
    #[error("search exhausted the truncated tree at vertex {vertex}")]
    TruncationExhausted { vertex: usize },
    #[error("empty input: {0}")]
    Empty(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
