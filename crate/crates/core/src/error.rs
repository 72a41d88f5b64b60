use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OverlapError {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },
    #[error("singular point in {op}: {msg}")]
    Singular { op: &'static str, msg: String },
    #[error("overflow in {op}")]
    Overflow { op: &'static str },
    #[error("no convergence in {op} after {iters} iterations")]
    NoConvergence { op: &'static str, iters: usize },
    #[error("breakdown in {op}: {msg}")]
    Breakdown { op: &'static str, msg: String },
    #[error("consistency error in {op}: {msg}")]
    Consistency { op: &'static str, msg: String },
    #[error("degenerate input in {op}: {msg}")]
    Degenerate { op: &'static str, msg: String },
}

pub type Result<T> = std::result::Result<T, OverlapError>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> OverlapError {
    OverlapError::Domain { op, msg: msg.into() }
}

pub(crate) fn singular(op: &'static str, msg: impl Into<String>) -> OverlapError {
    OverlapError::Singular { op, msg: msg.into() }
}
