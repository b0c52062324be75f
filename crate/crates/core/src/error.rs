use thiserror::Error;

use crate::instance::Label;

/// Errors raised by the oracle, the procedures and the verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller passed malformed input (empty pool, index out of range, bad flag value).
    #[error("usage error: {0}")]
    Usage(String),

    /// A procedure was invoked outside its documented domain.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The run classified an item differently from the ground truth.
    #[error("correctness violation: item {item} classified {got:?}, expected {expected:?}")]
    CorrectnessViolation {
        item: usize,
        expected: Label,
        got: Label,
    },

    /// Test or identification bookkeeping does not balance.
    #[error("accounting error: {0}")]
    Accounting(String),

    /// A transcript does not have the shape the analysis requires.
    #[error("structural error: {0}")]
    Structural(String),

    /// A request exceeds the configured enumeration or search limits.
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    /// A run on a particular instance failed; wraps the cause.
    #[error("run on defectives {defectives:?} failed: {cause}")]
    RunFailed {
        defectives: Vec<usize>,
        cause: Box<Error>,
    },

    /// An internal invariant failed; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
