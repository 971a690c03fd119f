use thiserror::Error;

/// Errors raised by the numerical routines and the scan driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("memory budget exceeded: requested {requested} bytes with a limit of {limit} bytes")]
    Resource { requested: u64, limit: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("charge assignment violated by {} tensor entries, first: {}", .0.len(), describe_first(.0))]
    ChargeInconsistent(Vec<ChargeViolation>),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("decomposition failed: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One tensor entry `A[phys][left][right]` that is nonzero although the
/// bond charges say it must vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeViolation {
    pub phys: usize,
    pub left: usize,
    pub right: usize,
    pub magnitude: f64,
}

fn describe_first(v: &[ChargeViolation]) -> String {
    match v.first() {
        Some(c) => format!("A[{}][{}][{}] = {:.3e}", c.phys, c.left, c.right, c.magnitude),
        None => "none".into(),
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
