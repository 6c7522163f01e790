use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    /// An invariant that the construction guarantees was violated.
    #[error("internal error: {0}")]
    Internal(String),

    /// An extended formulation does not project onto the polytope it claims.
    #[error("projection failure: {0}")]
    Projection(String),

    /// An extended formulation whose LPs are infeasible or unbounded.
    #[error("malformed extended formulation: {0}")]
    Malformed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
