use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown element {0}")]
    UnknownElement(usize),

    #[error("{what} exceeds budget {limit} (reached {partial})")]
    BudgetExceeded {
        what: &'static str,
        limit: usize,
        partial: usize,
    },

    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("internal contradiction: {0}")]
    InternalContradiction(String),

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
