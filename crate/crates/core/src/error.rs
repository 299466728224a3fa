use thiserror::Error;

pub type Result<T, E = MelonError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MelonError {
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    Dimension { rows: usize, cols: usize },

    #[error("{what}: {requested} exceeds the supported limit of {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl MelonError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        MelonError::Domain(msg.into())
    }
}
