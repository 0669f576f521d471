use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: u64, n: usize },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("{0}")]
    Domain(String),

    /// Labels or classes that contradict the graph they were derived from.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("{what}: {size} exceeds the limit of {limit}; {hint}")]
    TooLarge {
        what: &'static str,
        size: u64,
        limit: u64,
        hint: &'static str,
    },

    #[error("missing inputs: {}", .0.join(", "))]
    MissingInputs(Vec<&'static str>),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
