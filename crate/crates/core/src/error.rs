use std::io;

use thiserror::Error;

/// Errors raised by graph construction, file ingestion and the drop pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("node id {node} out of range (graph has {num_nodes} nodes)")]
    NodeOutOfRange { node: u64, num_nodes: usize },

    #[error("{what}: expected {expected}, found {actual}")]
    CountMismatch {
        what: String,
        expected: usize,
        actual: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    #[error("malformed binary graph: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn out_of_range(node: u64, num_nodes: usize) -> Self {
        Error::NodeOutOfRange { node, num_nodes }
    }
}
