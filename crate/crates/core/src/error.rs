use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("contracted part must be a nonempty proper subset of the vertices")]
    BadContraction,
    #[error("source and sink coincide ({0})")]
    SameEndpoints(VertexId),
    #[error("need at least {needed} terminals or groups, got {got}")]
    TooFewTerminals { needed: usize, got: usize },
    #[error("seed sets overlap or are empty")]
    BadSeeds,
    #[error("only {available} edge-disjoint paths available, {requested} requested")]
    InsufficientConnectivity { requested: usize, available: u64 },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("instance too large: {size} exceeds bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
