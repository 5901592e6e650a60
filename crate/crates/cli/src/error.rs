use std::path::PathBuf;

use stableflow_core::instance::ValidationReport;
use stableflow_core::{MatchingError, OracleError, SolveError};

/// Problems reading an input file.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate id {0}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(String),
    #[error("{context}: unknown vertex {name}")]
    UnknownVertex { context: String, name: String },
    #[error("{context}: unknown edge {name}")]
    UnknownEdge { context: String, name: String },
    #[error("a flow must be a JSON object of edge ids to values")]
    FlowShape,
    #[error("flow value of {0} is not a non-negative integer")]
    FlowValue(String),
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("invalid matching instance: {0}")]
    Matching(#[from] MatchingError),
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("unknown schema {0}")]
    UnknownSchema(String),
}
