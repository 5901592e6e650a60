use alloc::string::String;

use thiserror::Error;

use crate::instance::{EdgeId, ValidationReport};
use crate::stability::{BlockingWalk, FlowViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("anchor not in preference order")]
    AnchorMissing,
    #[error("edge {0} is already ranked on that side")]
    AlreadyRanked(String),
    #[error("edge {0} is not completely forbidden")]
    NotForbidden(String),
    #[error("edge {0} is only partially forced; split it first")]
    PartiallyForced(String),
    #[error("unknown edge index {0}")]
    UnknownEdge(usize),
    #[error("unknown vertex index {0}")]
    UnknownVertex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("gadgetize ties first")]
    TiesPresent,
    #[error("malformed tie at man {0}")]
    MalformedTie(String),
    #[error("pair ({man}, {woman}) is not mutually acceptable")]
    Asymmetric { man: String, woman: String },
    #[error("duplicate entry on the list of {0}")]
    Duplicate(String),
    #[error("index out of range on the list of {0}")]
    OutOfRange(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("solver exceeded its iteration bound of {bound}")]
    IterationBound { bound: u64 },
    #[error("solver produced an infeasible flow: {0}")]
    Infeasible(FlowViolation),
    #[error("solver produced an unstable flow (blocking walk of {} edges)", .0.edges.len())]
    Unstable(BlockingWalk),
    #[error("warm start edge {0:?} does not leave a terminal")]
    NotASourceEdge(EdgeId),
    #[error("warm start flow does not match the instance: {0}")]
    BadPriorFlow(FlowViolation),
    #[error("result failed the independent audit: {0}")]
    AuditFailed(FlowViolation),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(BudgetLimit),
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// Which limit of an enumeration budget was hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BudgetLimit {
    #[error("{found} edges, at most {limit} allowed")]
    Edges { found: usize, limit: usize },
    #[error("capacity {found}, at most {limit} allowed")]
    Capacity { found: u64, limit: u64 },
    #[error("more than {limit} search states")]
    States { limit: u64 },
    #[error("time limit reached")]
    Time,
}
