//! Stable flows on networks with preferences, with forced, forbidden and
//! free edges.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! * [`instance`]: the network model, validation and the normalizing
//!   edge splits.
//! * [`matching`]: bipartite matching instances, weak stability and the
//!   matching to flow transition.
//! * [`stability`]: feasibility checks and blocking-walk search.
//! * [`gale_shapley`]: the preflow-push Gale-Shapley solver.
//! * [`restricted`]: stable flows with forced and forbidden edges.
//! * [`oracle`]: exhaustive enumeration used as ground truth.
//! * [`gadgets`]: the tie gadget for free edges and fixed example instances.
//! * [`generate`]: seeded random instances.
#![no_std]

extern crate alloc;

pub mod error;
pub mod gadgets;
pub mod gale_shapley;
pub mod generate;
pub mod instance;
pub mod matching;
pub mod oracle;
pub mod restricted;
pub mod stability;

pub use error::{BudgetLimit, InstanceError, MatchingError, OracleError, SolveError};
pub use gale_shapley::{solve_on_augmented, solve_stable_flow, SolveStats};
pub use instance::{
    flow_value, terminal_profile, validate, Edge, EdgeId, EdgeMap, Flow, Instance, Preference,
    RestrictionSet, Side, ValidationReport, Vertex, VertexId, Violation,
};
pub use matching::{Matching, MatchingInstance};
pub use oracle::{EnumerationBudget, Objective, Oracle};
pub use restricted::{solve_forbidden, solve_forced, solve_restricted, Verdict};
pub use stability::{
    check_feasible, find_blocking_walk, is_stable, BlockingWalk, BoundCheck, FlowViolation,
    Witness,
};
