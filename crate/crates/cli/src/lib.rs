//! File formats and command implementations for the `stableflow` tool.
//!
//! Instances, flows and matching instances are read and written as JSON
//! (see [`format`]). Every subcommand yields an [`commands::Outcome`]: exit
//! code 0 for success, 2 for a negative verdict (infeasible, unstable, a
//! counterexample) and 1 for bad input or an exhausted search budget.

pub mod commands;
pub mod error;
pub mod format;
pub mod schema;

pub use commands::{Code, Outcome};
pub use error::{Error, FormatError};
