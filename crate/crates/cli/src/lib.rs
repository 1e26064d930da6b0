//! Library side of the `softopt` command: study configuration, the problems
//! it can optimize, the crash-safe trial log and the CSV exports.

pub mod commands;
pub mod config;
mod error;
pub mod export;
pub mod problem;
pub mod triallog;

pub use config::{ConfigHash, StudyConfig};
pub use error::{CliError, Result};
pub use problem::{ProblemKind, StudyProblem};
