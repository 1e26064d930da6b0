use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config {path}: {detail}")]
    Config { path: PathBuf, detail: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("infeasible design: {0}")]
    Infeasible(String),

    #[error("trial log {path}: {detail}")]
    Log { path: PathBuf, detail: String },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for user and configuration errors, 3 for internal failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. }
            | CliError::Input(_)
            | CliError::Infeasible(_)
            | CliError::Log { .. }
            | CliError::Read { .. } => 2,
            CliError::Solver(_) | CliError::Write { .. } => 3,
        }
    }

    pub fn read(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Read {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn write(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<softopt_finger::Error> for CliError {
    fn from(e: softopt_finger::Error) -> Self {
        use softopt_finger::Error as E;
        match e {
            E::Infeasible { .. } | E::NodeTarget { .. } => CliError::Infeasible(e.to_string()),
            E::InvalidMeshing(_) | E::DesignFile(_) | E::Io(_) => CliError::Input(e.to_string()),
            E::NotConverged { .. } | E::Fem(_) => CliError::Solver(e.to_string()),
        }
    }
}

impl From<softopt_core::Error> for CliError {
    fn from(e: softopt_core::Error) -> Self {
        use softopt_core::Error as E;
        match e {
            E::GenerationFailed { .. } | E::BaselineFailed(_) | E::Observer(_) => CliError::Solver(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}
