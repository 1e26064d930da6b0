//! Append-only trial log: one JSON document per line.
//!
//! Line 1 is the header
//! `{"format", "toolkit_version", "config_hash", "seed", "problem",
//! "parameters", "objectives"}`. Every further line is one trial
//! `{"trial_id", "generation", "design", "status", "objectives" | "reason",
//! "rng_seed", "tag"}` in `trial_id` order. Objectives are stored in the
//! minimization convention (maximized quantities negated).
//!
//! Each record is written with a single `write` and flushed, so a crash can
//! only leave a partial final line. Readers drop such a line; any prefix of
//! the file that ends on a line boundary is a valid log.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use softopt_core::Trial;

use crate::config::ConfigHash;
use crate::problem::ProblemKind;
use crate::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub format: u32,
    pub toolkit_version: String,
    pub config_hash: ConfigHash,
    pub seed: u64,
    pub problem: ProblemKind,
    pub parameters: Vec<String>,
    pub objectives: Vec<String>,
}

impl LogHeader {
    pub fn new(
        config_hash: ConfigHash,
        seed: u64,
        problem: ProblemKind,
        parameters: Vec<String>,
        objectives: Vec<String>,
    ) -> Self {
        Self {
            format: FORMAT_VERSION,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
            seed,
            problem,
            parameters,
            objectives,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedLog {
    pub header: LogHeader,
    pub trials: Vec<Trial>,
    /// Length of the valid prefix in bytes.
    pub valid_len: u64,
    /// Whether a partial final line was dropped.
    pub truncated: bool,
}

pub fn read_log(path: &Path) -> Result<LoadedLog> {
    let bytes = std::fs::read(path).map_err(CliError::read(path))?;
    parse_log(&bytes).map_err(|detail| CliError::Log {
        path: path.to_path_buf(),
        detail,
    })
}

pub fn parse_log(bytes: &[u8]) -> std::result::Result<LoadedLog, String> {
    let mut header: Option<LogHeader> = None;
    let mut trials: Vec<Trial> = Vec::new();
    let mut pos = 0usize;
    let mut line_no = 0;
    while let Some(end) = bytes[pos..].iter().position(|&b| b == b'\n') {
        line_no += 1;
        let line = &bytes[pos..pos + end];
        pos += end + 1;
        let bad = |e: serde_json::Error| format!("line {line_no}: {e}");
        match &header {
            None => {
                let h: LogHeader = serde_json::from_slice(line).map_err(bad)?;
                if h.format != FORMAT_VERSION {
                    return Err(format!("unsupported log format {}", h.format));
                }
                header = Some(h);
            }
            Some(_) => {
                let t: Trial = serde_json::from_slice(line).map_err(bad)?;
                if t.trial_id != trials.len() as u64 {
                    return Err(format!(
                        "line {line_no}: expected trial_id {}, found {}",
                        trials.len(),
                        t.trial_id
                    ));
                }
                trials.push(t);
            }
        }
    }
    let header = header.ok_or("missing header line")?;
    Ok(LoadedLog {
        header,
        trials,
        valid_len: pos as u64,
        truncated: pos < bytes.len(),
    })
}

/// The single writer of a trial log.
pub struct TrialLogWriter {
    file: File,
    path: PathBuf,
}

impl TrialLogWriter {
    /// Starts a new log, replacing any existing file.
    pub fn create(path: &Path, header: &LogHeader) -> Result<Self> {
        let file = File::create(path).map_err(CliError::write(path))?;
        let mut w = Self {
            file,
            path: path.to_path_buf(),
        };
        w.write_line(&serde_json::to_string(header).expect("header serializes"))?;
        Ok(w)
    }

    /// Continues a log after cutting it back to its valid prefix.
    pub fn resume(path: &Path, loaded: &LoadedLog) -> Result<Self> {
        let file = OpenOptions::new()
            .write(true)
            .open(path)
            .map_err(CliError::write(path))?;
        file.set_len(loaded.valid_len).map_err(CliError::write(path))?;
        let file = OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(CliError::write(path))?;
        Ok(Self {
            file,
            path: path.to_path_buf(),
        })
    }

    pub fn append(&mut self, trial: &Trial) -> Result<()> {
        self.write_line(&serde_json::to_string(trial).expect("trial serializes"))
    }

    fn write_line(&mut self, json: &str) -> Result<()> {
        let mut line = String::with_capacity(json.len() + 1);
        line.push_str(json);
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .map_err(CliError::write(&self.path))?;
        self.file.flush().map_err(CliError::write(&self.path))
    }
}
