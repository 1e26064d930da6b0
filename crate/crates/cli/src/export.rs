//! Plot-ready CSV exports. Objective columns hold natural values (maximized
//! quantities positive).

use std::path::Path;

use softopt_core::{pareto_front, Outcome, Trial};

use crate::problem::{natural_values, ObjectiveSpec};
use crate::{CliError, Result};

fn write_rows(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(CliError::write(path))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Write {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    }
}

fn num(v: f64) -> String {
    v.to_string()
}

fn trial_header(parameters: &[String], objectives: &[ObjectiveSpec]) -> Vec<String> {
    let mut h = vec!["trial_id".to_string(), "generation".to_string()];
    h.extend(parameters.iter().cloned());
    h.extend(objectives.iter().map(|o| o.name.to_string()));
    h
}

fn trial_row(t: &Trial, objectives: &[ObjectiveSpec]) -> Vec<String> {
    let mut r = vec![t.trial_id.to_string(), t.generation.to_string()];
    r.extend(t.design.values().iter().copied().map(num));
    match t.objectives() {
        Some(o) => r.extend(natural_values(objectives, o).into_iter().map(num)),
        None => r.extend(objectives.iter().map(|_| String::new())),
    }
    r
}

/// Front-0 trials of the whole study. Returns the row count.
pub fn write_pareto(
    path: &Path,
    trials: &[Trial],
    parameters: &[String],
    objectives: &[ObjectiveSpec],
) -> Result<usize> {
    let front = pareto_front(trials);
    if front.no_successful_trials {
        log::warn!("no successful trials; {} is empty", path.display());
    }
    let rows: Vec<Vec<String>> = front.trials.iter().map(|t| trial_row(t, objectives)).collect();
    write_rows(path, &trial_header(parameters, objectives), &rows)?;
    Ok(rows.len())
}

/// Every trial with its status and failure reason.
pub fn write_all_trials(
    path: &Path,
    trials: &[Trial],
    parameters: &[String],
    objectives: &[ObjectiveSpec],
) -> Result<()> {
    let mut header = trial_header(parameters, objectives);
    header.insert(2, "status".into());
    header.push("reason".into());
    let rows: Vec<Vec<String>> = trials
        .iter()
        .map(|t| {
            let mut r = trial_row(t, objectives);
            let (status, reason) = match &t.outcome {
                Outcome::Ok { .. } => ("ok", String::new()),
                Outcome::Failed { reason } => ("failed", reason.clone()),
            };
            r.insert(2, status.into());
            r.push(reason);
            r
        })
        .collect();
    write_rows(path, &header, &rows)
}

/// One row of a mesh-density study.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConvergenceRow {
    pub target_nodes: usize,
    pub achieved_nodes: Option<usize>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub solve_seconds: f64,
    /// |f1 - f1 of the previous successful row|.
    pub abs_delta_f1: Option<f64>,
    /// `abs_delta_f1` per added node; empty when the node count is unchanged.
    pub delta_f1_per_node: Option<f64>,
    /// `ok` or the failure message.
    pub status: String,
}

pub fn write_convergence(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let header: Vec<String> = [
        "target_nodes",
        "achieved_nodes",
        "f1",
        "f2",
        "solve_seconds",
        "abs_delta_f1",
        "delta_f1_per_node",
        "status",
    ]
    .map(String::from)
    .to_vec();
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.target_nodes.to_string(),
                r.achieved_nodes.map(|n| n.to_string()).unwrap_or_default(),
                opt(r.f1),
                opt(r.f2),
                num(r.solve_seconds),
                opt(r.abs_delta_f1),
                opt(r.delta_f1_per_node),
                r.status.clone(),
            ]
        })
        .collect();
    write_rows(path, &header, &rows)
}

/// Appends `trial_id,eval_seconds` rows as trials complete. Kept apart from
/// the trial log because wall-clock time differs between runs.
pub struct TimingWriter {
    w: csv::Writer<std::fs::File>,
    path: std::path::PathBuf,
}

impl TimingWriter {
    pub fn open(path: &Path, append: bool) -> Result<Self> {
        let fresh = !append || !path.exists();
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(append)
            .write(true)
            .truncate(!append)
            .open(path)
            .map_err(CliError::write(path))?;
        let mut t = Self {
            w: csv::Writer::from_writer(file),
            path: path.to_path_buf(),
        };
        if fresh {
            t.row(["trial_id".into(), "eval_seconds".into()])?;
        }
        Ok(t)
    }

    pub fn record(&mut self, trial: &Trial) -> Result<()> {
        self.row([trial.trial_id.to_string(), num(trial.eval_seconds)])
    }

    fn row(&mut self, r: [String; 2]) -> Result<()> {
        self.w.write_record(&r).map_err(|e| csv_error(&self.path, e))?;
        self.w.flush().map_err(CliError::write(&self.path))
    }
}
