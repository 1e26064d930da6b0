//! The work behind each CLI verb, free of argument parsing and printing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use softopt_core::nsga2::{run_with, RunOptions};
use softopt_core::{oat_analysis, Executor, SensitivityReport, Study};
use softopt_finger::{FingerDesign, FingerModel, Problem};

use crate::config::StudyConfig;
use crate::export::{write_all_trials, write_convergence, write_pareto, ConvergenceRow, TimingWriter};
use crate::problem::{effective_globals, load_finger_design, ProblemKind};
use crate::triallog::{read_log, LogHeader, TrialLogWriter};
use crate::{CliError, Result};

pub const LOG_FILE: &str = "trials.jsonl";
pub const TIMINGS_FILE: &str = "timings.csv";
pub const PARETO_FILE: &str = "pareto.csv";
pub const ALL_TRIALS_FILE: &str = "all_trials.csv";
pub const SENSITIVITY_FILE: &str = "sensitivity.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(CliError::write(dir))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeSummary {
    pub log: PathBuf,
    pub trials: usize,
    /// Trials taken from an existing log instead of being evaluated.
    pub replayed: usize,
    pub failed: usize,
    pub pareto_rows: usize,
    pub pareto_csv: PathBuf,
    pub all_trials_csv: PathBuf,
}

/// Runs NSGA-II and writes the trial log plus the CSV exports into
/// `config.output_dir`. With `resume`, trials already in the log are
/// replayed and the study continues to the configured budget.
pub fn optimize(config: &StudyConfig, resume: bool) -> Result<(Study, OptimizeSummary)> {
    let problem = config.problem_definition()?;
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let log_path = dir.join(LOG_FILE);
    let header = LogHeader::new(
        config.hash(),
        config.solver.seed,
        config.problem,
        problem.parameter_names(),
        problem.objective_names(),
    );

    let mut replay = Vec::new();
    let mut writer = if resume && log_path.exists() {
        let loaded = read_log(&log_path)?;
        if loaded.header.config_hash != header.config_hash
            || loaded.header.seed != header.seed
            || loaded.header.parameters != header.parameters
            || loaded.header.objectives != header.objectives
        {
            return Err(CliError::Log {
                path: log_path,
                detail: format!(
                    "written for config {} (seed {}), cannot resume with config {} (seed {})",
                    loaded.header.config_hash, loaded.header.seed, header.config_hash, header.seed
                ),
            });
        }
        if loaded.truncated {
            log::warn!("dropping a partial final record from {}", log_path.display());
        }
        let writer = TrialLogWriter::resume(&log_path, &loaded)?;
        replay = loaded.trials;
        writer
    } else {
        if resume {
            log::warn!("no trial log at {}; starting a new study", log_path.display());
        }
        TrialLogWriter::create(&log_path, &header)?
    };
    let mut timings = TimingWriter::open(&dir.join(TIMINGS_FILE), resume)?;

    let options = RunOptions {
        executor: Executor::with_workers(config.workers),
        replay: &replay,
    };
    let study = run_with(
        &problem.space,
        |x| problem.evaluate(x),
        &config.solver,
        options,
        &mut |t| {
            log::debug!("trial {} ({}): {:?}", t.trial_id, t.tag, t.outcome);
            writer
                .append(t)
                .and_then(|_| timings.record(t))
                .map_err(|e| e.to_string())
        },
    )?;

    let params = problem.parameter_names();
    let pareto_csv = dir.join(PARETO_FILE);
    let all_trials_csv = dir.join(ALL_TRIALS_FILE);
    let pareto_rows = write_pareto(&pareto_csv, &study.trials, &params, &problem.objectives)?;
    write_all_trials(&all_trials_csv, &study.trials, &params, &problem.objectives)?;
    let summary = OptimizeSummary {
        log: log_path,
        trials: study.trials.len(),
        replayed: replay.len().min(study.trials.len()),
        failed: study.trials.iter().filter(|t| !t.outcome.is_ok()).count(),
        pareto_rows,
        pareto_csv,
        all_trials_csv,
    };
    Ok((study, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoSummary {
    pub trials: usize,
    pub pareto_rows: usize,
    pub pareto_csv: PathBuf,
    pub all_trials_csv: PathBuf,
}

/// Re-extracts the front and the trial table from an existing log.
pub fn pareto(log_path: &Path, out_dir: &Path) -> Result<ParetoSummary> {
    let log = read_log(log_path)?;
    if log.truncated {
        log::warn!("ignoring a partial final record in {}", log_path.display());
    }
    ensure_dir(out_dir)?;
    let specs = log.header.problem.objectives();
    let pareto_csv = out_dir.join(PARETO_FILE);
    let all_trials_csv = out_dir.join(ALL_TRIALS_FILE);
    let pareto_rows = write_pareto(&pareto_csv, &log.trials, &log.header.parameters, &specs)?;
    write_all_trials(&all_trials_csv, &log.trials, &log.header.parameters, &specs)?;
    Ok(ParetoSummary {
        trials: log.trials.len(),
        pareto_rows,
        pareto_csv,
        all_trials_csv,
    })
}

/// One-at-a-time sensitivity around the baseline design file, written to
/// `sensitivity.csv` in the output directory.
pub fn sensitivity(config: &StudyConfig, design: &str) -> Result<(SensitivityReport, PathBuf)> {
    let mut problem = config.problem_definition()?;
    let (baseline, _) = problem.load_design(design, true)?;
    let exec = Executor::with_workers(config.workers);
    let report = oat_analysis(
        &problem.space,
        &baseline,
        |x| problem.evaluate(x),
        &problem.objective_names(),
        &exec,
    )?;
    for p in &report.failed_probes {
        let side = if p.at_upper { "upper" } else { "lower" };
        log::warn!("probe of {} at its {side} bound failed: {}", p.parameter, p.reason);
    }
    ensure_dir(&config.output_dir)?;
    let path = config.output_dir.join(SENSITIVITY_FILE);
    std::fs::write(&path, report.to_csv()).map_err(CliError::write(&path))?;
    Ok((report, path))
}

/// Deformation objectives of one design at each node target. Failures are
/// recorded in the row and the sweep continues.
pub fn convergence(model: &FingerModel, design: &FingerDesign, targets: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if targets.len() < 2 {
        return Err(CliError::Input(
            "a convergence study needs at least two node targets".into(),
        ));
    }
    design.with_globals(model.globals).validate()?;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut previous: Option<(usize, f64)> = None;
    for &target in targets {
        let mut m = model.clone();
        m.meshing.target_nodes = target;
        let mut row = ConvergenceRow {
            target_nodes: target,
            achieved_nodes: None,
            f1: None,
            f2: None,
            solve_seconds: 0.0,
            abs_delta_f1: None,
            delta_f1_per_node: None,
            status: "ok".into(),
        };
        let result = m.mesh(design).and_then(|mesh| {
            row.achieved_nodes = Some(mesh.node_count());
            let t0 = Instant::now();
            let d = m.deformation_on(&mesh);
            row.solve_seconds = t0.elapsed().as_secs_f64();
            d
        });
        match result {
            Ok(d) => {
                row.f1 = Some(d.f1);
                row.f2 = Some(d.f2);
                if let Some((n0, f0)) = previous {
                    let delta = (d.f1 - f0).abs();
                    row.abs_delta_f1 = Some(delta);
                    if d.node_count != n0 {
                        row.delta_f1_per_node = Some(delta / (d.node_count as f64 - n0 as f64).abs());
                    }
                }
                previous = Some((d.node_count, d.f1));
            }
            Err(e) => {
                log::warn!("node target {target}: {e}");
                row.status = e.to_string();
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_convergence_csv(dir: &Path, rows: &[ConvergenceRow]) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(CONVERGENCE_FILE);
    write_convergence(&path, rows)?;
    Ok(path)
}

/// Objectives of one design in natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateReport {
    pub problem: ProblemKind,
    pub design: BTreeMap<String, f64>,
    pub objectives: BTreeMap<String, f64>,
    pub units: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_count: Option<usize>,
}

impl EvaluateReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "problem: {}\n",
            serde_json::to_string(&self.problem).unwrap().trim_matches('"')
        );
        for (k, v) in &self.design {
            let _ = writeln!(s, "  {k} = {v}");
        }
        if let Some(n) = self.node_count {
            let _ = writeln!(s, "nodes: {n}");
        }
        for (k, v) in &self.objectives {
            let _ = writeln!(s, "{k} = {v:.6} {}", self.units[k]);
        }
        s
    }
}

pub fn evaluate(config: &StudyConfig, design: &str) -> Result<EvaluateReport> {
    let mut problem = config.problem_definition()?;
    let specs = problem.objectives.clone();
    let (values, node_count, x) = if problem.kind.is_finger() {
        let d = load_finger_design(design)?;
        let mut model = problem.model.clone();
        model.globals = effective_globals(&d, model.globals);
        let d = d.with_globals(model.globals);
        d.validate()?;
        let kind = match problem.kind {
            ProblemKind::Pressure => Problem::Pressure,
            _ => Problem::Deformation,
        };
        let values = model.objectives(kind, &d)?;
        let nodes = model.mesh(&d)?.node_count();
        (values, Some(nodes), d.to_vector())
    } else {
        let (x, _) = problem.load_design(design, false)?;
        let out = problem.evaluate(&x);
        let values = match out.objectives() {
            Some(o) => o.values().to_vec(),
            None => return Err(CliError::Solver(format!("{out:?}"))),
        };
        (values, None, x)
    };
    let natural: Vec<f64> = specs
        .iter()
        .zip(values)
        .map(|(s, v)| if s.maximize { -v } else { v })
        .collect();
    Ok(EvaluateReport {
        problem: problem.kind,
        design: problem
            .parameter_names()
            .into_iter()
            .zip(x.values().iter().copied())
            .collect(),
        objectives: specs.iter().map(|s| s.name.to_string()).zip(natural).collect(),
        units: specs.iter().map(|s| (s.name.to_string(), s.unit.to_string())).collect(),
        node_count,
    })
}
