//! One-at-a-time sensitivity analysis: each parameter is moved to its lower
//! and upper bound while the others stay at the baseline.

use std::fmt::Write as _;

use crate::{DesignSpace, DesignVector, Error, Executor, ObjectiveVector, Outcome, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSensitivity {
    pub parameter: String,
    /// Largest absolute change of the objective over the two bound probes.
    pub raw: f64,
    /// `raw` divided by the largest `raw` of this objective (0 if all are 0).
    pub normalized: f64,
}

/// A bound probe whose evaluation failed and was left out of the maxima.
#[derive(Debug, Clone, PartialEq)]
pub struct FailedProbe {
    pub parameter: String,
    pub at_upper: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub baseline: DesignVector,
    pub baseline_objectives: ObjectiveVector,
    pub objective_names: Vec<String>,
    /// `per_objective[j][i]`: objective `j`, parameter `i`.
    pub per_objective: Vec<Vec<ParamSensitivity>>,
    pub failed_probes: Vec<FailedProbe>,
    pub evaluations: usize,
}

impl SensitivityReport {
    pub fn column(&self, objective: usize) -> &[ParamSensitivity] {
        &self.per_objective[objective]
    }

    /// Parameter names of `objective`, most sensitive first. Ties keep
    /// parameter order.
    pub fn ranking(&self, objective: usize) -> Vec<&str> {
        let mut col: Vec<&ParamSensitivity> = self.per_objective[objective].iter().collect();
        col.sort_by(|a, b| b.normalized.total_cmp(&a.normalized));
        col.into_iter().map(|p| p.parameter.as_str()).collect()
    }

    /// `parameter,objective,raw,normalized` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,objective,raw,normalized\n");
        for (name, column) in self.objective_names.iter().zip(&self.per_objective) {
            for p in column {
                let _ = writeln!(out, "{},{},{},{}", p.parameter, name, p.raw, p.normalized);
            }
        }
        out
    }
}

/// Runs `2 d + 1` evaluations (fewer rows contribute when a probe fails).
/// Probes are evaluated through `exec`; the report does not depend on it.
pub fn oat_analysis<F>(
    space: &DesignSpace,
    baseline: &DesignVector,
    evaluator: F,
    objective_names: &[String],
    exec: &Executor,
) -> Result<SensitivityReport>
where
    F: Fn(&DesignVector) -> Outcome + Sync + Send,
{
    space.check(baseline.values())?;
    let m = objective_names.len();

    let mut probes = vec![baseline.clone()];
    for (i, p) in space.params().iter().enumerate() {
        probes.push(space.with_coordinate(baseline, i, p.lower));
        probes.push(space.with_coordinate(baseline, i, p.upper));
    }
    let outcomes = exec.map(&probes, |x| evaluator(x));

    let base = match &outcomes[0] {
        Outcome::Ok { objectives } => objectives.clone(),
        Outcome::Failed { reason } => return Err(Error::BaselineFailed(reason.clone())),
    };
    if base.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: base.len(),
        });
    }

    let mut raw = vec![vec![0.0f64; space.dim()]; m];
    let mut failed_probes = Vec::new();
    for (i, p) in space.params().iter().enumerate() {
        for (k, at_upper) in [(1 + 2 * i, false), (2 + 2 * i, true)] {
            match &outcomes[k] {
                Outcome::Ok { objectives } => {
                    if objectives.len() != m {
                        return Err(Error::LengthMismatch {
                            expected: m,
                            found: objectives.len(),
                        });
                    }
                    for j in 0..m {
                        let d = (objectives[j] - base[j]).abs();
                        raw[j][i] = raw[j][i].max(d);
                    }
                }
                Outcome::Failed { reason } => failed_probes.push(FailedProbe {
                    parameter: p.name.clone(),
                    at_upper,
                    reason: reason.clone(),
                }),
            }
        }
    }

    let per_objective = raw
        .into_iter()
        .map(|col| {
            let max = col.iter().copied().fold(0.0, f64::max);
            space
                .params()
                .iter()
                .zip(col)
                .map(|(p, r)| ParamSensitivity {
                    parameter: p.name.clone(),
                    raw: r,
                    normalized: if max > 0.0 { r / max } else { 0.0 },
                })
                .collect()
        })
        .collect();

    Ok(SensitivityReport {
        baseline: baseline.clone(),
        baseline_objectives: base,
        objective_names: objective_names.to_vec(),
        per_objective,
        failed_probes,
        evaluations: probes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Param;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn unit_space(d: usize) -> DesignSpace {
        DesignSpace::new((0..d).map(|i| Param::new(format!("x{i}"), 0.0, 1.0, "")).collect()).unwrap()
    }

    fn ok(v: Vec<f64>) -> Outcome {
        Outcome::Ok {
            objectives: ObjectiveVector::new(v).unwrap(),
        }
    }

    fn names(m: usize) -> Vec<String> {
        (0..m).map(|j| format!("f{}", j + 1)).collect()
    }

    #[test]
    fn constant_evaluator_gives_zero() {
        let space = unit_space(3);
        let r = oat_analysis(
            &space,
            &space.center(),
            |_| ok(vec![4.0]),
            &names(1),
            &Executor::sequential(),
        )
        .unwrap();
        assert!(r.column(0).iter().all(|p| p.raw == 0.0 && p.normalized == 0.0));
    }

    #[test]
    fn linear_first_coordinate() {
        let space = unit_space(2);
        let count = AtomicUsize::new(0);
        let r = oat_analysis(
            &space,
            &space.vector(vec![0.5, 0.5]).unwrap(),
            |x| {
                count.fetch_add(1, Ordering::SeqCst);
                ok(vec![x[0]])
            },
            &names(1),
            &Executor::sequential(),
        )
        .unwrap();
        assert_eq!(count.into_inner(), 5);
        assert_eq!(r.evaluations, 5);
        assert_eq!(r.column(0)[0].raw, 0.5);
        assert_eq!(r.column(0)[0].normalized, 1.0);
        assert_eq!(r.column(0)[1].normalized, 0.0);
        assert_eq!(r.ranking(0), vec!["x0", "x1"]);
    }

    #[test]
    fn positive_scaling_keeps_normalized_column() {
        let space = unit_space(3);
        let f = |x: &DesignVector| ok(vec![x[0] * x[0] + 0.3 * x[1] - x[2], 2.0 * x[1]]);
        let base = space.vector(vec![0.2, 0.7, 0.4]).unwrap();
        let a = oat_analysis(&space, &base, f, &names(2), &Executor::sequential()).unwrap();
        let b = oat_analysis(
            &space,
            &base,
            |x| ok(vec![37.0 * (x[0] * x[0] + 0.3 * x[1] - x[2]), 2.0 * x[1]]),
            &names(2),
            &Executor::with_workers(3),
        )
        .unwrap();
        for (p, q) in a.column(0).iter().zip(b.column(0)) {
            assert!((p.normalized - q.normalized).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&p.normalized));
        }
        assert_eq!(a.column(0).iter().filter(|p| p.normalized == 1.0).count(), 1);
    }

    #[test]
    fn failed_probe_is_flagged_and_skipped() {
        let space = unit_space(2);
        let r = oat_analysis(
            &space,
            &space.center(),
            |x| {
                if x[1] == 1.0 {
                    Outcome::Failed {
                        reason: "infeasible".into(),
                    }
                } else {
                    ok(vec![x[0] + 2.0 * x[1]])
                }
            },
            &names(1),
            &Executor::sequential(),
        )
        .unwrap();
        assert_eq!(r.failed_probes.len(), 1);
        assert!(r.failed_probes[0].at_upper);
        assert_eq!(r.column(0)[1].raw, 1.0);
    }

    #[test]
    fn baseline_failure_aborts() {
        let space = unit_space(1);
        let err = oat_analysis(
            &space,
            &space.center(),
            |_| Outcome::Failed { reason: "boom".into() },
            &names(1),
            &Executor::sequential(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BaselineFailed(_)));
    }

    #[test]
    fn csv_layout() {
        let space = unit_space(1);
        let r = oat_analysis(
            &space,
            &space.center(),
            |x| ok(vec![x[0]]),
            &names(1),
            &Executor::sequential(),
        )
        .unwrap();
        assert_eq!(r.to_csv(), "parameter,objective,raw,normalized\nx0,f1,0.5,1\n");
    }
}
