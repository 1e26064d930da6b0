//! Problems a study can optimize: the two finger problems and two analytic
//! test problems with known answers.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use softopt_core::{DesignSpace, DesignVector, ObjectiveVector, Outcome, Param};
use softopt_finger::{default_bounds, FingerDesign, FingerGlobals, FingerModel, Problem};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Maximize deformation volume f1 and tip angle f2.
    Deformation,
    /// Maximize tip angle f2, pressure change f3 and rest volume f4.
    Pressure,
    /// Minimize (x^2, (x - 2)^2); Pareto set is x in [0, 2].
    Schaffer,
    /// Minimize f = x1 over two unit parameters; x2 has no effect.
    Linear,
}

impl ProblemKind {
    pub fn is_finger(self) -> bool {
        matches!(self, ProblemKind::Deformation | ProblemKind::Pressure)
    }

    pub fn objectives(self) -> Vec<ObjectiveSpec> {
        let o = |name, unit, maximize| ObjectiveSpec { name, unit, maximize };
        match self {
            ProblemKind::Deformation => vec![o("f1", "uL", true), o("f2", "deg", true)],
            ProblemKind::Pressure => vec![o("f2", "deg", true), o("f3", "1", true), o("f4", "uL", true)],
            ProblemKind::Schaffer => vec![o("f1", "1", false), o("f2", "1", false)],
            ProblemKind::Linear => vec![o("f1", "1", false)],
        }
    }

    pub fn default_space(self) -> DesignSpace {
        let params = match self {
            ProblemKind::Deformation | ProblemKind::Pressure => return default_bounds(),
            ProblemKind::Schaffer => vec![Param::new("x", -5.0, 5.0, "")],
            ProblemKind::Linear => vec![Param::new("x1", 0.0, 1.0, ""), Param::new("x2", 0.0, 1.0, "")],
        };
        DesignSpace::new(params).expect("built-in bounds are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObjectiveSpec {
    pub name: &'static str,
    pub unit: &'static str,
    /// Stored negated in trials so that every problem is minimized.
    pub maximize: bool,
}

/// A problem with its (possibly overridden) search box and evaluator.
#[derive(Debug, Clone)]
pub struct StudyProblem {
    pub kind: ProblemKind,
    pub space: DesignSpace,
    pub objectives: Vec<ObjectiveSpec>,
    pub model: FingerModel,
}

impl StudyProblem {
    pub fn new(kind: ProblemKind, model: FingerModel, bounds: &BTreeMap<String, [f64; 2]>) -> Result<Self> {
        let base = kind.default_space();
        for name in bounds.keys() {
            if base.index_of(name).is_none() {
                return Err(CliError::Input(format!("bounds for unknown parameter `{name}`")));
            }
        }
        let params = base
            .params()
            .iter()
            .map(|p| match bounds.get(&p.name) {
                Some(&[lo, hi]) => Param::new(p.name.clone(), lo, hi, p.unit.clone()),
                None => p.clone(),
            })
            .collect();
        let space = DesignSpace::new(params).map_err(|e| CliError::Input(e.to_string()))?;
        Ok(Self {
            kind,
            space,
            objectives: kind.objectives(),
            model,
        })
    }

    pub fn parameter_names(&self) -> Vec<String> {
        self.space.params().iter().map(|p| p.name.clone()).collect()
    }

    pub fn objective_names(&self) -> Vec<String> {
        self.objectives.iter().map(|o| o.name.to_string()).collect()
    }

    /// Minimization objectives; failures carry the reason.
    pub fn evaluate(&self, x: &DesignVector) -> Outcome {
        let v = x.values();
        let values = match self.kind {
            ProblemKind::Deformation => return self.model.evaluate(Problem::Deformation, x),
            ProblemKind::Pressure => return self.model.evaluate(Problem::Pressure, x),
            ProblemKind::Schaffer => vec![v[0] * v[0], (v[0] - 2.0) * (v[0] - 2.0)],
            ProblemKind::Linear => vec![v[0]],
        };
        Outcome::from(ObjectiveVector::new(values).map_err(|e| e.to_string()))
    }

    /// Design vector from a design file. Finger problems read the finger
    /// design format (or a preset name); the analytic problems read
    /// `name = value` lines. With `in_box` the vector must also lie inside
    /// the search box. Globals set by a finger design file replace the
    /// model's.
    pub fn load_design(&mut self, source: &str, in_box: bool) -> Result<(DesignVector, Option<FingerDesign>)> {
        let (x, finger) = if self.kind.is_finger() {
            let d = load_finger_design(source)?;
            self.model.globals = effective_globals(&d, self.model.globals);
            let d = d.with_globals(self.model.globals);
            d.validate()?;
            (d.to_vector(), Some(d))
        } else {
            let path = Path::new(source);
            let text = std::fs::read_to_string(path).map_err(CliError::read(path))?;
            let table: BTreeMap<String, f64> =
                toml::from_str(&text).map_err(|e| CliError::Input(format!("{source}: {e}")))?;
            let mut values = Vec::new();
            for p in self.space.params() {
                values.push(
                    *table
                        .get(&p.name)
                        .ok_or_else(|| CliError::Input(format!("{source}: missing parameter `{}`", p.name)))?,
                );
            }
            if let Some(extra) = table.keys().find(|k| self.space.index_of(k).is_none()) {
                return Err(CliError::Input(format!("{source}: unknown parameter `{extra}`")));
            }
            (DesignVector::from_unchecked(values), None)
        };
        if in_box {
            self.space
                .check(x.values())
                .map_err(|e| CliError::Infeasible(e.to_string()))?;
        }
        Ok((x, finger))
    }

    /// Objective values in their natural sign.
    pub fn natural(&self, o: &ObjectiveVector) -> Vec<f64> {
        natural_values(&self.objectives, o)
    }
}

pub fn natural_values(specs: &[ObjectiveSpec], o: &ObjectiveVector) -> Vec<f64> {
    specs
        .iter()
        .zip(o.values())
        .map(|(s, &v)| if s.maximize { -v } else { v })
        .collect()
}

/// A finger design from a file, or one of the presets `slim` and `large`
/// when no such file exists.
pub fn load_finger_design(source: &str) -> Result<FingerDesign> {
    let path = Path::new(source);
    if !path.exists() {
        if let Some(d) = FingerDesign::preset(source) {
            return Ok(d);
        }
    }
    let text = std::fs::read_to_string(path).map_err(CliError::read(path))?;
    FingerDesign::from_file_str(&text).map_err(|e| CliError::Input(format!("{source}: {e}")))
}

/// Globals a design file sets explicitly take precedence over the config.
pub fn effective_globals(design: &FingerDesign, configured: FingerGlobals) -> FingerGlobals {
    if design.globals != FingerGlobals::default() {
        design.globals
    } else {
        configured
    }
}
