//! Fitness functions of the finger: deformation volume, tip angular
//! displacement and the pressure-sensor variants.

use serde::{Deserialize, Serialize};
use softopt_core::{DesignVector, ObjectiveVector, Outcome};
use softopt_fem::{
    angular_displacement, cavity_volume, rest_cavity_volume, solve_static, ActuationSpec, MaterialParams,
    StaticSolution, TetMesh,
};

use crate::{build_finger, Error, FingerDesign, FingerGlobals, MeshingSpec, Result};

/// Everything besides the design that an evaluation depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct FingerModel {
    pub material: MaterialParams,
    pub meshing: MeshingSpec,
    pub globals: FingerGlobals,
    /// Cable shortening at which the actuated state is measured, mm.
    pub cable_displacement: f64,
    pub load_steps: usize,
    /// Force residual bound of the static solve, N.
    pub tolerance: f64,
    pub gravity: bool,
}

impl Default for FingerModel {
    fn default() -> Self {
        Self {
            material: MaterialParams::default(),
            meshing: MeshingSpec::default(),
            globals: FingerGlobals::default(),
            cable_displacement: 10.0,
            load_steps: 5,
            tolerance: 1e-8,
            gravity: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationObjectives {
    /// Summed absolute cavity volume change, uL (mm^3).
    pub f1: f64,
    /// Tip angular displacement, degrees.
    pub f2: f64,
    pub per_cavity: Vec<f64>,
    pub rest_volumes: Vec<f64>,
    pub actuated_volumes: Vec<f64>,
    pub node_count: usize,
    pub newton_iterations: usize,
    pub cable_tension: f64,
}

impl DeformationObjectives {
    pub fn rest_volume(&self) -> f64 {
        self.rest_volumes.iter().sum()
    }

    pub fn actuated_volume(&self) -> f64 {
        self.actuated_volumes.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureObjectives {
    /// `f1` relative to the actuated cavity volume.
    pub f3: f64,
    /// Rest cavity volume, uL.
    pub f4: f64,
    pub deformation: DeformationObjectives,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub nominal_wall: f64,
    pub perturbed_wall: f64,
    pub nominal_f1: f64,
    pub perturbed_f1: f64,
}

impl ToleranceReport {
    pub fn absolute_change(&self) -> f64 {
        self.perturbed_f1 - self.nominal_f1
    }

    pub fn relative_change(&self) -> f64 {
        self.absolute_change() / self.nominal_f1
    }
}

/// The optimization problems defined over finger designs. Objectives are
/// negated so that every problem is a minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Maximize `f1` and `f2`.
    Deformation,
    /// Maximize `f2`, `f3` and `f4`.
    Pressure,
}

impl Problem {
    pub fn objective_names(&self) -> Vec<String> {
        let names: &[&str] = match self {
            Problem::Deformation => &["f1", "f2"],
            Problem::Pressure => &["f2", "f3", "f4"],
        };
        names.iter().map(|s| s.to_string()).collect()
    }
}

impl FingerModel {
    fn actuation(&self, displacement: f64) -> ActuationSpec {
        ActuationSpec {
            cable_displacement: displacement,
            load_steps: self.load_steps,
            tolerance: self.tolerance,
            gravity: self.gravity,
            ..ActuationSpec::default()
        }
    }

    pub fn mesh(&self, design: &FingerDesign) -> Result<TetMesh> {
        build_finger(&design.with_globals(self.globals), &self.meshing)
    }

    /// Mesh and converged actuated state.
    pub fn solve(&self, design: &FingerDesign) -> Result<(TetMesh, StaticSolution)> {
        let mesh = self.mesh(design)?;
        let sol = self.solve_mesh(&mesh)?;
        Ok((mesh, sol))
    }

    fn solve_mesh(&self, mesh: &TetMesh) -> Result<StaticSolution> {
        let sol = solve_static(mesh, &self.material, &self.actuation(self.cable_displacement))?;
        if !sol.converged {
            return Err(Error::NotConverged {
                iterations: sol.iterations,
                residual: sol.residual,
                cable_error: sol.constraint_residual,
                reason: sol.failure.unwrap_or_default(),
            });
        }
        Ok(sol)
    }

    pub fn deformation(&self, design: &FingerDesign) -> Result<DeformationObjectives> {
        self.deformation_on(&self.mesh(design)?)
    }

    /// Deformation objectives on an already built finger mesh.
    pub fn deformation_on(&self, mesh: &TetMesh) -> Result<DeformationObjectives> {
        let sol = self.solve_mesh(mesh)?;
        // Gravity, when enabled, also acts in the reference state.
        let reference = if self.gravity {
            Some(solve_static(mesh, &self.material, &self.actuation(0.0))?)
        } else {
            None
        };
        let mut rest_volumes = Vec::new();
        let mut actuated_volumes = Vec::new();
        for c in 0..mesh.cavities.len() {
            rest_volumes.push(match &reference {
                Some(r) => cavity_volume(mesh, r, c)?,
                None => rest_cavity_volume(mesh, c)?,
            });
            actuated_volumes.push(cavity_volume(mesh, &sol, c)?);
        }
        let per_cavity: Vec<f64> = rest_volumes
            .iter()
            .zip(&actuated_volumes)
            .map(|(a, b)| (b - a).abs())
            .collect();
        let mut f2 = angular_displacement(mesh, &sol)?;
        if let Some(r) = &reference {
            f2 -= angular_displacement(mesh, r)?;
        }
        Ok(DeformationObjectives {
            f1: per_cavity.iter().sum(),
            f2,
            per_cavity,
            rest_volumes,
            actuated_volumes,
            node_count: mesh.node_count(),
            newton_iterations: sol.iterations,
            cable_tension: sol.tension,
        })
    }

    pub fn pressure(&self, design: &FingerDesign) -> Result<PressureObjectives> {
        let d = self.deformation(design)?;
        let actuated = d.actuated_volume();
        if !(actuated > 0.0) {
            return Err(Error::Infeasible {
                clearance: "cavity volume",
                detail: format!("actuated cavity volume {actuated} is not positive"),
            });
        }
        Ok(PressureObjectives {
            f3: d.f1 / actuated,
            f4: d.rest_volume(),
            deformation: d,
        })
    }

    /// `f1` at the nominal wall thickness and `delta` mm thinner.
    pub fn tolerance_study(&self, design: &FingerDesign, delta: f64) -> Result<ToleranceReport> {
        let mut thin = *design;
        thin.wall_thickness -= delta;
        thin.with_globals(self.globals).validate()?;
        let nominal = self.deformation(design)?;
        let perturbed = if delta == 0.0 {
            nominal.clone()
        } else {
            self.deformation(&thin)?
        };
        Ok(ToleranceReport {
            nominal_wall: design.wall_thickness,
            perturbed_wall: thin.wall_thickness,
            nominal_f1: nominal.f1,
            perturbed_f1: perturbed.f1,
        })
    }

    /// Minimization objectives of `problem`.
    pub fn objectives(&self, problem: Problem, design: &FingerDesign) -> Result<Vec<f64>> {
        Ok(match problem {
            Problem::Deformation => {
                let d = self.deformation(design)?;
                vec![-d.f1, -d.f2]
            }
            Problem::Pressure => {
                let p = self.pressure(design)?;
                vec![-p.deformation.f2, -p.f3, -p.f4]
            }
        })
    }

    /// Evaluates a design vector; any error becomes a failed outcome.
    pub fn evaluate(&self, problem: Problem, x: &DesignVector) -> Outcome {
        let result = FingerDesign::from_vector(x, self.globals)
            .and_then(|d| self.objectives(problem, &d))
            .map_err(|e| e.to_string())
            .and_then(|v| ObjectiveVector::new(v).map_err(|e| e.to_string()));
        Outcome::from(result)
    }
}

pub fn evaluate_deformation_objectives(
    design: &FingerDesign,
    mat: &MaterialParams,
    spec: &MeshingSpec,
) -> Result<DeformationObjectives> {
    model_for(design, mat, spec).deformation(design)
}

pub fn evaluate_pressure_objectives(
    design: &FingerDesign,
    mat: &MaterialParams,
    spec: &MeshingSpec,
) -> Result<PressureObjectives> {
    model_for(design, mat, spec).pressure(design)
}

pub fn wall_thickness_tolerance_study(
    design: &FingerDesign,
    delta: f64,
    mat: &MaterialParams,
    spec: &MeshingSpec,
) -> Result<ToleranceReport> {
    model_for(design, mat, spec).tolerance_study(design, delta)
}

fn model_for(design: &FingerDesign, mat: &MaterialParams, spec: &MeshingSpec) -> FingerModel {
    FingerModel {
        material: *mat,
        meshing: *spec,
        globals: design.globals,
        ..FingerModel::default()
    }
}
