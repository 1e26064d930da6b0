//! Parametric sensorized soft finger: design parameters, a procedural
//! tetrahedral mesher and the fitness functions scored by the optimizer.

pub mod design;
mod error;
pub mod mesher;
pub mod objectives;

pub use design::{default_bounds, FingerDesign, FingerGlobals, PARAM_NAMES};
pub use error::{Error, Result};
pub use mesher::{build_finger, build_finger_at_level, build_finger_with_size, MeshingSpec};
pub use objectives::{
    evaluate_deformation_objectives, evaluate_pressure_objectives, wall_thickness_tolerance_study,
    DeformationObjectives, FingerModel, PressureObjectives, Problem, ToleranceReport,
};
