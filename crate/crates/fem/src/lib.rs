//! Corotational linear-elastic tetrahedral statics for cable-driven soft
//! bodies, with cavity volume and tip angle measurements.

pub mod cholesky;
mod elastic;
mod element;
mod error;
pub mod io;
mod material;
pub mod measure;
pub mod mesh;
mod solver;
pub mod sparse;

pub use elastic::{elastic_energy, elastic_force_and_stiffness, ElasticModel};
pub use error::{Error, Result};
pub use material::MaterialParams;
pub use measure::{
    angular_displacement, cavity_volume, cavity_volume_displaced, rest_cavity_volume, surface_volume, tip_angle,
    tip_angle_displaced,
};
pub use mesh::{CablePoint, CavitySurface, Point, TetMesh, HEX_TO_TETS};
pub use solver::{solve_static, ActuationSpec, MeritRecord, StaticSolution, CABLE_TOLERANCE, SILICONE_WEIGHT_DENSITY};
pub use sparse::CsrMatrix;
