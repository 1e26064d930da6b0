//! Study configuration, read from TOML.
//!
//! ```toml
//! problem = "deformation"      # deformation | pressure | schaffer | linear
//! output_dir = "runs/deformation"
//! workers = 4
//!
//! [solver]                     # NSGA-II settings
//! population_size = 50
//! crossover_prob = 0.9
//! swap_prob = 0.5
//! budget = 1500
//! seed = 1
//!
//! [meshing]
//! target_nodes = 500
//! refinement_factor = 2.0
//!
//! [material]
//! young_modulus = 3.0          # MPa
//! poisson_ratio = 0.30
//!
//! [actuation]
//! cable_displacement = 10.0    # mm
//! load_steps = 5
//! tolerance = 1e-8             # N
//! gravity = false
//!
//! [globals]                    # fixed finger dimensions, mm
//! length = 60.0
//!
//! [bounds]                     # per-parameter search box overrides
//! wall_thickness = [1.5, 3.0]
//! ```
//!
//! Every section and key is optional except `problem`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use softopt_core::SolverConfig;
use softopt_fem::MaterialParams;
use softopt_finger::{FingerGlobals, FingerModel, MeshingSpec};

use crate::problem::{ProblemKind, StudyProblem};
use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub problem: ProblemKind,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub meshing: MeshingConfig,
    #[serde(default)]
    pub material: MaterialConfig,
    #[serde(default)]
    pub actuation: ActuationConfig,
    #[serde(default)]
    pub globals: FingerGlobals,
    #[serde(default)]
    pub bounds: BTreeMap<String, [f64; 2]>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("softopt-out")
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshingConfig {
    pub target_nodes: usize,
    pub refinement_factor: f64,
}

impl Default for MeshingConfig {
    fn default() -> Self {
        let m = MeshingSpec::default();
        Self {
            target_nodes: m.target_nodes,
            refinement_factor: m.refinement_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialConfig {
    pub young_modulus: f64,
    pub poisson_ratio: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        let m = MaterialParams::default();
        Self {
            young_modulus: m.young_modulus,
            poisson_ratio: m.poisson_ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActuationConfig {
    pub cable_displacement: f64,
    pub load_steps: usize,
    pub tolerance: f64,
    pub gravity: bool,
}

impl Default for ActuationConfig {
    fn default() -> Self {
        let m = FingerModel::default();
        Self {
            cable_displacement: m.cable_displacement,
            load_steps: m.load_steps,
            tolerance: m.tolerance,
            gravity: m.gravity,
        }
    }
}

/// SHA-256 of the settings that determine a study's trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfigHash(String);

impl fmt::Display for ConfigHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Settings hashed into the trial log header. Worker count and output
/// location are left out: they must not change the trials.
#[derive(Serialize)]
struct Identity<'a> {
    problem: ProblemKind,
    solver: &'a SolverConfig,
    meshing: &'a MeshingConfig,
    material: &'a MaterialConfig,
    actuation: &'a ActuationConfig,
    globals: &'a FingerGlobals,
    bounds: &'a BTreeMap<String, [f64; 2]>,
}

impl StudyConfig {
    /// A config with defaults for everything but the problem.
    pub fn new(problem: ProblemKind) -> Self {
        Self {
            problem,
            output_dir: default_output_dir(),
            workers: default_workers(),
            solver: SolverConfig::default(),
            meshing: MeshingConfig::default(),
            material: MaterialConfig::default(),
            actuation: ActuationConfig::default(),
            globals: FingerGlobals::default(),
            bounds: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::read(path))?;
        let config: StudyConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        config.validate().map_err(|detail| CliError::Config {
            path: path.to_path_buf(),
            detail,
        })?;
        Ok(config)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.workers == 0 {
            return Err("workers must be at least 1".into());
        }
        self.solver.validate().map_err(|e| e.to_string())?;
        self.meshing_spec().validate().map_err(|e| e.to_string())?;
        self.material_params()?;
        let a = &self.actuation;
        if !(a.cable_displacement >= 0.0 && a.cable_displacement.is_finite()) {
            return Err(format!(
                "cable_displacement must be non-negative, got {}",
                a.cable_displacement
            ));
        }
        if a.load_steps == 0 {
            return Err("load_steps must be at least 1".into());
        }
        if !(a.tolerance > 0.0) {
            return Err(format!("tolerance must be positive, got {}", a.tolerance));
        }
        self.problem_definition().map_err(|e| e.to_string())?;
        Ok(())
    }

    pub fn meshing_spec(&self) -> MeshingSpec {
        MeshingSpec {
            target_nodes: self.meshing.target_nodes,
            refinement_factor: self.meshing.refinement_factor,
        }
    }

    pub fn material_params(&self) -> std::result::Result<MaterialParams, String> {
        MaterialParams::new(self.material.young_modulus, self.material.poisson_ratio).map_err(|e| e.to_string())
    }

    pub fn model(&self) -> FingerModel {
        FingerModel {
            material: MaterialParams {
                young_modulus: self.material.young_modulus,
                poisson_ratio: self.material.poisson_ratio,
            },
            meshing: self.meshing_spec(),
            globals: self.globals,
            cable_displacement: self.actuation.cable_displacement,
            load_steps: self.actuation.load_steps,
            tolerance: self.actuation.tolerance,
            gravity: self.actuation.gravity,
        }
    }

    pub fn problem_definition(&self) -> Result<StudyProblem> {
        StudyProblem::new(self.problem, self.model(), &self.bounds)
    }

    pub fn hash(&self) -> ConfigHash {
        let identity = Identity {
            problem: self.problem,
            solver: &self.solver,
            meshing: &self.meshing,
            material: &self.material,
            actuation: &self.actuation,
            globals: &self.globals,
            bounds: &self.bounds,
        };
        let json = serde_json::to_string(&identity).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        ConfigHash(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}
