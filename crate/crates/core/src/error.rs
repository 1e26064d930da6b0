use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("parameter `{name}`: lower bound {lower} must be strictly below upper bound {upper}")]
    InvalidBounds { name: String, lower: f64, upper: f64 },

    #[error("parameter names must be non-empty")]
    EmptyName,

    #[error("duplicate parameter name `{0}`")]
    DuplicateName(String),

    #[error("design space has no parameters")]
    EmptySpace,

    #[error("value {value} of `{name}` lies outside [{lower}, {upper}]")]
    OutOfBounds {
        name: String,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("objective vector must be non-empty")]
    EmptyObjectives,

    #[error("objective {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("hypervolume needs exactly 2 objectives, got {0}")]
    NotBiObjective(usize),

    #[error("point {point:?} does not dominate the reference point {reference:?}")]
    ReferenceNotDominated { point: Vec<f64>, reference: Vec<f64> },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("every evaluation of generation {generation} failed; first failure: {reason}")]
    GenerationFailed { generation: usize, reason: String },

    #[error("evaluation at the baseline design failed: {0}")]
    BaselineFailed(String),

    #[error("trial observer failed: {0}")]
    Observer(String),

    #[error("replayed trial {trial_id} does not match the regenerated design")]
    ReplayMismatch { trial_id: u64 },
}
