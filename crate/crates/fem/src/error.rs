use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("element {element} is inverted or degenerate (signed volume {volume:e})")]
    InvertedElement { element: usize, volume: f64 },

    #[error("cavity {cavity} is not a closed oriented surface; offending edges: {edges:?}")]
    OpenSurface { cavity: usize, edges: Vec<(usize, usize)> },

    #[error("no cavity with index {0}")]
    UnknownCavity(usize),

    #[error("tip node coincides with the base reference point")]
    TipAtBase,

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid actuation: {0}")]
    InvalidActuation(String),

    #[error("tangent matrix is not positive definite at pivot {0}")]
    NotPositiveDefinite(usize),

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("mesh file line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
