use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A geometric clearance of the design is violated.
    #[error("infeasible design ({clearance}): {detail}")]
    Infeasible { clearance: &'static str, detail: String },

    #[error("cannot reach {target} nodes: achievable range is {min}..={max}")]
    NodeTarget { target: usize, min: usize, max: usize },

    #[error("invalid meshing spec: {0}")]
    InvalidMeshing(String),

    #[error("static solve did not converge after {iterations} iterations (residual {residual:e} N, cable error {cable_error:e} mm): {reason}")]
    NotConverged {
        iterations: usize,
        residual: f64,
        cable_error: f64,
        reason: String,
    },

    #[error("design file: {0}")]
    DesignFile(String),

    #[error(transparent)]
    Fem(#[from] softopt_fem::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
