use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("dense assembly size {n} exceeds cap {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    SolverFailure {
        residual: f64,
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("oracle extrapolation did not converge: last correction {last_correction:.3e}")]
    OracleFailure {
        last_correction: f64,
        history: Vec<f64>,
    },

    #[error("point too close to the interface: distance {distance:.3e} < {minimum:.3e}")]
    NearBoundary { distance: f64, minimum: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
