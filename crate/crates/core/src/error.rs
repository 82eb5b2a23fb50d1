use thiserror::Error;

/// Errors raised by oracles, engines, rate evaluators and certificate checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curvature bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid oracle: {0}")]
    InvalidOracle(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// The tilt vector is not in the range of the subdifferential.
    #[error("tilt {0} is outside the range of the subdifferential")]
    Range(String),

    #[error("singular quadratic: no solution for tilt {0}")]
    Singular(String),

    #[error("parameters outside the admissible domain: {0}")]
    Domain(String),

    #[error("stepsize {gamma} outside (0, {upper})")]
    Stepsize { gamma: f64, upper: f64 },

    #[error("curvature shift schedule invalid at step {step}: {reason}")]
    Schedule { step: usize, reason: String },

    #[error("no root in ({lo}, {hi})")]
    NoRoot { lo: f64, hi: f64 },

    #[error("negative multiplier {name} = {value}")]
    Weight { name: &'static str, value: f64 },

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("cannot read input: {0}")]
    Input(String),

    #[error("trajectory index {index} out of range (length {len})")]
    Index { index: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
