use thiserror::Error;

use crate::schemes::SchemeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{scheme} produced a non-finite value at step {step} (state {state})")]
    NonFinite { scheme: SchemeId, step: usize, state: String },

    #[error("non-finite drift {value} evaluated at state {state}")]
    NonFiniteDrift { value: String, state: String },

    #[error("the semi-tamed scheme needs a drift split f = u + v, but the problem has none")]
    MissingSplit,

    #[error("factor {factor} does not divide {steps} steps")]
    NotDivisible { factor: usize, steps: usize },

    #[error("poisson mean overflow: intensity {intensity} times dt {dt} is not finite")]
    PoissonOverflow { intensity: f64, dt: f64 },

    #[error("reference path {path_id} diverged at step {step}")]
    ReferenceDiverged { path_id: u64, step: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("malformed noise file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
