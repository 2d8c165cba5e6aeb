use thiserror::Error;

/// Errors raised by the lattice model, the steppers and the attractor tools.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The standing assumption `lambda > lambda_star` does not hold.
    #[error("dissipativity violated: lambda = {lambda} must exceed lambda* = {lambda_star}")]
    DissipativityViolation { lambda: f64, lambda_star: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported norm exponent p = {0} (supported: 1, 2, 3, 4)")]
    UnsupportedNorm(u32),

    #[error("fixed-point solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("time step {eps} exceeds the admissible step eps* = {eps_star}")]
    StepTooLarge { eps: f64, eps_star: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("step {index} failed: {source}")]
    StepFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("point clouds live in different spaces: {0}")]
    SpaceMismatch(String),

    #[error("path horizon too short: need {needed} time units, have {available}")]
    HorizonTooShort { needed: f64, available: f64 },

    #[error("cloud did not stabilize after {rounds} rounds (last distance {last_distance:e})")]
    NotStabilized { last_distance: f64, rounds: usize },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
