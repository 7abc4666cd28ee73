use thiserror::Error;

/// Errors raised by the n-body laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid masses: {0}")]
    InvalidMasses(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("length mismatch: expected {expected} bodies, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("collision singularity between bodies {i} and {j} (r = {distance:e})")]
    CollisionSingularity { i: usize, j: usize, distance: f64 },

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("invalid integrator settings: {0}")]
    InvalidIntegrator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("center of mass is not at the origin (|q_cm| = {0:e})")]
    CmNotAtOrigin(f64),

    #[error("degenerate gradient: |grad U| = {grad_u:e}, |grad I| = {grad_i:e}")]
    DegenerateGradient { grad_u: f64, grad_i: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("moment of inertia at the reference sample is zero")]
    ZeroInertia,
}

pub type Result<T> = std::result::Result<T, Error>;
