use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite right-hand side at t = {time}")]
    NonFinite { time: f64 },

    #[error("implicit midpoint iteration did not converge at step {step} (t = {time}, residual {residual:e})")]
    NoConvergence { step: usize, time: f64, residual: f64 },

    #[error("inconsistent constraint: cokernel residual {residual:e} exceeds tolerance {tolerance:e}")]
    InconsistentConstraint { residual: f64, tolerance: f64 },

    #[error("no dynamics: two-form vanishes, critical-point condition dE = 0 applies (|dE| = {gradient_norm:e})")]
    NoDynamics { gradient_norm: f64 },

    #[error("immersion evaluation failed along coordinate {coordinate}: {reason}")]
    Immersion { coordinate: usize, reason: String },

    #[error("series tail {tail:e} at cutoff {cutoff} exceeds {tolerance:e}; increase the cutoff or reduce |z|")]
    Truncation { cutoff: usize, tail: f64, tolerance: f64 },

    #[error("generator mismatch: {left} vs {right} generators")]
    GeneratorMismatch { left: usize, right: usize },

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
