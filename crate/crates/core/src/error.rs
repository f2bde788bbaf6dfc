use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("caustic: |sin(omega*T)| = {sin_abs:.3e} at omega*T = {omega_t}")]
    Caustic { omega_t: String, sin_abs: f64 },

    #[error("time argument must be nonzero")]
    ZeroTime,

    #[error("polynomial degree {degree} exceeds supported bound {bound}")]
    DegreeOverflow { degree: u32, bound: u32 },

    #[error("moment kind {kind} {reason}")]
    MomentArgument { kind: &'static str, reason: &'static str },

    #[error("outside domain: {0}")]
    OutOfDomain(String),

    #[error("did not converge: {0}")]
    NonConvergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
