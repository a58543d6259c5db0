use thiserror::Error;

use crate::lattice::LatticeIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("witness violated at {index}: |value| = {value:e} < bound {bound:e}")]
    WitnessViolation {
        index: LatticeIndex,
        value: f64,
        bound: f64,
    },

    #[error("growth certificate (M = {m}, k = {k}) fails at {index}: |a(n)| = {value:e}")]
    CertificateViolation {
        index: LatticeIndex,
        m: f64,
        k: u32,
        value: f64,
    },

    #[error("seminorm of order {0} has no finite bound")]
    InsufficientDecay(i64),

    #[error("Bézout residual {residual:e} exceeds tolerance {tolerance:e}")]
    BezoutResidual { residual: f64, tolerance: f64 },

    #[error("period basis is singular or ill-conditioned (det = {det:e})")]
    SingularBasis { det: f64 },

    #[error("coefficient map has infinite support")]
    InfiniteSupport,

    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
