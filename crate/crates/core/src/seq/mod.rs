//! Lattice sequences of polynomial growth (`s'(Z^d)`) and of rapid decay
//! (`s(Z^d)`), represented as closed-form expression trees.

mod cert;
mod envelope;
mod node;
mod pairing;
mod sequence;

pub use cert::{GrowthCertificate, CERT_CHECK_SLACK};
pub use envelope::Envelope;
pub use node::{principal_arg, unit_phase, Node, NodeKind, PointValue, Scalar, WitnessSpec};
pub use pairing::{
    abs_sum_bound, norm_weighted_abs_sum_bound, pairing, seminorm, tail_bound, PairingResult,
    SeminormReport,
};
pub use sequence::{default_check_radius, CombineOp, FastSequence, SlowSequence};

pub(crate) use cert::{mul_up, recip_up};
