//! Sequences of polynomial growth on the integer lattice, viewed as Fourier
//! coefficients of periodic distributions.
//!
//! The crate is organised around [`SlowSequence`] (polynomial growth, carries a
//! [`GrowthCertificate`]) and [`FastSequence`] (rapid decay, carries a decay
//! envelope from which any seminorm bound is derived). On top of those:
//!
//! - [`corona`]: the lower-bound condition on a family, explicit Bézout
//!   cofactors, and unit tests for single elements.
//! - [`stable_rank`]: the reduction of unimodular pairs to units and the
//!   approximation of arbitrary elements by units.
//! - [`fourier`]: period bases, dual lattices and DFT extraction/synthesis.
//! - [`exp_type`]: the polynomial Bézout identity for `(z - 1, z^3)`.

pub mod corona;
pub mod error;
pub mod exp_type;
pub mod fourier;
pub mod lattice;
pub mod seq;
pub mod stable_rank;

pub use error::{Error, Result};
pub use lattice::LatticeIndex;
pub use seq::{
    CombineOp, FastSequence, GrowthCertificate, Node, NodeKind, PairingResult, SlowSequence,
    WitnessSpec,
};

pub use num_complex::Complex64;
