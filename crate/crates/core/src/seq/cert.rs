use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack allowed when a certificate is checked against evaluated
/// values; absorbs the few ulps of evaluation error in `abs`/`phase` chains.
pub const CERT_CHECK_SLACK: f64 = 1e-12;

/// Claim that `|a(n)| ≤ M (1 + ‖n‖₁)^k` for every `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    #[serde(rename = "M")]
    pub m: f64,
    pub k: u32,
}

impl GrowthCertificate {
    pub fn new(m: f64, k: u32) -> Result<Self> {
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::invalid(format!(
                "certificate constant M must be finite and nonnegative, got {m}"
            )));
        }
        Ok(GrowthCertificate { m, k })
    }

    pub fn bound_at(&self, norm: u64) -> f64 {
        self.m * (1.0 + norm as f64).powi(self.k as i32)
    }

    pub fn admits(&self, modulus: f64, norm: u64) -> bool {
        modulus <= self.bound_at(norm) * (1.0 + CERT_CHECK_SLACK)
    }

    pub(crate) fn sum(items: impl IntoIterator<Item = GrowthCertificate>) -> Result<Self> {
        let (m, k) = items
            .into_iter()
            .fold((0.0, 0), |(m, k), c| (add_up(m, c.m), k.max(c.k)));
        GrowthCertificate::new(m, k)
    }

    pub(crate) fn product(items: impl IntoIterator<Item = GrowthCertificate>) -> Result<Self> {
        let (m, k) = items
            .into_iter()
            .fold((1.0, 0), |(m, k), c| (mul_up(m, c.m), k + c.k));
        GrowthCertificate::new(m, k)
    }

    pub(crate) fn arg() -> Self {
        GrowthCertificate {
            m: PI.next_up(),
            k: 0,
        }
    }
}

/// `a + b` rounded toward +∞ (two-sum error term decides the direction).
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// `a * b` rounded toward +∞.
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// `1 / x` rounded toward +∞, for positive `x`.
pub(crate) fn recip_up(x: f64) -> f64 {
    let q = 1.0 / x;
    if q.is_finite() && q.mul_add(x, -1.0) < 0.0 {
        q.next_up()
    } else {
        q
    }
}

/// Pads a nonnegative bound computed through transcendental functions
/// upward by a few ulps.
pub(crate) fn round_up(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    (x * (1.0 + 4.0 * f64::EPSILON)).next_up()
}
