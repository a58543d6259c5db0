//! The duality pairing `⟨a, b⟩ = Σ a(n) b(n)` with a certified truncation
//! error, and the seminorms `p_k`.
//!
//! Tail bounds for `‖n‖₁ > R` combine the growth certificate `(M, k)` of `a`,
//! the order-`k + d + 1` decay of `b` beyond `R` and the shell count
//! `#{‖n‖₁ = r} ≤ 2^d (1 + r)^(d-1)`, which leaves `Σ_{r>R} (1 + r)^-2`.
//! Each envelope term of `b` is handled separately so that finitely
//! supported parts contribute nothing once `R` covers them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cert::{add_up, mul_up, round_up, GrowthCertificate};
use super::sequence::{FastSequence, SlowSequence};
use crate::error::{Error, Result};
use crate::lattice::{self, LatticeIndex};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: Complex64,
    pub truncation_radius: u64,
    /// Upper bound on `|⟨a, b⟩ - value|`.
    pub tail_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub order: u32,
    pub window: u64,
    pub sup_on_window: f64,
    /// Upper bound on the full seminorm `p_k(b)`.
    pub certified_bound: f64,
}

/// Finite sum past which the tail series is bounded in closed form.
const EXPLICIT_TAIL_TERMS: u64 = 1_000_000;

/// Upper bound on `Σ_{R < r ≤ hi} (1 + r)^-2`.
fn inverse_square_tail(radius: u64, hi: Option<u64>) -> f64 {
    match hi {
        Some(hi) if hi <= radius => 0.0,
        Some(hi) if hi - radius <= EXPLICIT_TAIL_TERMS => {
            let s: f64 = (radius + 1..=hi)
                .map(|r| {
                    let x = 1.0 + r as f64;
                    1.0 / (x * x)
                })
                .sum();
            round_up(s * (1.0 + 1e-12))
        }
        // Σ_{m ≥ R+2} m^-2 < Σ 1/((m - 1/2)(m + 1/2)) = 1/(R + 3/2)
        _ => round_up(1.0 / (radius as f64 + 1.5)),
    }
}

fn ensure_shell_bound() -> Result<()> {
    if !lattice::shell_bound_verified() {
        return Err(Error::invalid(
            "lattice shell-count bound failed its brute-force check",
        ));
    }
    Ok(())
}

/// Upper bound on `Σ_{‖n‖₁ > R} |a(n)| |b(n)|` for any `a` admitting `cert`.
pub fn tail_bound(cert: GrowthCertificate, b: &FastSequence, radius: u64) -> Result<f64> {
    ensure_shell_bound()?;
    let dim = b.dim();
    let order = cert.k as i64 + dim as i64 + 1;
    let shell_const = 2f64.powi(dim as i32);
    let mut total = 0.0;
    for term in b.envelope().terms() {
        if term.support.is_some_and(|s| s <= radius) {
            continue;
        }
        let decay = term.weighted_sup(order, radius + 1);
        if !decay.is_finite() {
            return Err(Error::InsufficientDecay(order));
        }
        let series = inverse_square_tail(radius, term.support);
        let piece = mul_up(mul_up(mul_up(cert.m, decay), shell_const), series);
        total = add_up(total, piece);
    }
    Ok(total)
}

/// Truncated pairing over `‖n‖₁ ≤ R` with a certified tail bound.
pub fn pairing(a: &SlowSequence, b: &FastSequence, radius: u64) -> Result<PairingResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let terms = lattice::map_window(a.dim(), radius, |n| Ok(a.eval(n)? * b.eval(n)?))?;
    let value = terms.iter().map(|(_, v)| *v).sum();
    Ok(PairingResult {
        value,
        truncation_radius: radius,
        tail_bound: tail_bound(a.cert(), b, radius)?,
    })
}

/// `Σ w(‖n‖₁) |b(n)|` over the window plus the tail for weights admitted by
/// `weight_cert`.
fn weighted_abs_sum(
    b: &FastSequence,
    radius: u64,
    weight: impl Fn(u64) -> f64 + Sync,
    weight_cert: GrowthCertificate,
) -> Result<f64> {
    let terms = lattice::map_window(b.dim(), radius, |n| {
        Ok(weight(n.norm1()) * b.eval(n)?.norm())
    })?;
    let window: f64 = terms.iter().map(|(_, v)| *v).sum();
    Ok(add_up(
        round_up(window * (1.0 + 1e-12)),
        tail_bound(weight_cert, b, radius)?,
    ))
}

/// Certified upper bound on `Σ_n |b(n)|`.
pub fn abs_sum_bound(b: &FastSequence, radius: u64) -> Result<f64> {
    weighted_abs_sum(b, radius, |_| 1.0, GrowthCertificate { m: 1.0, k: 0 })
}

/// Certified upper bound on `Σ_n ‖n‖₁ |b(n)|`.
pub fn norm_weighted_abs_sum_bound(b: &FastSequence, radius: u64) -> Result<f64> {
    weighted_abs_sum(b, radius, |r| r as f64, GrowthCertificate { m: 1.0, k: 1 })
}

/// `p_k` restricted to the window, and a bound on the full seminorm.
pub fn seminorm(b: &FastSequence, k: u32, radius: u64) -> Result<SeminormReport> {
    let weighted = lattice::map_window(b.dim(), radius, |n: &LatticeIndex| {
        Ok(mul_up((1.0 + n.norm1() as f64).powi(k as i32), b.eval(n)?.norm()))
    })?;
    let sup_on_window = weighted.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let tail = b.envelope().weighted_sup(k as i64, radius + 1);
    Ok(SeminormReport {
        order: k,
        window: radius,
        sup_on_window,
        certified_bound: sup_on_window.max(tail),
    })
}
