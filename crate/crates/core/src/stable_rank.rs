//! Reduction of unimodular pairs to units, approximation of arbitrary
//! elements by units, and the exponential net that is not bounded below.

use serde::{Deserialize, Serialize};

use crate::corona::{self, CoronaWitness, WitnessStatus, RESIDUAL_TOLERANCE};
use crate::error::{Error, Result};
use crate::lattice::{self, LatticeIndex};
use crate::seq::{
    abs_sum_bound, mul_up, norm_weighted_abs_sum_bound, pairing, FastSequence, SlowSequence,
    WitnessSpec,
};

pub const DEFAULT_EPSILON: f64 = 0.25;
pub const DEFAULT_WINDOW: u64 = 50;

/// Relative margin taken off composed lower bounds to absorb rounding in
/// the three-factor product.
const COMPOSE_SHRINK: f64 = 1.0 - 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ClippedSequence {
    pub sequence: SlowSequence,
    pub inverse_witness: CoronaWitness,
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// `n ↦ ε` where `|a(n)| ≤ ε`, `a(n)` elsewhere. The result is bounded below
/// by `ε` everywhere, so its inverse witness `(ε, 0)` is certified.
pub fn clip_below(a: &SlowSequence, eps: f64) -> Result<ClippedSequence> {
    check_epsilon(eps)?;
    Ok(ClippedSequence {
        sequence: a.clip(eps)?,
        inverse_witness: CoronaWitness::new(eps, 0, WitnessStatus::Certified)?,
    })
}

/// The net `ε ↦ clip_below(a, ε)` at the requested parameters.
pub fn approx_by_invertibles(a: &SlowSequence, epsilons: &[f64]) -> Result<Vec<ClippedSequence>> {
    epsilons.iter().try_for_each(|&e| check_epsilon(e))?;
    epsilons.iter().map(|&e| clip_below(a, e)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReduceOptions {
    pub epsilon: f64,
    /// Window on which the Bézout identity is checked before reducing.
    pub window: u64,
    pub tolerance: f64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            epsilon: DEFAULT_EPSILON,
            window: DEFAULT_WINDOW,
            tolerance: RESIDUAL_TOLERANCE,
        }
    }
}

/// Every intermediate of the pair reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionTrace {
    /// `1 + |a₁|`
    pub u1: SlowSequence,
    /// `a₁ / u₁`
    pub a1_normalized: SlowSequence,
    /// `b₁ u₁`
    pub b1_scaled: SlowSequence,
    /// `B₁` clipped below at `ε`
    pub b1_clipped: SlowSequence,
    /// `B̃₁⁻¹ u₁ b₂`
    pub h: SlowSequence,
    /// `1 + (B̃₁ - B₁) A₁`
    pub correction: SlowSequence,
    /// `a₁ + h a₂`
    pub result: SlowSequence,
    pub epsilon: f64,
    /// `1 - 2ε`
    pub correction_lower_bound: f64,
    /// Bézout residual measured on the window.
    pub bezout_residual: f64,
    /// Lower bounds of `B̃₁⁻¹`, `u₁` and the correction, in that order.
    pub factor_witnesses: [WitnessSpec; 3],
    pub result_inverse_witness: CoronaWitness,
}

fn same_dims(seqs: &[&SlowSequence]) -> Result<usize> {
    let dim = seqs[0].dim();
    for s in seqs {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.dim(),
            });
        }
    }
    Ok(dim)
}

/// Given `b₁a₁ + b₂a₂ = 1`, builds `h` with `a₁ + h a₂` invertible.
///
/// Writing `ρ = b₁a₁ + b₂a₂ - 1`, the result factors as
/// `B̃₁⁻¹ u₁ (1 + (B̃₁ - B₁)A₁ + ρ)`, so its modulus is at least
/// `(1 - 2ε - |ρ|) / |B̃₁|`. The inverse witness uses the growth certificate
/// of `B̃₁` and the tolerance on `|ρ|`; it is window-verified because `ρ` is
/// only known on the window.
pub fn reduce_pair(
    a1: &SlowSequence,
    a2: &SlowSequence,
    b1: &SlowSequence,
    b2: &SlowSequence,
    opts: &ReduceOptions,
) -> Result<ReductionTrace> {
    let dim = same_dims(&[a1, a2, b1, b2])?;
    let eps = opts.epsilon;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1/2), got {eps}"
        )));
    }
    if !(opts.tolerance >= 0.0 && 2.0 * eps + opts.tolerance < 1.0) {
        return Err(Error::invalid(format!(
            "tolerance {} leaves no room below 1 - 2ε",
            opts.tolerance
        )));
    }
    let residual = corona::verify_bezout(
        &[a1.clone(), a2.clone()],
        &[b1.clone(), b2.clone()],
        opts.window,
    )?;
    if residual > opts.tolerance {
        return Err(Error::BezoutResidual {
            residual,
            tolerance: opts.tolerance,
        });
    }

    let one = SlowSequence::one(dim)?;
    let u1 = one.plus(&a1.abs())?;
    let u1_inv = u1.recip(WitnessSpec { delta: 1.0, k: 0 })?;
    let a1_normalized = a1.times(&u1_inv)?;
    let b1_scaled = b1.times(&u1)?;
    let b1_clipped = b1_scaled.clip(eps)?;
    let b1_clipped_inv = b1_clipped.recip(WitnessSpec { delta: eps, k: 0 })?;
    let h = SlowSequence::product(&[&b1_clipped_inv, &u1, b2])?;
    let correction = one.plus(&b1_clipped.minus(&b1_scaled)?.times(&a1_normalized)?)?;
    let result = a1.plus(&h.times(a2)?)?;

    let clipped_cert = b1_clipped.cert();
    let factor_witnesses = [
        WitnessSpec {
            delta: 1.0 / clipped_cert.m,
            k: clipped_cert.k,
        },
        WitnessSpec { delta: 1.0, k: 0 },
        WitnessSpec {
            delta: 1.0 - 2.0 * eps - opts.tolerance,
            k: 0,
        },
    ];
    let delta = factor_witnesses.iter().map(|w| w.delta).product::<f64>() * COMPOSE_SHRINK;
    let k = factor_witnesses.iter().map(|w| w.k).sum();
    let result_inverse_witness =
        CoronaWitness::new(delta, k, WitnessStatus::WindowVerified { radius: opts.window })?;

    Ok(ReductionTrace {
        u1,
        a1_normalized,
        b1_scaled,
        b1_clipped,
        h,
        correction,
        result,
        epsilon: eps,
        correction_lower_bound: 1.0 - 2.0 * eps,
        bezout_residual: residual,
        factor_witnesses,
        result_inverse_witness,
    })
}

/// Pointwise extremes of the trace quantities over a window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceAudit {
    pub window: u64,
    pub min_u1: f64,
    pub max_abs_a1_normalized: f64,
    pub min_abs_b1_clipped: f64,
    pub max_clip_change: f64,
    pub min_abs_correction: f64,
    /// `max |(a₁ + h a₂) - B̃₁⁻¹ u₁ (1 + (B̃₁ - B₁)A₁)|`
    pub max_factorization_residual: f64,
    /// `max |result - (a₁ + h a₂)|` with each factor evaluated separately.
    pub max_result_residual: f64,
    pub result_is_unit: bool,
}

impl TraceAudit {
    /// Whether every invariant of the reduction holds at tolerance `tol`.
    pub fn passes(&self, trace: &ReductionTrace, tol: f64) -> bool {
        let eps = trace.epsilon;
        self.min_u1 >= 1.0
            && self.max_abs_a1_normalized <= 1.0
            && self.min_abs_b1_clipped >= eps
            && self.max_clip_change <= 2.0 * eps
            && self.min_abs_correction >= trace.correction_lower_bound - tol
            && self.max_factorization_residual <= tol
            && self.max_result_residual <= tol
            && self.result_is_unit
    }
}

#[derive(Clone, Copy)]
struct AuditPoint {
    u1: f64,
    a1n: f64,
    b1c: f64,
    clip_change: f64,
    correction: f64,
    factorization: f64,
    result: f64,
}

pub fn audit_trace(
    trace: &ReductionTrace,
    a1: &SlowSequence,
    a2: &SlowSequence,
    radius: u64,
) -> Result<TraceAudit> {
    let points = lattice::map_window(a1.dim(), radius, |n| {
        let u1 = trace.u1.eval(n)?;
        let b1 = trace.b1_scaled.eval(n)?;
        let b1c = trace.b1_clipped.eval(n)?;
        let corr = trace.correction.eval(n)?;
        let result = trace.result.eval(n)?;
        let direct = a1.eval(n)? + trace.h.eval(n)? * a2.eval(n)?;
        let factored = u1 * corr / b1c;
        Ok(AuditPoint {
            u1: u1.re,
            a1n: trace.a1_normalized.eval(n)?.norm(),
            b1c: b1c.norm(),
            clip_change: (b1c - b1).norm(),
            correction: corr.norm(),
            factorization: (direct - factored).norm(),
            result: (result - direct).norm(),
        })
    })?;
    let init = AuditPoint {
        u1: f64::INFINITY,
        a1n: 0.0,
        b1c: f64::INFINITY,
        clip_change: 0.0,
        correction: f64::INFINITY,
        factorization: 0.0,
        result: 0.0,
    };
    let agg = points.iter().fold(init, |acc, (_, p)| AuditPoint {
        u1: acc.u1.min(p.u1),
        a1n: acc.a1n.max(p.a1n),
        b1c: acc.b1c.min(p.b1c),
        clip_change: acc.clip_change.max(p.clip_change),
        correction: acc.correction.min(p.correction),
        factorization: acc.factorization.max(p.factorization),
        result: acc.result.max(p.result),
    });
    let unit = corona::is_unit(&trace.result, &trace.result_inverse_witness, radius)?;
    Ok(TraceAudit {
        window: radius,
        min_u1: agg.u1,
        max_abs_a1_normalized: agg.a1n,
        min_abs_b1_clipped: agg.b1c,
        max_clip_change: agg.clip_change,
        min_abs_correction: agg.correction,
        max_factorization_residual: agg.factorization,
        max_result_residual: agg.result,
        result_is_unit: unit.invertible,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TupleReduction {
    /// Multipliers of the last member: the reduced tuple is `aᵢ + hᵢ a_N`.
    pub h: Vec<SlowSequence>,
    pub reduced: Vec<SlowSequence>,
    /// Bézout cofactors of the reduced tuple.
    pub cofactors: Vec<SlowSequence>,
    /// `Σ_{2≤i≤N} bᵢaᵢ`, the second member of the reduced pair.
    pub pair_second: SlowSequence,
    pub trace: ReductionTrace,
}

/// Reduces a unimodular tuple `(a₁, …, a_N)`, `N ≥ 2`, against its last
/// member. The pair `(a₁, y)` with `y = Σ_{2≤i≤N} bᵢaᵢ` has cofactors
/// `(b₁, 1)`; reducing it gives a unit `u = a₁ + h y`, and the tuple
/// `(a₁ + h b_N a_N, a₂, …, a_{N-1})` has cofactors
/// `(u⁻¹, u⁻¹ h b₂, …, u⁻¹ h b_{N-1})`.
pub fn reduce_tuple(
    a: &[SlowSequence],
    b: &[SlowSequence],
    opts: &ReduceOptions,
) -> Result<TupleReduction> {
    if a.len() < 2 || a.len() != b.len() {
        return Err(Error::invalid(format!(
            "need at least two members with matching cofactors, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let all: Vec<&SlowSequence> = a.iter().chain(b).collect();
    let dim = same_dims(&all)?;
    let n = a.len();
    let residual = corona::verify_bezout(a, b, opts.window)?;
    if residual > opts.tolerance {
        return Err(Error::BezoutResidual {
            residual,
            tolerance: opts.tolerance,
        });
    }
    let terms = (1..n)
        .map(|i| b[i].times(&a[i]))
        .collect::<Result<Vec<_>>>()?;
    let y = SlowSequence::sum(&terms.iter().collect::<Vec<_>>())?;
    let one = SlowSequence::one(dim)?;
    let pair_opts = ReduceOptions {
        tolerance: opts.tolerance * 2.0,
        ..*opts
    };
    let trace = reduce_pair(&a[0], &y, &b[0], &one, &pair_opts)?;
    let h = &trace.h;
    let u = &trace.result;
    let u_inv = u
        .phase()
        .times(&u.abs().recip(trace.result_inverse_witness.spec())?)?;

    let mut multipliers = vec![h.times(&b[n - 1])?];
    multipliers.extend((1..n - 1).map(|_| SlowSequence::zero(dim)).collect::<Result<Vec<_>>>()?);
    let mut reduced = vec![a[0].plus(&multipliers[0].times(&a[n - 1])?)?];
    reduced.extend(a[1..n - 1].iter().cloned());
    let mut cofactors = vec![u_inv.clone()];
    for bi in &b[1..n - 1] {
        cofactors.push(SlowSequence::product(&[&u_inv, h, bi])?);
    }
    Ok(TupleReduction {
        h: multipliers,
        reduced,
        cofactors,
        pair_second: y,
        trace,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// `|Σ_{‖n‖₁≤R} (x - y)(n) b(n)|`
    pub gap: f64,
    /// `max_{‖n‖₁≤R} |x(n) - y(n)|`
    pub window_sup_diff: f64,
    /// Certified bound on `Σ_n |b(n)|`.
    pub abs_sum_bound: f64,
    /// `window_sup_diff · abs_sum_bound`, which dominates `gap`.
    pub bound: f64,
    /// Bound on the part of the pairing beyond `R`.
    pub tail_bound: f64,
    pub radius: u64,
}

/// Size of the truncated pairing of `x - y` against a test sequence.
pub fn weak_star_gap(
    x: &SlowSequence,
    y: &SlowSequence,
    b: &FastSequence,
    radius: u64,
) -> Result<GapReport> {
    same_dims(&[x, y, b.as_slow()])?;
    let diff = x.minus(y)?;
    let p = pairing(&diff, b, radius)?;
    let sups = lattice::map_window(x.dim(), radius, |n| Ok(diff.eval(n)?.norm()))?;
    let window_sup_diff = sups.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let abs_sum = abs_sum_bound(b, radius)?;
    Ok(GapReport {
        gap: p.value.norm(),
        window_sup_diff,
        abs_sum_bound: abs_sum,
        bound: mul_up(window_sup_diff, abs_sum),
        tail_bound: p.tail_bound,
        radius,
    })
}

/// First shell on which `exp(-rate ‖n‖₁) < δ (1 + ‖n‖₁)^(-K)`, reported by
/// the point `(r, 0, …, 0)`; `None` if no shell up to `n_max` violates.
pub fn q_algebra_violation(
    dim: usize,
    rate: f64,
    delta: f64,
    k: u32,
    n_max: u64,
) -> Result<Option<LatticeIndex>> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if !(rate.is_finite() && rate > 0.0 && delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid("rate and delta must be positive"));
    }
    let ln_delta = delta.ln();
    let hit = (0..=n_max).find(|&r| {
        let r_f = r as f64;
        -rate * r_f < ln_delta - k as f64 * (1.0 + r_f).ln()
    });
    Ok(hit.map(|r| {
        let mut c = vec![0i64; dim];
        c[0] = r as i64;
        LatticeIndex::new(c).expect("dimension checked above")
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayGap {
    /// `|Σ_{‖n‖₁≤R} (e^{-ε‖n‖₁} - 1) b(n)|`
    pub gap: f64,
    /// Certified bound on `Σ_n ‖n‖₁ |b(n)|`.
    pub k_prime: f64,
    /// `k_prime · ε`
    pub bound: f64,
    pub tail_bound: f64,
    pub radius: u64,
}

/// The exponential net against the constant `1`. Since
/// `0 ≤ 1 - e^{-x} ≤ x`, the gap is at most `ε Σ ‖n‖₁ |b(n)|`.
pub fn exp_decay_gap(eps: f64, b: &FastSequence, radius: u64) -> Result<DecayGap> {
    check_epsilon(eps)?;
    let dim = b.dim();
    let x = SlowSequence::expdecay(dim, eps)?;
    let diff = x.minus(&SlowSequence::one(dim)?)?;
    let p = pairing(&diff, b, radius)?;
    let k_prime = norm_weighted_abs_sum_bound(b, radius)?;
    Ok(DecayGap {
        gap: p.value.norm(),
        k_prime,
        bound: mul_up(k_prime, eps),
        tail_bound: p.tail_bound,
        radius,
    })
}
