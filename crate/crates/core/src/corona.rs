//! The corona-type lower bound `Σᵢ |aᵢ(n)| ≥ δ (1 + ‖n‖₁)^(-K)` and the
//! Bézout equation `Σᵢ bᵢ aᵢ = 1` it is equivalent to.
//!
//! The lower bound quantifies over all of `Z^d`, so a witness is either
//! verified exhaustively on a window, or additionally certified because one
//! member of the family has a recognised symbolic form that is bounded below
//! everywhere (see [`modulus_lower_bound`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeIndex};
use crate::seq::{mul_up, GrowthCertificate, Node, NodeKind, SlowSequence, WitnessSpec};

/// Default tolerance for Bézout residuals in double precision.
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

/// Relative shrink applied to lower bounds that pass through rounded
/// operations (phase normalisation, products, reciprocals).
const LOWER_BOUND_SHRINK: f64 = 1.0 - 8.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessStatus {
    /// Checked at every point with `‖n‖₁ ≤ radius`.
    WindowVerified { radius: u64 },
    /// Holds on all of `Z^d` by a recognised form.
    Certified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoronaWitness {
    pub delta: f64,
    #[serde(rename = "K")]
    pub k: u32,
    pub status: WitnessStatus,
}

impl CoronaWitness {
    pub fn new(delta: f64, k: u32, status: WitnessStatus) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid(format!("delta must be positive, got {delta}")));
        }
        Ok(CoronaWitness { delta, k, status })
    }

    pub fn spec(&self) -> WitnessSpec {
        WitnessSpec {
            delta: self.delta,
            k: self.k,
        }
    }

    pub fn lower_bound(&self, norm: u64) -> f64 {
        self.spec().lower_bound(norm)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoronaCheck {
    pub holds: bool,
    pub first_violation: Option<LatticeIndex>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BezoutSolution {
    pub cofactors: Vec<SlowSequence>,
    pub witness: CoronaWitness,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitCheck {
    pub invertible: bool,
    pub inverse: Option<SlowSequence>,
    pub first_violation: Option<LatticeIndex>,
}

fn family_dim(a: &[SlowSequence]) -> Result<usize> {
    let first = a
        .first()
        .ok_or_else(|| Error::invalid("family must contain at least one sequence"))?;
    for s in a {
        if s.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                got: s.dim(),
            });
        }
    }
    Ok(first.dim())
}

fn check_params(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

/// `n ↦ Σᵢ |aᵢ(n)|`
pub fn abs_sum(a: &[SlowSequence]) -> Result<SlowSequence> {
    family_dim(a)?;
    let abs: Vec<SlowSequence> = a.iter().map(SlowSequence::abs).collect();
    SlowSequence::sum(&abs.iter().collect::<Vec<_>>())
}

fn abs_sum_at(a: &[SlowSequence], n: &LatticeIndex) -> Result<f64> {
    a.iter().try_fold(0.0, |acc, s| Ok(acc + s.eval(n)?.norm()))
}

/// Exhaustive check of the lower bound on `‖n‖₁ ≤ R`; the first violation
/// is reported in shell-then-lexicographic order.
pub fn check_corona_window(
    a: &[SlowSequence],
    delta: f64,
    k: u32,
    radius: u64,
) -> Result<CoronaCheck> {
    let dim = family_dim(a)?;
    check_params(delta)?;
    let spec = WitnessSpec { delta, k };
    let first_violation = lattice::find_first(dim, radius, |n| {
        Ok(abs_sum_at(a, n)? < spec.lower_bound(n.norm1()))
    })?;
    Ok(CoronaCheck {
        holds: first_violation.is_none(),
        first_violation,
    })
}

/// Smallest value of `Σᵢ|aᵢ(n)| (1 + ‖n‖₁)^K` on each shell, i.e. the best
/// `δ` each shell allows.
pub fn corona_margin_by_shell(a: &[SlowSequence], k: u32, radius: u64) -> Result<Vec<(u64, f64)>> {
    let dim = family_dim(a)?;
    let values = lattice::map_window(dim, radius, |n| {
        Ok(abs_sum_at(a, n)? * (1.0 + n.norm1() as f64).powi(k as i32))
    })?;
    Ok(per_shell(radius, values, f64::INFINITY, f64::min))
}

fn per_shell(
    radius: u64,
    values: Vec<(LatticeIndex, f64)>,
    init: f64,
    fold: impl Fn(f64, f64) -> f64,
) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64)> = (0..=radius).map(|r| (r, init)).collect();
    for (n, v) in values {
        let slot = &mut out[n.norm1() as usize].1;
        *slot = fold(*slot, v);
    }
    out
}

/// A lower bound `|a(n)| ≥ δ (1 + ‖n‖₁)^(-K)` valid on all of `Z^d`, read off
/// the expression tree. Recognised: nonzero constants, `polyenv`,
/// `expdecay` with rate zero, `clip`, `phase`, reciprocals (through the growth
/// certificate of their argument), finitely modified nonzero constants,
/// products of recognised forms, and sums of nonnegative real terms one of
/// which is recognised. `Neg`, `Conj` and `Abs` pass the bound through.
pub fn modulus_lower_bound(node: &Node, dim: usize) -> Option<WitnessSpec> {
    use NodeKind::*;
    let lb = |delta: f64, k: u32| Some(WitnessSpec { delta, k });
    match &node.kind {
        Const { re, im } => {
            let m = re.hypot(*im);
            (m > 0.0).then_some(WitnessSpec { delta: m, k: 0 })
        }
        Polyenv { k } => lb(1.0, (-*k).max(0) as u32),
        Expdecay { rate } if *rate == 0.0 => lb(1.0, 0),
        Neg { arg } | Conj { arg } | Abs { arg } => modulus_lower_bound(arg, dim),
        Phase { .. } => lb(LOWER_BOUND_SHRINK, 0),
        Clip { eps, .. } => lb(*eps, 0),
        Recip { arg, .. } => {
            let cert = arg.certify(dim, 0).ok()?;
            (cert.m > 0.0).then(|| WitnessSpec {
                delta: LOWER_BOUND_SHRINK / cert.m,
                k: cert.k,
            })
        }
        Mul { args } => {
            let mut delta = 1.0;
            let mut k = 0;
            for a in args {
                let w = modulus_lower_bound(a, dim)?;
                delta *= w.delta * LOWER_BOUND_SHRINK;
                k += w.k;
            }
            lb(delta, k)
        }
        Add { args } if args.iter().all(|a| is_nonneg_real(a)) => args
            .iter()
            .filter_map(|a| modulus_lower_bound(a, dim))
            .min_by(|x, y| x.k.cmp(&y.k).then(y.delta.total_cmp(&x.delta))),
        Points { base, entries } => {
            let m = entries
                .iter()
                .map(|e| e.re.hypot(e.im))
                .fold(base.re.hypot(base.im), f64::min);
            (m > 0.0).then_some(WitnessSpec { delta: m, k: 0 })
        }
        _ => None,
    }
}

/// True when the node evaluates to a nonnegative real at every point.
fn is_nonneg_real(node: &Node) -> bool {
    use NodeKind::*;
    match &node.kind {
        Abs { .. } | Polyenv { .. } | Expdecay { .. } | Norm1 => true,
        Const { re, im } => *re >= 0.0 && *im == 0.0,
        Add { args } | Mul { args } => args.iter().all(|a| is_nonneg_real(a)),
        Clip { arg, .. } | Recip { arg, .. } => is_nonneg_real(arg),
        Points { base, entries } => {
            base.re >= 0.0 && base.im == 0.0 && entries.iter().all(|e| e.re >= 0.0 && e.im == 0.0)
        }
        _ => false,
    }
}

/// Whether `(delta, K)` holds on all of `Z^d` for the family because some
/// member has a recognised lower bound at least as strong.
pub fn is_certified(a: &[SlowSequence], delta: f64, k: u32) -> bool {
    a.iter().any(|s| {
        modulus_lower_bound(s.node(), s.dim()).is_some_and(|w| delta <= w.delta && k >= w.k)
    })
}

/// Checks `(delta, K)` on the window and upgrades it to certified when a
/// recognised form covers it. `None` when the window check fails.
pub fn establish_witness(
    a: &[SlowSequence],
    delta: f64,
    k: u32,
    radius: u64,
) -> Result<Option<CoronaWitness>> {
    let check = check_corona_window(a, delta, k, radius)?;
    if !check.holds {
        return Ok(None);
    }
    let status = if is_certified(a, delta, k) {
        WitnessStatus::Certified
    } else {
        WitnessStatus::WindowVerified { radius }
    };
    Ok(Some(CoronaWitness::new(delta, k, status)?))
}

/// Cofactors `bᵢ = exp(-i Arg aᵢ) / Σⱼ |aⱼ|`, each with certificate
/// `(1/δ, K)`. Evaluating a cofactor where the witness fails is an error.
pub fn solve_bezout(a: &[SlowSequence], witness: &CoronaWitness) -> Result<BezoutSolution> {
    family_dim(a)?;
    let inv_sum = abs_sum(a)?.recip(witness.spec())?;
    let cofactors = a
        .iter()
        .map(|ai| ai.phase().times(&inv_sum))
        .collect::<Result<Vec<_>>>()?;
    Ok(BezoutSolution {
        cofactors,
        witness: *witness,
    })
}

fn check_pair(a: &[SlowSequence], b: &[SlowSequence]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "family has {} members but {} cofactors were given",
            a.len(),
            b.len()
        )));
    }
    let dim = family_dim(a)?;
    let bdim = family_dim(b)?;
    if bdim != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bdim,
        });
    }
    Ok(dim)
}

fn residual_at(a: &[SlowSequence], b: &[SlowSequence], n: &LatticeIndex) -> Result<f64> {
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for (ai, bi) in a.iter().zip(b) {
        acc += bi.eval(n)? * ai.eval(n)?;
    }
    Ok((acc - 1.0).norm())
}

/// `max_{‖n‖₁ ≤ R} |Σᵢ bᵢ(n) aᵢ(n) - 1|`
pub fn verify_bezout(a: &[SlowSequence], b: &[SlowSequence], radius: u64) -> Result<f64> {
    Ok(bezout_residual_by_shell(a, b, radius)?
        .into_iter()
        .map(|(_, r)| r)
        .fold(0.0, f64::max))
}

/// Largest Bézout residual on each shell `‖n‖₁ = r`, `r ≤ R`.
pub fn bezout_residual_by_shell(
    a: &[SlowSequence],
    b: &[SlowSequence],
    radius: u64,
) -> Result<Vec<(u64, f64)>> {
    let dim = check_pair(a, b)?;
    let values = lattice::map_window(dim, radius, |n| residual_at(a, b, n))?;
    Ok(per_shell(radius, values, 0.0, f64::max))
}

/// The necessity direction: from cofactor certificates `(Mᵢ, kᵢ)` the family
/// satisfies the lower bound with `δ = 1/max Mᵢ`, `K = max kᵢ`. The witness
/// is returned as verified on the trivial window `R = 0`; callers widen it
/// with [`establish_witness`].
pub fn witness_from_bezout(b: &[SlowSequence]) -> Result<CoronaWitness> {
    family_dim(b)?;
    let m = b.iter().map(|s| s.cert().m).fold(0.0, f64::max);
    let k = b.iter().map(|s| s.cert().k).max().unwrap_or(0);
    if m == 0.0 {
        return Err(Error::invalid(
            "cofactor certificates are all zero; no Bézout identity can hold",
        ));
    }
    let mut delta = 1.0 / m;
    // round toward zero so that delta * m ≤ 1
    if delta.mul_add(m, -1.0) > 0.0 {
        delta = delta.next_down();
    }
    CoronaWitness::new(delta, k, WitnessStatus::WindowVerified { radius: 0 })
}

/// Invertibility of a single element under `witness`, checked on `‖n‖₁ ≤ R`.
/// The inverse is `exp(-i Arg a) / |a|` with certificate `(1/δ, K)`.
pub fn is_unit(a: &SlowSequence, witness: &CoronaWitness, radius: u64) -> Result<UnitCheck> {
    let family = std::slice::from_ref(a);
    let check = check_corona_window(family, witness.delta, witness.k, radius)?;
    if !check.holds {
        return Ok(UnitCheck {
            invertible: false,
            inverse: None,
            first_violation: check.first_violation,
        });
    }
    let inverse = a.phase().times(&a.abs().recip(witness.spec())?)?;
    Ok(UnitCheck {
        invertible: true,
        inverse: Some(inverse),
        first_violation: None,
    })
}

/// Certificate a cofactor built by [`solve_bezout`] carries.
pub fn cofactor_certificate(witness: &CoronaWitness) -> Result<GrowthCertificate> {
    GrowthCertificate::new(mul_up(1.0, crate::seq::recip_up(witness.delta)), witness.k)
}
