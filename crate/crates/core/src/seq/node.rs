use std::collections::HashSet;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cert::{recip_up, GrowthCertificate};
use crate::error::{Error, Result};
use crate::lattice::{self, LatticeIndex};

/// Lower bound `delta (1 + ‖n‖₁)^(-K)` attached to a reciprocal node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub delta: f64,
    #[serde(rename = "K")]
    pub k: u32,
}

impl WitnessSpec {
    pub fn lower_bound(&self, norm: u64) -> f64 {
        self.delta * (1.0 + norm as f64).powi(-(self.k as i32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Scalar> for Complex64 {
    fn from(s: Scalar) -> Self {
        Complex64::new(s.re, s.im)
    }
}

impl From<Complex64> for Scalar {
    fn from(c: Complex64) -> Self {
        Scalar { re: c.re, im: c.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointValue {
    pub index: LatticeIndex,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// One node of a sequence expression. `cert` is an optional user-supplied
/// growth certificate; it replaces the syntactic one after a window check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    #[serde(flatten)]
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cert: Option<GrowthCertificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NodeKind {
    Const {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// `n ↦ n[axis]`
    Coord { axis: usize },
    /// `n ↦ ‖n‖₁`
    Norm1,
    /// `n ↦ (1 + ‖n‖₁)^k`
    Polyenv { k: i32 },
    /// `n ↦ exp(-rate ‖n‖₁)`
    Expdecay { rate: f64 },
    Add { args: Vec<Arc<Node>> },
    Mul { args: Vec<Arc<Node>> },
    Neg { arg: Arc<Node> },
    Conj { arg: Arc<Node> },
    Abs { arg: Arc<Node> },
    /// Principal argument in `(-π, π]`, zero at zero.
    Arg { arg: Arc<Node> },
    /// `exp(-i Arg(a))`, equal to one where `a` vanishes.
    Phase { arg: Arc<Node> },
    /// `eps` where `|a| ≤ eps`, else `a`.
    Clip { arg: Arc<Node>, eps: f64 },
    /// `1 / a`, guarded by the witness lower bound.
    Recip { arg: Arc<Node>, witness: WitnessSpec },
    /// A constant `base` modified at finitely many points.
    Points {
        #[serde(default = "zero_scalar")]
        base: Scalar,
        entries: Vec<PointValue>,
    },
}

fn zero_scalar() -> Scalar {
    Scalar { re: 0.0, im: 0.0 }
}

impl From<NodeKind> for Node {
    fn from(kind: NodeKind) -> Self {
        Node { kind, cert: None }
    }
}

/// Principal argument in `(-π, π]` with `Arg(0) = 0`.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    if z.im == 0.0 && z.re < 0.0 {
        // atan2(-0.0, x < 0) would give -π
        return PI;
    }
    z.im.atan2(z.re)
}

/// `exp(-i Arg(z))`, computed as `conj(z) / |z|`; one at zero.
pub fn unit_phase(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    z.conj() / z.norm()
}

impl Node {
    pub fn children(&self) -> Vec<&Arc<Node>> {
        use NodeKind::*;
        match &self.kind {
            Add { args } | Mul { args } => args.iter().collect(),
            Neg { arg } | Conj { arg } | Abs { arg } | Arg { arg } | Phase { arg } => vec![arg],
            Clip { arg, .. } | Recip { arg, .. } => vec![arg],
            Const { .. } | Coord { .. } | Norm1 | Polyenv { .. } | Expdecay { .. } | Points { .. } => {
                vec![]
            }
        }
    }

    /// Evaluates at `n`. Caller guarantees the tree was validated for `n`'s dimension.
    pub(crate) fn eval_at(&self, n: &LatticeIndex) -> Result<Complex64> {
        self.eval_inner(n, n.norm1())
    }

    fn eval_inner(&self, n: &LatticeIndex, norm: u64) -> Result<Complex64> {
        use NodeKind::*;
        let real = |x: f64| Complex64::new(x, 0.0);
        Ok(match &self.kind {
            Const { re, im } => Complex64::new(*re, *im),
            Coord { axis } => real(n.coords()[*axis] as f64),
            Norm1 => real(norm as f64),
            Polyenv { k } => real((1.0 + norm as f64).powi(*k)),
            Expdecay { rate } => real((-rate * norm as f64).exp()),
            Add { args } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in args {
                    acc += a.eval_inner(n, norm)?;
                }
                acc
            }
            Mul { args } => {
                let mut acc = Complex64::new(1.0, 0.0);
                for a in args {
                    acc *= a.eval_inner(n, norm)?;
                }
                acc
            }
            Neg { arg } => -arg.eval_inner(n, norm)?,
            Conj { arg } => arg.eval_inner(n, norm)?.conj(),
            Abs { arg } => real(arg.eval_inner(n, norm)?.norm()),
            Arg { arg } => real(principal_arg(arg.eval_inner(n, norm)?)),
            Phase { arg } => unit_phase(arg.eval_inner(n, norm)?),
            Clip { arg, eps } => {
                let v = arg.eval_inner(n, norm)?;
                if v.norm() <= *eps {
                    real(*eps)
                } else {
                    v
                }
            }
            Recip { arg, witness } => {
                let v = arg.eval_inner(n, norm)?;
                let modulus = v.norm();
                let bound = witness.lower_bound(norm);
                if modulus == 0.0 || modulus < bound {
                    return Err(Error::WitnessViolation {
                        index: n.clone(),
                        value: modulus,
                        bound,
                    });
                }
                v.inv()
            }
            Points { base, entries } => entries
                .iter()
                .find(|e| &e.index == n)
                .map(|e| Complex64::new(e.re, e.im))
                .unwrap_or_else(|| (*base).into()),
        })
    }

    /// Validates the tree for dimension `dim` and returns its growth
    /// certificate: syntactic composition, or the user certificate where one
    /// is attached (checked on the window `‖n‖₁ ≤ check_radius`).
    pub(crate) fn certify(&self, dim: usize, check_radius: u64) -> Result<GrowthCertificate> {
        use NodeKind::*;
        let one = GrowthCertificate { m: 1.0, k: 1 };
        let syntactic = match &self.kind {
            Const { re, im } => {
                finite(*re, "const.re")?;
                finite(*im, "const.im")?;
                GrowthCertificate::new(Complex64::new(*re, *im).norm(), 0)?
            }
            Coord { axis } => {
                if *axis >= dim {
                    return Err(Error::invalid(format!(
                        "coord axis {axis} out of range for dimension {dim}"
                    )));
                }
                one
            }
            Norm1 => one,
            Polyenv { k } => GrowthCertificate::new(1.0, (*k).max(0) as u32)?,
            Expdecay { rate } => {
                if !(rate.is_finite() && *rate >= 0.0) {
                    return Err(Error::invalid(format!(
                        "expdecay rate must be finite and nonnegative, got {rate}"
                    )));
                }
                GrowthCertificate::new(1.0, 0)?
            }
            Add { args } => {
                nonempty(args, "add")?;
                GrowthCertificate::sum(certify_all(args, dim, check_radius)?)?
            }
            Mul { args } => {
                nonempty(args, "mul")?;
                GrowthCertificate::product(certify_all(args, dim, check_radius)?)?
            }
            Neg { arg } | Conj { arg } | Abs { arg } => arg.certify(dim, check_radius)?,
            Arg { arg } => {
                arg.certify(dim, check_radius)?;
                GrowthCertificate::arg()
            }
            Phase { arg } => {
                arg.certify(dim, check_radius)?;
                GrowthCertificate::new(1.0, 0)?
            }
            Clip { arg, eps } => {
                if !(eps.is_finite() && *eps > 0.0) {
                    return Err(Error::invalid(format!("clip eps must be positive, got {eps}")));
                }
                let inner = arg.certify(dim, check_radius)?;
                GrowthCertificate::new(inner.m.max(*eps), inner.k)?
            }
            Recip { arg, witness } => {
                if !(witness.delta.is_finite() && witness.delta > 0.0) {
                    return Err(Error::invalid(format!(
                        "recip witness delta must be positive, got {}",
                        witness.delta
                    )));
                }
                arg.certify(dim, check_radius)?;
                GrowthCertificate::new(recip_up(witness.delta), witness.k)?
            }
            Points { base, entries } => {
                finite(base.re, "points.base.re")?;
                finite(base.im, "points.base.im")?;
                let mut seen = HashSet::new();
                let mut m = Complex64::from(*base).norm();
                for e in entries {
                    e.index.check_dim(dim)?;
                    finite(e.re, "points.entries.re")?;
                    finite(e.im, "points.entries.im")?;
                    if !seen.insert(&e.index) {
                        return Err(Error::invalid(format!("duplicate point {}", e.index)));
                    }
                    m = m.max(Complex64::new(e.re, e.im).norm());
                }
                GrowthCertificate::new(m, 0)?
            }
        };
        match self.cert {
            None => Ok(syntactic),
            Some(user) => {
                let user = GrowthCertificate::new(user.m, user.k)?;
                self.check_cert_on_window(user, dim, check_radius)?;
                Ok(user)
            }
        }
    }

    fn check_cert_on_window(&self, cert: GrowthCertificate, dim: usize, radius: u64) -> Result<()> {
        let bad = lattice::find_first(dim, radius, |n| {
            let v = self.eval_at(n)?;
            Ok(!cert.admits(v.norm(), n.norm1()))
        })?;
        match bad {
            None => Ok(()),
            Some(index) => {
                let value = self.eval_at(&index)?.norm();
                Err(Error::CertificateViolation {
                    index,
                    m: cert.m,
                    k: cert.k,
                    value,
                })
            }
        }
    }
}

fn certify_all(args: &[Arc<Node>], dim: usize, radius: u64) -> Result<Vec<GrowthCertificate>> {
    args.iter().map(|a| a.certify(dim, radius)).collect()
}

fn nonempty(args: &[Arc<Node>], what: &str) -> Result<()> {
    if args.is_empty() {
        return Err(Error::invalid(format!("{what} needs at least one argument")));
    }
    Ok(())
}

fn finite(x: f64, field: &str) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("{field} must be finite, got {x}")));
    }
    Ok(())
}
