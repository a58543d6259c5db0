use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cert::{recip_up, GrowthCertificate};
use super::envelope::Envelope;
use super::node::{Node, NodeKind, PointValue, Scalar, WitnessSpec};
use crate::error::{Error, Result};
use crate::lattice::LatticeIndex;

/// Window radius used to check user-supplied certificates, chosen so the
/// window stays around ten thousand points.
pub fn default_check_radius(dim: usize) -> u64 {
    match dim {
        1 | 2 => 50,
        3 => 20,
        4 => 10,
        _ => 5,
    }
}

/// Pointwise operations accepted by [`SlowSequence::combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineOp {
    Add,
    Mul,
    Neg,
    Conj,
    Abs,
    Arg,
    Phase,
}

/// An element of `s'(Z^d)`: an expression tree with a growth certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct SlowSequence {
    node: Arc<Node>,
    cert: GrowthCertificate,
    dim: usize,
}

impl SlowSequence {
    /// Validates `node` for dimension `dim` and derives its certificate.
    pub fn new(node: Node, dim: usize) -> Result<Self> {
        SlowSequence::from_arc(Arc::new(node), dim)
    }

    pub fn from_arc(node: Arc<Node>, dim: usize) -> Result<Self> {
        SlowSequence::with_check_radius(node, dim, default_check_radius(dim))
    }

    /// Like [`SlowSequence::from_arc`] with an explicit radius for checking
    /// user-supplied certificates.
    pub fn with_check_radius(node: Arc<Node>, dim: usize, check_radius: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let cert = node.certify(dim, check_radius)?;
        Ok(SlowSequence { node, cert, dim })
    }

    fn leaf(kind: NodeKind, dim: usize) -> Result<Self> {
        SlowSequence::new(kind.into(), dim)
    }

    pub fn constant(dim: usize, value: Complex64) -> Result<Self> {
        SlowSequence::leaf(
            NodeKind::Const {
                re: value.re,
                im: value.im,
            },
            dim,
        )
    }

    pub fn real(dim: usize, value: f64) -> Result<Self> {
        SlowSequence::constant(dim, Complex64::new(value, 0.0))
    }

    pub fn one(dim: usize) -> Result<Self> {
        SlowSequence::real(dim, 1.0)
    }

    pub fn zero(dim: usize) -> Result<Self> {
        SlowSequence::real(dim, 0.0)
    }

    pub fn coord(dim: usize, axis: usize) -> Result<Self> {
        SlowSequence::leaf(NodeKind::Coord { axis }, dim)
    }

    pub fn norm1(dim: usize) -> Result<Self> {
        SlowSequence::leaf(NodeKind::Norm1, dim)
    }

    /// `(1 + ‖n‖₁)^k`
    pub fn polyenv(dim: usize, k: i32) -> Result<Self> {
        SlowSequence::leaf(NodeKind::Polyenv { k }, dim)
    }

    /// `exp(-rate ‖n‖₁)`
    pub fn expdecay(dim: usize, rate: f64) -> Result<Self> {
        SlowSequence::leaf(NodeKind::Expdecay { rate }, dim)
    }

    /// The constant `base` overridden at the listed points.
    pub fn points(
        dim: usize,
        base: Complex64,
        entries: impl IntoIterator<Item = (LatticeIndex, Complex64)>,
    ) -> Result<Self> {
        let entries = entries
            .into_iter()
            .map(|(index, v)| PointValue {
                index,
                re: v.re,
                im: v.im,
            })
            .collect();
        SlowSequence::leaf(
            NodeKind::Points {
                base: Scalar::from(base),
                entries,
            },
            dim,
        )
    }

    /// Indicator of a single lattice point.
    pub fn indicator(n: &LatticeIndex) -> Result<Self> {
        SlowSequence::points(
            n.dim(),
            Complex64::new(0.0, 0.0),
            [(n.clone(), Complex64::new(1.0, 0.0))],
        )
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn node_arc(&self) -> &Arc<Node> {
        &self.node
    }

    pub fn cert(&self) -> GrowthCertificate {
        self.cert
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, n: &LatticeIndex) -> Result<Complex64> {
        n.check_dim(self.dim)?;
        self.node.eval_at(n)
    }

    /// Applies a pointwise operation. `Add` and `Mul` take one or more
    /// arguments, the remaining operations exactly one.
    pub fn combine(op: CombineOp, args: &[&SlowSequence]) -> Result<Self> {
        let first = args
            .first()
            .ok_or_else(|| Error::invalid("combine needs at least one argument"))?;
        for a in args {
            if a.dim != first.dim {
                return Err(Error::DimensionMismatch {
                    expected: first.dim,
                    got: a.dim,
                });
            }
        }
        let unary = || -> Result<&SlowSequence> {
            match args {
                [a] => Ok(a),
                _ => Err(Error::invalid(format!("{op:?} takes exactly one argument"))),
            }
        };
        let children = || args.iter().map(|a| a.node.clone()).collect::<Vec<_>>();
        let (kind, cert) = match op {
            CombineOp::Add => (
                NodeKind::Add { args: children() },
                GrowthCertificate::sum(args.iter().map(|a| a.cert))?,
            ),
            CombineOp::Mul => (
                NodeKind::Mul { args: children() },
                GrowthCertificate::product(args.iter().map(|a| a.cert))?,
            ),
            CombineOp::Neg => (NodeKind::Neg { arg: unary()?.node.clone() }, unary()?.cert),
            CombineOp::Conj => (NodeKind::Conj { arg: unary()?.node.clone() }, unary()?.cert),
            CombineOp::Abs => (NodeKind::Abs { arg: unary()?.node.clone() }, unary()?.cert),
            CombineOp::Arg => (
                NodeKind::Arg { arg: unary()?.node.clone() },
                GrowthCertificate::arg(),
            ),
            CombineOp::Phase => (
                NodeKind::Phase { arg: unary()?.node.clone() },
                GrowthCertificate::new(1.0, 0)?,
            ),
        };
        Ok(SlowSequence {
            node: Arc::new(kind.into()),
            cert,
            dim: first.dim,
        })
    }

    pub fn sum(args: &[&SlowSequence]) -> Result<Self> {
        SlowSequence::combine(CombineOp::Add, args)
    }

    pub fn product(args: &[&SlowSequence]) -> Result<Self> {
        SlowSequence::combine(CombineOp::Mul, args)
    }

    pub fn plus(&self, other: &SlowSequence) -> Result<Self> {
        SlowSequence::sum(&[self, other])
    }

    pub fn minus(&self, other: &SlowSequence) -> Result<Self> {
        SlowSequence::sum(&[self, &other.neg()])
    }

    pub fn times(&self, other: &SlowSequence) -> Result<Self> {
        SlowSequence::product(&[self, other])
    }

    fn unary(&self, op: CombineOp) -> Self {
        SlowSequence::combine(op, &[self]).expect("unary combine on a single argument")
    }

    pub fn neg(&self) -> Self {
        self.unary(CombineOp::Neg)
    }

    pub fn conj(&self) -> Self {
        self.unary(CombineOp::Conj)
    }

    pub fn abs(&self) -> Self {
        self.unary(CombineOp::Abs)
    }

    pub fn arg(&self) -> Self {
        self.unary(CombineOp::Arg)
    }

    pub fn phase(&self) -> Self {
        self.unary(CombineOp::Phase)
    }

    /// `eps` wherever `|a(n)| ≤ eps`, `a(n)` elsewhere.
    pub fn clip(&self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::invalid(format!("clip eps must be positive, got {eps}")));
        }
        Ok(SlowSequence {
            node: Arc::new(
                NodeKind::Clip {
                    arg: self.node.clone(),
                    eps,
                }
                .into(),
            ),
            cert: GrowthCertificate::new(self.cert.m.max(eps), self.cert.k)?,
            dim: self.dim,
        })
    }

    /// `1 / a`, valid wherever `|a(n)| ≥ delta (1 + ‖n‖₁)^(-K)`; evaluation
    /// reports a witness violation elsewhere.
    pub fn recip(&self, witness: WitnessSpec) -> Result<Self> {
        if !(witness.delta.is_finite() && witness.delta > 0.0) {
            return Err(Error::invalid(format!(
                "witness delta must be positive, got {}",
                witness.delta
            )));
        }
        Ok(SlowSequence {
            node: Arc::new(
                NodeKind::Recip {
                    arg: self.node.clone(),
                    witness,
                }
                .into(),
            ),
            cert: GrowthCertificate::new(recip_up(witness.delta), witness.k)?,
            dim: self.dim,
        })
    }
}

/// An element of `s(Z^d)`: an expression tree with a decay envelope.
#[derive(Clone, Debug, PartialEq)]
pub struct FastSequence {
    seq: SlowSequence,
    envelope: Envelope,
}

impl FastSequence {
    /// Accepts any tree whose envelope is bounded; seminorm bounds of orders
    /// the envelope cannot control come back infinite.
    pub fn new(node: Node, dim: usize) -> Result<Self> {
        FastSequence::from_slow(SlowSequence::new(node, dim)?)
    }

    pub fn from_slow(seq: SlowSequence) -> Result<Self> {
        let envelope = Envelope::of(seq.node());
        if !envelope.weighted_sup(0, 0).is_finite() {
            return Err(Error::InsufficientDecay(0));
        }
        Ok(FastSequence { seq, envelope })
    }

    pub fn as_slow(&self) -> &SlowSequence {
        &self.seq
    }

    pub fn dim(&self) -> usize {
        self.seq.dim
    }

    pub fn node(&self) -> &Node {
        self.seq.node()
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn eval(&self, n: &LatticeIndex) -> Result<Complex64> {
        self.seq.eval(n)
    }

    /// Proven upper bound on `p_k(b) = sup (1 + ‖n‖₁)^k |b(n)|`.
    pub fn seminorm_bound(&self, k: u32) -> f64 {
        self.envelope.weighted_sup(k as i64, 0)
    }

    /// Radius beyond which `b` vanishes identically, if known.
    pub fn support_radius(&self) -> Option<u64> {
        self.envelope.support_radius()
    }
}
