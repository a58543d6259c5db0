//! Radial decay envelopes.
//!
//! An envelope is a finite sum of terms `c (1 + r)^p exp(-s r)`, each
//! optionally vanishing beyond a support radius, such that
//! `|b(n)| ≤ E(‖n‖₁)` for every `n`. Any weighted supremum
//! `sup_r (1 + r)^k E(r)` is then available in closed form, which is what
//! the seminorm and pairing tail bounds consume.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::cert::{add_up, mul_up, recip_up, round_up};
use super::node::{Node, NodeKind};

const MAX_TERMS: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Term {
    pub scale: f64,
    pub power: i64,
    pub rate: f64,
    /// `None` means the term is active for every radius.
    pub support: Option<u64>,
}

impl Term {
    fn constant(scale: f64) -> Self {
        Term {
            scale,
            power: 0,
            rate: 0.0,
            support: None,
        }
    }

    fn times(&self, other: &Term) -> Term {
        Term {
            scale: mul_up(self.scale, other.scale),
            power: self.power + other.power,
            rate: self.rate + other.rate,
            support: match (self.support, other.support) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (s, None) | (None, s) => s,
            },
        }
    }

    fn active_at(&self, r: u64) -> bool {
        self.support.is_none_or(|s| r <= s)
    }

    /// Term value times `(1 + r)^extra_power`, rounded up; `r` is integral.
    fn value(&self, r: f64, extra_power: i64) -> f64 {
        let p = self.power + extra_power;
        if self.rate == 0.0 {
            let mag = (1.0 + r).powi(p.unsigned_abs() as i32);
            // integer powers below 2^53 are exact
            let mag = if mag < 9.007_199_254_740_992e15 { mag } else { round_up(mag) };
            let factor = if p >= 0 { mag } else { recip_up(mag) };
            return mul_up(self.scale, factor);
        }
        round_up(self.scale * (p as f64 * (1.0 + r).ln() - self.rate * r).exp())
    }

    /// `sup { (1 + r)^order · term(r) : from ≤ r ≤ support }`.
    pub fn weighted_sup(&self, order: i64, from: u64) -> f64 {
        let hi = match self.support {
            Some(s) if s < from => return 0.0,
            Some(s) => s as f64,
            None => f64::INFINITY,
        };
        let lo = from as f64;
        let p = self.power + order;
        if p <= 0 {
            return self.value(lo, order);
        }
        if self.rate == 0.0 {
            if hi.is_infinite() {
                return f64::INFINITY;
            }
            return self.value(hi, order);
        }
        // log-concave in r with real peak at 1 + r = p / rate; the integer
        // maximum sits at one of the neighbouring integers
        let peak = (p as f64 / self.rate - 1.0).clamp(lo, hi);
        self.value(peak.floor(), order)
            .max(self.value(peak.ceil().min(hi), order))
    }
}

/// Upper envelope of `|b(n)|` as a function of `‖n‖₁`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Envelope {
    terms: Vec<Term>,
}

impl Envelope {
    fn single(term: Term) -> Self {
        if term.scale == 0.0 {
            return Envelope::default();
        }
        Envelope { terms: vec![term] }
    }

    fn constant(scale: f64) -> Self {
        Envelope::single(Term::constant(scale))
    }

    fn plus(mut self, other: Envelope) -> Self {
        self.terms.extend(other.terms);
        self.compact()
    }

    fn times(&self, other: &Envelope) -> Self {
        let terms = self
            .terms
            .iter()
            .flat_map(|a| other.terms.iter().map(move |b| a.times(b)))
            .collect();
        Envelope { terms }.compact()
    }

    fn compact(self) -> Self {
        if self.terms.len() <= MAX_TERMS {
            return self;
        }
        // (1+r)^p e^{-sr} ≤ (1+r)^{max p} e^{-(min s) r} for r ≥ 0
        let merged = self.terms.iter().fold(
            Term {
                scale: 0.0,
                power: i64::MIN,
                rate: f64::INFINITY,
                support: Some(0),
            },
            |acc, t| Term {
                scale: add_up(acc.scale, t.scale),
                power: acc.power.max(t.power),
                rate: acc.rate.min(t.rate),
                support: match (acc.support, t.support) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    _ => None,
                },
            },
        );
        Envelope::single(merged)
    }

    /// Envelope of a validated expression tree.
    pub fn of(node: &Node) -> Self {
        use NodeKind::*;
        match &node.kind {
            Const { re, im } => Envelope::constant(Complex64::new(*re, *im).norm()),
            Coord { .. } | Norm1 => Envelope::single(Term {
                power: 1,
                ..Term::constant(1.0)
            }),
            Polyenv { k } => Envelope::single(Term {
                power: *k as i64,
                ..Term::constant(1.0)
            }),
            Expdecay { rate } => Envelope::single(Term {
                rate: *rate,
                ..Term::constant(1.0)
            }),
            Add { args } => args
                .iter()
                .fold(Envelope::default(), |acc, a| acc.plus(Envelope::of(a))),
            Mul { args } => args
                .iter()
                .skip(1)
                .fold(Envelope::of(&args[0]), |acc, a| acc.times(&Envelope::of(a))),
            Neg { arg } | Conj { arg } | Abs { arg } => Envelope::of(arg),
            Arg { .. } => Envelope::constant(PI.next_up()),
            Phase { .. } => Envelope::constant(1.0),
            Clip { arg, eps } => Envelope::of(arg).plus(Envelope::constant(*eps)),
            Recip { witness, .. } => Envelope::single(Term {
                power: witness.k as i64,
                ..Term::constant(recip_up(witness.delta))
            }),
            Points { base, entries } => {
                let base_env = Envelope::constant(Complex64::from(*base).norm());
                let peak = entries
                    .iter()
                    .map(|e| Complex64::new(e.re, e.im).norm())
                    .fold(0.0, f64::max);
                let support = entries.iter().map(|e| e.index.norm1()).max().unwrap_or(0);
                base_env.plus(Envelope::single(Term {
                    support: Some(support),
                    ..Term::constant(peak)
                }))
            }
        }
    }

    pub(crate) fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Upper bound on `|b(n)|` for `‖n‖₁ = r`.
    pub fn bound_at(&self, r: u64) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.active_at(r))
            .map(|t| t.value(r as f64, 0))
            .fold(0.0, add_up)
    }

    /// Upper bound on `sup { (1 + ‖n‖₁)^order |b(n)| : ‖n‖₁ ≥ from }`;
    /// infinite when the envelope does not decay fast enough.
    pub fn weighted_sup(&self, order: i64, from: u64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weighted_sup(order, from))
            .fold(0.0, add_up)
    }

    /// Radius beyond which the envelope vanishes, if any.
    pub fn support_radius(&self) -> Option<u64> {
        self.terms
            .iter()
            .try_fold(0u64, |acc, t| t.support.map(|s| acc.max(s)))
    }
}
