//! Polynomial Bézout identities in the ring of entire functions of
//! exponential type, and why `z - 1 + h(z) z³` is never a unit for
//! polynomial `h`.
//!
//! Units of that ring are `e^{a + bz}` and have no zeros, while every
//! nonconstant polynomial has one.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex rationals.
pub type ExactComplex = Complex<BigRational>;

/// Coefficient types that report a magnitude.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Magnitude for ExactComplex {
    fn magnitude(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }
}

pub fn rational(num: i64, den: i64) -> ExactComplex {
    Complex::new(
        BigRational::new(BigInt::from(num), BigInt::from(den)),
        BigRational::zero(),
    )
}

/// Polynomial with coefficients in ascending degree; trailing zeros are
/// trimmed so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Clone + Zero> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Clone + Zero + One> Poly<T> {
    pub fn one() -> Self {
        Poly::new(vec![T::one()])
    }

    /// `z^k`
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![T::zero(); k + 1];
        c[k] = T::one();
        Poly::new(c)
    }
}

impl<T: Clone + Zero> Add for &Poly<T> {
    type Output = Poly<T>;

    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Clone + Zero + Neg<Output = T>> Neg for &Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().cloned().map(Neg::neg).collect())
    }
}

impl<T: Clone + Zero + Sub<Output = T>> Sub for &Poly<T> {
    type Output = Poly<T>;

    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Clone + Zero + Mul<Output = T>> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl Poly<Complex64> {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    /// All complex roots by Durand–Kerner iteration, each polished by a few
    /// Newton steps.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = match self.degree() {
            None => return Err(Error::invalid("the zero polynomial has no isolated roots")),
            Some(0) => return Ok(Vec::new()),
            Some(n) => n,
        };
        let lead = self.coeffs[n];
        let monic = Poly::new(self.coeffs.iter().map(|c| c / lead).collect());
        let seed = Complex64::new(0.4, 0.9);
        let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
        for _ in 0..1000 {
            let mut change = 0.0f64;
            for i in 0..n {
                let zi = roots[i];
                let denom: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| zi - roots[j])
                    .product();
                let step = monic.eval(zi) / denom;
                if step.is_finite() {
                    roots[i] = zi - step;
                    change = change.max(step.norm());
                }
            }
            if change < 1e-15 {
                break;
            }
        }
        let d = monic.derivative();
        for r in &mut roots {
            for _ in 0..3 {
                let step = monic.eval(*r) / d.eval(*r);
                if step.is_finite() {
                    *r -= step;
                }
            }
        }
        Ok(roots)
    }
}

/// Largest coefficient magnitude of `p f + q g - 1`; zero exactly when the
/// identity holds (for exact coefficient types).
pub fn poly_bezout_check<T>(p: &Poly<T>, q: &Poly<T>, f: &Poly<T>, g: &Poly<T>) -> f64
where
    T: Clone + Zero + One + Sub<Output = T> + Mul<Output = T> + Magnitude,
{
    let lhs = &(p * f) + &(q * g);
    let residual = &lhs - &Poly::one();
    residual
        .coeffs()
        .iter()
        .map(Magnitude::magnitude)
        .fold(0.0, f64::max)
}

/// `(z - 1, z³)` with cofactors `(-(1 + z + z²), 1)`, exactly.
pub fn unimodular_pair_residual() -> f64 {
    let p = Poly::new(vec![rational(-1, 1), rational(-1, 1), rational(-1, 1)]);
    let q = Poly::one();
    let f = Poly::new(vec![rational(-1, 1), rational(1, 1)]);
    let g = Poly::monomial(3);
    poly_bezout_check(&p, &q, &f, &g)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducerSample {
    /// Coefficients of `h`, ascending.
    pub h: Vec<i64>,
    pub degree: usize,
    pub root_re: f64,
    pub root_im: f64,
    /// `|r - 1 + h(r) r³|`
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducerSearchReport {
    pub max_degree: usize,
    /// Degree-one coefficient of `z - 1 + h z³`, the same for every `h`
    /// because `h z³` only has terms of degree three and up.
    pub degree_one_coefficient: i64,
    pub samples_checked: usize,
    /// Sampled `h` for which the polynomial has no root.
    pub units_found: usize,
    pub max_root_residual: f64,
    pub samples: Vec<ReducerSample>,
}

/// Every `h` with coefficients in `{-1, 0, 1}` and degree at most
/// `max_degree`, in lexicographic order of coefficient vectors.
fn coefficient_grid(max_degree: usize) -> impl Iterator<Item = Vec<i64>> {
    let len = max_degree + 1;
    let total = 3usize.pow(len as u32);
    (0..total).map(move |mut k| {
        let mut c = vec![0i64; len];
        for slot in c.iter_mut().rev() {
            *slot = (k % 3) as i64 - 1;
            k /= 3;
        }
        c
    })
}

/// `z - 1 + h(z) z³` over exact rationals.
pub fn reducer_candidate(h: &[i64]) -> Poly<ExactComplex> {
    let hp = Poly::new(h.iter().map(|&c| rational(c, 1)).collect());
    let base = Poly::new(vec![rational(-1, 1), rational(1, 1)]);
    &base + &(&hp * &Poly::monomial(3))
}

/// Shows that no `h` on the sample grid turns `z - 1` into a unit: each
/// candidate has degree-one coefficient one, hence is nonconstant, and a root
/// is exhibited numerically.
pub fn polynomial_reducer_search(max_degree: usize) -> Result<ReducerSearchReport> {
    if max_degree > 8 {
        return Err(Error::invalid(format!(
            "max_degree {max_degree} exceeds the sampling limit of 8"
        )));
    }
    let mut samples = Vec::new();
    let mut units_found = 0;
    let one = rational(1, 1);
    for h in coefficient_grid(max_degree) {
        let exact = reducer_candidate(&h);
        if exact.coeff(1) != one {
            return Err(Error::invalid(format!(
                "degree-one coefficient changed for h = {h:?}"
            )));
        }
        let degree = exact.degree().unwrap_or(0);
        if degree == 0 {
            units_found += 1;
            continue;
        }
        let float = exact.map(|c| {
            Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
        });
        let (root, residual) = float
            .roots()?
            .into_iter()
            .map(|r| (r, float.eval(r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonconstant polynomial has roots");
        samples.push(ReducerSample {
            h,
            degree,
            root_re: root.re,
            root_im: root.im,
            residual,
        });
    }
    let max_root_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(ReducerSearchReport {
        max_degree,
        degree_one_coefficient: 1,
        samples_checked: samples.len() + units_found,
        units_found,
        max_root_residual,
        samples,
    })
}
