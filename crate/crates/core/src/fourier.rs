//! Periodic distributions through their Fourier coefficients.
//!
//! A period basis is a matrix `A` whose rows are the period vectors `a_k`.
//! Frequencies live on the dual lattice `A⁻¹Z^d`, indexed by `m ∈ Z^d` via
//! `v = A⁻¹m`, so that `a_k · v = m_k`. Sampling on the grid
//! `x_j = Aᵀ(j/N)` gives `v · x_j = m · j / N`, which turns coefficient
//! extraction into a plain `d`-dimensional DFT.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeIndex;
use crate::seq::{pairing, FastSequence, GrowthCertificate, PairingResult, SlowSequence};

pub const DEFAULT_DET_TOLERANCE: f64 = 1e-9;
pub const INVERSE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PeriodBasis {
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for PeriodBasis {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        PeriodBasis::new(rows)
    }
}

impl From<PeriodBasis> for Vec<Vec<f64>> {
    fn from(p: PeriodBasis) -> Self {
        p.rows()
    }
}

impl PeriodBasis {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        PeriodBasis::with_tolerance(rows, DEFAULT_DET_TOLERANCE)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let id = DMatrix::identity(dim, dim);
        Ok(PeriodBasis {
            a: id.clone(),
            a_inv: id,
        })
    }

    /// Rejects `|det A| ≤ det_tolerance` and inverses that miss the identity
    /// by more than `1e-12` in some entry.
    pub fn with_tolerance(rows: Vec<Vec<f64>>, det_tolerance: f64) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::invalid("period basis must have at least one row"));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid("period basis entries must be finite"));
        }
        let a = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        let det = a.determinant();
        if !(det.abs() > det_tolerance) {
            return Err(Error::SingularBasis { det });
        }
        let x = a.clone().try_inverse().ok_or(Error::SingularBasis { det })?;
        // one Newton step: X ← X (2I - A X)
        let id = DMatrix::<f64>::identity(d, d);
        let a_inv = &x * (&id * 2.0 - &a * &x);
        let err = (&a * &a_inv - &id).abs().max();
        if err > INVERSE_TOLERANCE {
            return Err(Error::invalid(format!(
                "period basis too ill-conditioned: A·A⁻¹ misses the identity by {err:e}"
            )));
        }
        Ok(PeriodBasis { a, a_inv })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.a.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn inverse_rows(&self) -> Vec<Vec<f64>> {
        self.a_inv.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// The period vector `a_k`.
    pub fn period(&self, k: usize) -> Vec<f64> {
        self.a.row(k).iter().copied().collect()
    }

    pub fn determinant(&self) -> f64 {
        self.a.determinant()
    }

    fn check_vec(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// `v = A⁻¹m`
    pub fn dual_point(&self, m: &LatticeIndex) -> Result<Vec<f64>> {
        m.check_dim(self.dim())?;
        let mv = DVector::from_iterator(self.dim(), m.coords().iter().map(|&c| c as f64));
        Ok((&self.a_inv * mv).iter().copied().collect())
    }

    /// Coordinates of `x` in the period basis, `y = A⁻ᵀx`, so that
    /// `v · x = m · y` and `x + a_k` maps to `y + e_k`.
    pub fn period_coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vec(x.len())?;
        let xv = DVector::from_column_slice(x);
        Ok((self.a_inv.transpose() * xv).iter().copied().collect())
    }

    /// Grid point `x_j = Aᵀ(j / N)`.
    pub fn sample_point(&self, j: &[usize], n: usize) -> Result<Vec<f64>> {
        self.check_vec(j.len())?;
        let jv = DVector::from_iterator(j.len(), j.iter().map(|&c| c as f64 / n as f64));
        Ok((self.a.transpose() * jv).iter().copied().collect())
    }
}

/// Storage of a coefficient map: finitely many stored values, or a lazily
/// evaluated sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Sparse(BTreeMap<LatticeIndex, Complex64>),
    Sequence(SlowSequence),
}

/// Fourier coefficients `α(m)` of a periodic distribution, indexed by `m`
/// for the frequency `A⁻¹m`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMap {
    dim: usize,
    coeffs: Coefficients,
    growth: GrowthCertificate,
}

impl CoefficientMap {
    pub fn sparse(dim: usize, coeffs: BTreeMap<LatticeIndex, Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let mut m = 0.0f64;
        for (idx, c) in &coeffs {
            idx.check_dim(dim)?;
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::invalid(format!("coefficient at {idx} is not finite")));
            }
            m = m.max(c.norm());
        }
        Ok(CoefficientMap {
            dim,
            coeffs: Coefficients::Sparse(coeffs),
            growth: GrowthCertificate::new(m, 0)?,
        })
    }

    pub fn from_sequence(seq: SlowSequence) -> Self {
        CoefficientMap {
            dim: seq.dim(),
            growth: seq.cert(),
            coeffs: Coefficients::Sequence(seq),
        }
    }

    /// All coefficients equal to one: the identity for pointwise products.
    pub fn dirac_comb(dim: usize) -> Result<Self> {
        Ok(CoefficientMap::from_sequence(SlowSequence::one(dim)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn growth(&self) -> GrowthCertificate {
        self.growth
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn is_finitely_supported(&self) -> bool {
        matches!(self.coeffs, Coefficients::Sparse(_))
    }

    pub fn get(&self, m: &LatticeIndex) -> Result<Complex64> {
        m.check_dim(self.dim)?;
        match &self.coeffs {
            Coefficients::Sparse(map) => Ok(map.get(m).copied().unwrap_or_default()),
            Coefficients::Sequence(s) => s.eval(m),
        }
    }

    /// Pointwise product of coefficients, i.e. convolution of the
    /// distributions.
    pub fn product(&self, other: &CoefficientMap) -> Result<CoefficientMap> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        match (&self.coeffs, &other.coeffs) {
            (Coefficients::Sequence(a), Coefficients::Sequence(b)) => {
                Ok(CoefficientMap::from_sequence(a.times(b)?))
            }
            (Coefficients::Sparse(map), _) => self.sparse_product(map, other),
            (_, Coefficients::Sparse(map)) => other.sparse_product(map, self),
        }
    }

    fn sparse_product(
        &self,
        map: &BTreeMap<LatticeIndex, Complex64>,
        other: &CoefficientMap,
    ) -> Result<CoefficientMap> {
        let out = map
            .iter()
            .map(|(m, c)| Ok((m.clone(), c * other.get(m)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        CoefficientMap::sparse(self.dim, out)
    }

    /// The coefficients as a lattice sequence.
    pub fn to_sequence(&self) -> Result<SlowSequence> {
        match &self.coeffs {
            Coefficients::Sequence(s) => Ok(s.clone()),
            Coefficients::Sparse(map) => {
                SlowSequence::points(
                    self.dim,
                    Complex64::new(0.0, 0.0),
                    map.iter().map(|(m, c)| (m.clone(), *c)),
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleMetadata {
    pub n: usize,
    /// `"forward 1/N^d"`
    pub normalization: String,
    /// Inclusive per-axis index range of the extracted coefficients.
    pub window: (i64, i64),
    /// True when the outermost band of the window carries non-negligible
    /// energy, so higher frequencies may have folded in.
    pub aliasing_suspected: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledCoefficients {
    pub coefficients: CoefficientMap,
    pub metadata: SampleMetadata,
}

/// Centered coefficient range `[-⌊N/2⌋, ⌈N/2⌉ - 1]`.
pub fn centered_window(n: usize) -> (i64, i64) {
    let n = n as i64;
    (-(n / 2), (n + 1) / 2 - 1)
}

/// Row-major multi-indices of `{0, …, N-1}^d`.
fn grid_indices(dim: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(dim as u32);
    (0..total).map(move |mut flat| {
        let mut j = vec![0; dim];
        for slot in j.iter_mut().rev() {
            *slot = flat % n;
            flat /= n;
        }
        j
    })
}

/// `α(m) = N^{-d} Σ_j f(x_j) e^{-2πi m·j/N}` on the centered window. Samples
/// are row-major over `j ∈ {0, …, N-1}^d`, first axis slowest.
pub fn coeffs_from_samples(
    basis: &PeriodBasis,
    n: usize,
    samples: &[Complex64],
) -> Result<SampledCoefficients> {
    let dim = basis.dim();
    if n == 0 {
        return Err(Error::invalid("grid size N must be at least 1"));
    }
    let expected = n
        .checked_pow(dim as u32)
        .ok_or_else(|| Error::invalid("sample grid too large"))?;
    if samples.len() != expected {
        return Err(Error::SampleCount {
            expected,
            got: samples.len(),
        });
    }
    let mut data = samples.to_vec();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut line = vec![Complex64::default(); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        for start in 0..expected {
            // first element of each line along `axis`
            if (start / stride) % n != 0 {
                continue;
            }
            for (t, slot) in line.iter_mut().enumerate() {
                *slot = data[start + t * stride];
            }
            fft.process(&mut line);
            for (t, v) in line.iter().enumerate() {
                data[start + t * stride] = *v;
            }
        }
    }
    let scale = 1.0 / expected as f64;
    let (lo, hi) = centered_window(n);
    let mut coeffs = BTreeMap::new();
    for bins in grid_indices(dim, n) {
        let flat = bins.iter().fold(0, |acc, &b| acc * n + b);
        let m: Vec<i64> = bins
            .iter()
            .map(|&b| if b as i64 > hi { b as i64 - n as i64 } else { b as i64 })
            .collect();
        coeffs.insert(LatticeIndex::new(m)?, data[flat] * scale);
    }
    let peak = coeffs.values().map(|c| c.norm()).fold(0.0, f64::max);
    let edge = if n >= 2 { lo } else { i64::MIN };
    let aliasing_suspected = coeffs.iter().any(|(m, c)| {
        m.coords().iter().any(|&x| x == edge) && c.norm() > 1e-12 * peak.max(f64::MIN_POSITIVE)
    });
    Ok(SampledCoefficients {
        coefficients: CoefficientMap::sparse(dim, coeffs)?,
        metadata: SampleMetadata {
            n,
            normalization: "forward 1/N^d".to_string(),
            window: (lo, hi),
            aliasing_suspected,
        },
    })
}

/// `Σ_m α(m) e^{2πi (A⁻¹m)·x}` for a finitely supported map.
pub fn synthesize(basis: &PeriodBasis, c: &CoefficientMap, x: &[f64]) -> Result<Complex64> {
    if c.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: c.dim(),
        });
    }
    let Coefficients::Sparse(map) = c.coefficients() else {
        return Err(Error::InfiniteSupport);
    };
    let y = basis.period_coordinates(x)?;
    Ok(map
        .iter()
        .map(|(m, a)| {
            let t: f64 = m.coords().iter().zip(&y).map(|(&mi, yi)| mi as f64 * yi).sum();
            a * Complex64::from_polar(1.0, TAU * (t - t.round()))
        })
        .sum())
}

/// Synthesised values on the sampling grid, row-major.
pub fn synthesize_grid(basis: &PeriodBasis, c: &CoefficientMap, n: usize) -> Result<Vec<Complex64>> {
    grid_indices(basis.dim(), n)
        .map(|j| synthesize(basis, c, &basis.sample_point(&j, n)?))
        .collect()
}

/// `⟨T, ψ⟩ = Σ_m α(m) ψ(A⁻¹m)`, with `test_values(m) = ψ(A⁻¹m)`.
pub fn distribution_action(
    c: &CoefficientMap,
    test_values: &FastSequence,
    radius: u64,
) -> Result<PairingResult> {
    pairing(&c.to_sequence()?, test_values, radius)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::LN_2;

    use super::*;

    fn idx(c: &[i64]) -> LatticeIndex {
        LatticeIndex::new(c.to_vec()).unwrap()
    }

    fn sample_1d(n: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..n).map(|j| f(j as f64 / n as f64)).collect()
    }

    #[test]
    fn dual_points() {
        let id = PeriodBasis::identity(2).unwrap();
        assert_eq!(id.dual_point(&idx(&[3, -2])).unwrap(), vec![3.0, -2.0]);
        let two = PeriodBasis::new(vec![vec![2.0]]).unwrap();
        assert_eq!(two.dual_point(&idx(&[1])).unwrap(), vec![0.5]);
        let shear = PeriodBasis::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(shear.dual_point(&idx(&[0, 1])).unwrap(), vec![0.0, 1.0]);
        assert_eq!(shear.dual_point(&idx(&[1, 0])).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn rejects_bad_bases() {
        assert!(matches!(
            PeriodBasis::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(Error::SingularBasis { .. })
        ));
        assert!(PeriodBasis::new(vec![vec![1.0, 2.0]]).is_err());
        assert!(PeriodBasis::new(vec![]).is_err());
        assert!(PeriodBasis::new(vec![vec![f64::NAN]]).is_err());
    }

    #[test]
    fn constant_samples() {
        let p = PeriodBasis::identity(2).unwrap();
        for n in [1, 4, 5] {
            let s = vec![Complex64::new(1.0, 0.0); n * n];
            let c = coeffs_from_samples(&p, n, &s).unwrap();
            let zero = LatticeIndex::zero(2);
            for (m, v) in match c.coefficients.coefficients() {
                Coefficients::Sparse(map) => map.clone(),
                _ => unreachable!(),
            } {
                let expected = if m == zero { 1.0 } else { 0.0 };
                assert!((v - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn pure_tone_and_cosine() {
        let p = PeriodBasis::identity(1).unwrap();
        let tone = sample_1d(8, |x| Complex64::from_polar(1.0, TAU * x));
        let c = coeffs_from_samples(&p, 8, &tone).unwrap().coefficients;
        for m in -4..=3 {
            let v = c.get(&idx(&[m])).unwrap();
            let expected = if m == 1 { 1.0 } else { 0.0 };
            assert!((v - expected).norm() <= 1e-12, "{m}: {v}");
        }
        let cosine = sample_1d(8, |x| Complex64::new((TAU * x).cos(), 0.0));
        let c = coeffs_from_samples(&p, 8, &cosine).unwrap().coefficients;
        for m in [-1, 1] {
            assert!((c.get(&idx(&[m])).unwrap() - 0.5).norm() <= 1e-12);
        }
        assert!(coeffs_from_samples(&p, 8, &cosine[..7]).is_err());
    }

    /// Direct evaluation of the DFT sum, independent of the FFT path.
    fn naive_coeff(n: usize, samples: &[Complex64], m: &[i64]) -> Complex64 {
        let d = m.len();
        let mut acc = Complex64::default();
        for (flat, s) in samples.iter().enumerate() {
            let mut rest = flat;
            let mut phase = 0.0;
            for axis in (0..d).rev() {
                let j = rest % n;
                rest /= n;
                phase += (m[axis] * j as i64) as f64 / n as f64;
            }
            acc += s * Complex64::from_polar(1.0, -TAU * phase);
        }
        acc / samples.len() as f64
    }

    #[test]
    fn fft_matches_direct_sum() {
        let p = PeriodBasis::new(vec![vec![1.0, 0.3], vec![-0.2, 0.8]]).unwrap();
        let n = 5;
        let samples: Vec<Complex64> = (0..n * n)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let c = coeffs_from_samples(&p, n, &samples).unwrap();
        assert_eq!(c.metadata.window, (-2, 2));
        for m0 in -2..=2 {
            for m1 in -2..=2 {
                let got = c.coefficients.get(&idx(&[m0, m1])).unwrap();
                assert!((got - naive_coeff(n, &samples, &[m0, m1])).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn synthesis_examples() {
        let p = PeriodBasis::identity(1).unwrap();
        let one = CoefficientMap::sparse(1, BTreeMap::from([(idx(&[0]), Complex64::new(1.0, 0.0))])).unwrap();
        for x in [-3.2, 0.0, 0.7] {
            assert_eq!(synthesize(&p, &one, &[x]).unwrap(), Complex64::new(1.0, 0.0));
        }
        let tone = CoefficientMap::sparse(1, BTreeMap::from([(idx(&[1]), Complex64::new(1.0, 0.0))])).unwrap();
        let v = synthesize(&p, &tone, &[0.25]).unwrap();
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let comb = CoefficientMap::dirac_comb(1).unwrap();
        assert_eq!(synthesize(&p, &comb, &[0.1]), Err(Error::InfiniteSupport));
    }

    #[test]
    fn roundtrip_on_sheared_basis() {
        let p = PeriodBasis::new(vec![vec![2.0, 0.5], vec![0.0, 1.5]]).unwrap();
        let coeffs: BTreeMap<_, _> = [([1, -2], (0.5, 0.25)), ([0, 3], (-1.0, 0.0)), ([-3, 0], (0.0, 2.0))]
            .into_iter()
            .map(|(m, (re, im))| (idx(&m), Complex64::new(re, im)))
            .collect();
        let c = CoefficientMap::sparse(2, coeffs.clone()).unwrap();
        let n = 8;
        let samples = synthesize_grid(&p, &c, n).unwrap();
        let back = coeffs_from_samples(&p, n, &samples).unwrap().coefficients;
        for (m, v) in &coeffs {
            assert!((back.get(m).unwrap() - v).norm() < 1e-12);
        }
        let again = synthesize_grid(&p, &back, n).unwrap();
        for (a, b) in samples.iter().zip(&again) {
            assert!((a - b).norm() < 1e-12);
        }
        let x = [0.3, -1.1];
        let f = synthesize(&p, &c, &x).unwrap();
        for k in 0..2 {
            let a = p.period(k);
            let shifted = [x[0] + a[0], x[1] + a[1]];
            assert!((synthesize(&p, &c, &shifted).unwrap() - f).norm() < 1e-10);
        }
    }

    #[test]
    fn dirac_comb_is_identity() {
        let comb = CoefficientMap::dirac_comb(2).unwrap();
        let c = CoefficientMap::sparse(2, BTreeMap::from([(idx(&[1, 1]), Complex64::new(0.0, -3.0))])).unwrap();
        assert_eq!(c.product(&comb).unwrap(), c);
        assert_eq!(comb.product(&c).unwrap(), c);
        let n = CoefficientMap::from_sequence(SlowSequence::coord(2, 0).unwrap());
        let nn = n.product(&comb).unwrap();
        assert_eq!(nn.get(&idx(&[-4, 2])).unwrap(), Complex64::new(-4.0, 0.0));
    }

    #[test]
    fn action_examples() {
        let comb = CoefficientMap::dirac_comb(1).unwrap();
        let point = FastSequence::from_slow(SlowSequence::indicator(&idx(&[0])).unwrap()).unwrap();
        assert_eq!(distribution_action(&comb, &point, 5).unwrap().value, Complex64::new(1.0, 0.0));

        let two = CoefficientMap::sparse(1, BTreeMap::from([(idx(&[0]), Complex64::new(2.0, 0.0))])).unwrap();
        let three = FastSequence::from_slow(SlowSequence::indicator(&idx(&[0])).unwrap().times(&SlowSequence::real(1, 3.0).unwrap()).unwrap()).unwrap();
        assert_eq!(distribution_action(&two, &three, 0).unwrap().value, Complex64::new(6.0, 0.0));

        let halving = FastSequence::from_slow(SlowSequence::expdecay(1, LN_2).unwrap()).unwrap();
        let p = distribution_action(&comb, &halving, 30).unwrap();
        assert!((p.value.re - 3.0).abs() <= p.tail_bound);
        assert!(p.tail_bound < 1e-6);
    }

    #[test]
    fn centered_windows() {
        assert_eq!(centered_window(8), (-4, 3));
        assert_eq!(centered_window(7), (-3, 3));
        assert_eq!(centered_window(1), (0, 0));
    }
}
