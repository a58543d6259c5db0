//! Lattice points of `Z^d`, shell enumeration and the shell-count bound.
//!
//! Every window scan in the crate walks shells `‖n‖₁ = r` for increasing `r`,
//! and within a shell visits points in lexicographic order of coordinates.
//! Parallel scans collect into that order before reducing, so sums and
//! "first violation" searches are reproducible regardless of thread count.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `n ∈ Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LatticeIndex(Vec<i64>);

impl LatticeIndex {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("lattice index needs at least one coordinate"));
        }
        Ok(LatticeIndex(coords))
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        LatticeIndex(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn norm1(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<i64>> for LatticeIndex {
    type Error = Error;

    fn try_from(coords: Vec<i64>) -> Result<Self> {
        LatticeIndex::new(coords)
    }
}

impl From<LatticeIndex> for Vec<i64> {
    fn from(n: LatticeIndex) -> Self {
        n.0
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Points with `‖n‖₁ = r`, in lexicographic order.
pub fn shell(dim: usize, r: u64) -> Vec<LatticeIndex> {
    assert!(dim >= 1, "dimension must be positive");
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(dim);
    push_shell(dim, r as i64, &mut prefix, &mut out);
    out
}

fn push_shell(remaining_dims: usize, rem: i64, prefix: &mut Vec<i64>, out: &mut Vec<LatticeIndex>) {
    if remaining_dims == 1 {
        if rem == 0 {
            prefix.push(0);
            out.push(LatticeIndex(prefix.clone()));
            prefix.pop();
        } else {
            for c in [-rem, rem] {
                prefix.push(c);
                out.push(LatticeIndex(prefix.clone()));
                prefix.pop();
            }
        }
        return;
    }
    for c in -rem..=rem {
        prefix.push(c);
        push_shell(remaining_dims - 1, rem - c.abs(), prefix, out);
        prefix.pop();
    }
}

/// Points with `‖n‖₁ ≤ radius`, shell by shell.
pub fn window(dim: usize, radius: u64) -> Vec<LatticeIndex> {
    (0..=radius).flat_map(|r| shell(dim, r)).collect()
}

/// Evaluates `f` over the window in parallel; the output is in window order.
pub fn map_window<T, F>(dim: usize, radius: u64, f: F) -> Result<Vec<(LatticeIndex, T)>>
where
    T: Send,
    F: Fn(&LatticeIndex) -> Result<T> + Sync,
{
    window(dim, radius)
        .into_par_iter()
        .map(|n| f(&n).map(|v| (n, v)))
        .collect()
}

/// Returns the first point of the window (in scan order) where `pred` holds.
pub fn find_first<F>(dim: usize, radius: u64, pred: F) -> Result<Option<LatticeIndex>>
where
    F: Fn(&LatticeIndex) -> Result<bool> + Sync,
{
    let points = window(dim, radius);
    let flags: Vec<bool> = points.par_iter().map(&pred).collect::<Result<_>>()?;
    Ok(flags
        .iter()
        .position(|&hit| hit)
        .map(|i| points[i].clone()))
}

/// Upper bound `2^d (1 + r)^(d-1)` on `#{n : ‖n‖₁ = r}`.
pub fn shell_count_bound(dim: usize, r: u64) -> f64 {
    let base = 2f64.powi(dim as i32) * (1.0 + r as f64).powi(dim as i32 - 1);
    base.next_up()
}

/// Largest dimension and radius covered by [`shell_bound_verified`].
pub const SHELL_CHECK_MAX_DIM: usize = 3;
pub const SHELL_CHECK_MAX_RADIUS: u64 = 50;

/// Brute-force check of [`shell_count_bound`] for `d ≤ 3`, `r ≤ 50`.
///
/// Counts every point of the box `[-50, 50]^d` by its 1-norm. Runs once per
/// process; the pairing tail bound refuses to proceed if this fails.
pub fn shell_bound_verified() -> bool {
    static VERIFIED: OnceLock<bool> = OnceLock::new();
    *VERIFIED.get_or_init(|| {
        (1..=SHELL_CHECK_MAX_DIM).all(|dim| {
            let counts = box_shell_counts(dim, SHELL_CHECK_MAX_RADIUS);
            counts
                .iter()
                .enumerate()
                .all(|(r, &c)| (c as f64) <= shell_count_bound(dim, r as u64))
        })
    })
}

fn box_shell_counts(dim: usize, radius: u64) -> Vec<u64> {
    let side = 2 * radius as i64 + 1;
    let total = (side as u64).pow(dim as u32);
    let mut counts = vec![0u64; radius as usize + 1];
    for flat in 0..total {
        let mut rest = flat as i64;
        let mut norm = 0u64;
        for _ in 0..dim {
            let c = rest % side - radius as i64;
            rest /= side;
            norm += c.unsigned_abs();
        }
        if norm <= radius {
            counts[norm as usize] += 1;
        }
    }
    counts
}
