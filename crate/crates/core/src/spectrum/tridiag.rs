//! Eigenvalues of real symmetric tridiagonal matrices by Sturm-sequence
//! bisection.
//!
//! The `k`-th eigenvalue is isolated independently of the others, so asking
//! for the two lowest costs `O(n)` per bisection step regardless of `n`.

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 400;

/// Number of eigenvalues strictly below `x`.
///
/// Counts negative pivots of the `LDL^T` factorization of `T - x I`; pivots
/// that underflow are replaced by `-pivmin`.
pub fn sturm_count(diag: &[f64], off_sq: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off_sq[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// A validated symmetric tridiagonal matrix with precomputed squared
/// off-diagonal, Gershgorin interval and pivot guard.
#[derive(Debug, Clone)]
pub struct SturmSolver<'a> {
    diag: &'a [f64],
    off_sq: Vec<f64>,
    lower: f64,
    upper: f64,
    pivmin: f64,
    abs_tol: f64,
    /// Diagonal entries decoupled from both neighbours; each is an exact
    /// eigenvalue.
    isolated: Vec<f64>,
}

impl<'a> SturmSolver<'a> {
    pub fn new(diag: &'a [f64], offdiag: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || offdiag.len() + 1 != n {
            return Err(Error::domain(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                n,
                offdiag.len()
            )));
        }
        if diag.iter().chain(offdiag).any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence(
                "matrix contains non-finite entries".into(),
            ));
        }
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        let mut scale = 0.0f64;
        for i in 0..n {
            let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
            lower = lower.min(diag[i] - left - right);
            upper = upper.max(diag[i] + left + right);
            scale = scale.max(diag[i].abs()).max(left);
        }
        let off_sq: Vec<f64> = offdiag.iter().map(|e| e * e).collect();
        let isolated = (0..n)
            .filter(|&i| (i == 0 || offdiag[i - 1] == 0.0) && (i + 1 == n || offdiag[i] == 0.0))
            .map(|i| diag[i])
            .collect();
        let max_off_sq = off_sq.iter().copied().fold(1.0, f64::max);
        let scale = scale.max(f64::MIN_POSITIVE);
        // Widen so the interval strictly contains the spectrum.
        let pad = 2.0 * f64::EPSILON * scale * n as f64 + f64::MIN_POSITIVE;
        Ok(Self {
            diag,
            off_sq,
            lower: lower - pad,
            upper: upper + pad,
            pivmin: f64::MIN_POSITIVE * max_off_sq,
            abs_tol: f64::EPSILON * scale,
            isolated,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn count_below(&self, x: f64) -> usize {
        sturm_count(self.diag, &self.off_sq, x, self.pivmin)
    }

    /// The `k`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.dim() {
            return Err(Error::domain(format!(
                "eigenvalue index {k} out of range for dimension {}",
                self.dim()
            )));
        }
        // Invariant: count_below(lo) <= k < count_below(hi).
        let mut lo = self.lower;
        let mut hi = self.upper;
        for _ in 0..MAX_BISECTIONS {
            let width = hi - lo;
            if width <= self.abs_tol + 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                return Ok(self.snap(lo, hi));
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(self.snap(lo, hi));
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NoConvergence(format!(
            "eigenvalue {k} not isolated after {MAX_BISECTIONS} bisections (bracket [{lo}, {hi}])"
        )))
    }

    fn snap(&self, lo: f64, hi: f64) -> f64 {
        self.isolated
            .iter()
            .copied()
            .find(|d| (lo..=hi).contains(d))
            .unwrap_or(0.5 * (lo + hi))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        (0..self.dim()).map(|k| self.eigenvalue(k)).collect()
    }
}
