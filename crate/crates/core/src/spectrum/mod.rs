//! Exact spectra of the total Hamiltonian in the permutation-symmetric
//! (maximum total spin) sector.
//!
//! In the Dicke basis `|S = N/2, M>` the Hamiltonian
//! `-s J sum(sz) - tau N (sum(sz)/N)^4 - (1 - s) sum(sx)` is tridiagonal, so
//! sizes well beyond brute-force reach are cheap.

pub mod tridiag;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ControlPoint, ScheduleFamily};
use crate::numeric::{golden_section, linear_fit};
use tridiag::SturmSolver;

/// Gaps below this are at the double-precision noise floor and are left out
/// of scaling fits.
pub const GAP_NOISE_FLOOR: f64 = 1e-13;
/// Lower and upper margin of the `s` interval scanned for the minimum gap.
pub const S_MARGIN: f64 = 1e-3;
/// Step of the coarse minimum-gap scan.
pub const COARSE_STEP: f64 = 1e-3;
/// RSS ratio a model must beat the other by to be selected.
pub const RSS_RATIO_THRESHOLD: f64 = 2.0;

/// Real symmetric tridiagonal representation of the Hamiltonian restricted to
/// the symmetric sector. Index `k` is the Dicke state with total
/// magnetization `w_k = 2k - N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricHamiltonian {
    pub n: usize,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymmetricHamiltonian {
    pub fn solver(&self) -> Result<SturmSolver<'_>> {
        SturmSolver::new(&self.diag, &self.offdiag)
    }

    /// The full `(N + 1)`-level sector spectrum, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.solver()?.eigenvalues()
    }
}

pub fn build_hamiltonian(n: usize, control: ControlPoint, j: f64) -> Result<SymmetricHamiltonian> {
    if n < 1 {
        return Err(Error::domain("N must be >= 1"));
    }
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::domain(format!("J must be > 0, got {j}")));
    }
    let (s, tau) = (control.s(), control.tau());
    let nf = n as f64;
    let diag = (0..=n)
        .map(|k| {
            let w = 2.0 * k as f64 - nf;
            -s * j * w - tau * nf * (w / nf).powi(4)
        })
        .collect();
    // S(S+1) - M(M+1) = (N - k)(k + 1) for S = N/2, M = k - N/2.
    let offdiag = (0..n)
        .map(|k| -(1.0 - s) * (((n - k) * (k + 1)) as f64).sqrt())
        .collect();
    Ok(SymmetricHamiltonian { n, diag, offdiag })
}

/// Two lowest symmetric-sector levels at one control point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapResult {
    pub n: usize,
    pub s: f64,
    pub tau: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
}

pub fn gap_at(n: usize, control: ControlPoint, j: f64) -> Result<GapResult> {
    let h = build_hamiltonian(n, control, j)?;
    let solver = h.solver()?;
    let e0 = solver.eigenvalue(0)?;
    let e1 = solver.eigenvalue(1)?;
    Ok(GapResult {
        n,
        s: control.s(),
        tau: control.tau(),
        e0,
        e1,
        gap: (e1 - e0).max(0.0),
    })
}

/// Minimum of the gap along a trajectory `tau = s^r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinGap {
    pub n: usize,
    pub s_min: f64,
    pub gap_min: f64,
}

/// Coarse scan of `s` over `[1e-3, 1 - 1e-3]`, then golden-section refinement
/// of the bracketing triple.
///
/// The refinement runs to the limit of `f64` resolution in `s` rather than a
/// fixed `1e-8`: the avoided crossing at a first-order transition is
/// narrower than that once the gap is exponentially small.
pub fn min_gap_along_schedule(n: usize, family: ScheduleFamily, j: f64) -> Result<MinGap> {
    // validate once up front
    build_hamiltonian(n, ControlPoint::new(0.5, 0.5)?, j)?;
    let gap_of = |s: f64| -> Result<f64> { Ok(gap_at(n, family.point(s)?, j)?.gap) };

    let steps = ((1.0 - 2.0 * S_MARGIN) / COARSE_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| S_MARGIN + k as f64 * COARSE_STEP)
        .collect();
    let gaps = grid
        .par_iter()
        .map(|&s| gap_of(s))
        .collect::<Result<Vec<f64>>>()?;

    let k = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty grid");
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];

    let failure = std::cell::RefCell::new(None);
    let (s_ref, g_ref) = golden_section(
        |s| match gap_of(s) {
            Ok(g) => g,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        0.0,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let (s_min, gap_min) = if g_ref <= gaps[k] {
        (s_ref, g_ref)
    } else {
        (grid[k], gaps[k])
    };
    Ok(MinGap { n, s_min, gap_min })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapClass {
    Exponential,
    Polynomial,
    Ambiguous,
}

/// Least-squares line `ln gap = a - b x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    pub rss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub r: f64,
    pub j: f64,
    pub minima: Vec<MinGap>,
    /// Sizes whose gap fell below [`GAP_NOISE_FLOOR`] and were not fitted.
    pub excluded: Vec<usize>,
    /// `x = N`
    pub exp_fit: LogFit,
    /// `x = ln N`
    pub poly_fit: LogFit,
    pub classification: GapClass,
    pub warnings: Vec<String>,
}

impl ScalingFit {
    /// `max(rss) / min(rss)`; infinite if one fit is exact.
    pub fn rss_ratio(&self) -> f64 {
        let (a, b) = (self.exp_fit.rss, self.poly_fit.rss);
        a.max(b) / a.min(b)
    }
}

pub fn classify(exp_fit: &LogFit, poly_fit: &LogFit) -> GapClass {
    let (e, p) = (exp_fit.rss, poly_fit.rss);
    if e < p && p > RSS_RATIO_THRESHOLD * e && exp_fit.b > 0.0 {
        GapClass::Exponential
    } else if p < e && e > RSS_RATIO_THRESHOLD * p && poly_fit.b > 0.0 {
        GapClass::Polynomial
    } else {
        GapClass::Ambiguous
    }
}

/// Minimum gaps for each size in `ns` and the exponential-vs-polynomial fit
/// comparison.
pub fn gap_scaling(ns: &[usize], family: ScheduleFamily, j: f64) -> Result<ScalingFit> {
    if ns.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "gap scaling needs at least 4 sizes, got {}",
            ns.len()
        )));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] < 2 {
        return Err(Error::domain(
            "sizes must be strictly ascending and each >= 2",
        ));
    }
    let minima = ns
        .par_iter()
        .map(|&n| min_gap_along_schedule(n, family, j))
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let mut excluded = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for mg in &minima {
        if mg.gap_min < GAP_NOISE_FLOOR {
            warnings.push(format!(
                "N = {}: minimum gap {:e} below {:e}, excluded from fits",
                mg.n, mg.gap_min, GAP_NOISE_FLOOR
            ));
            excluded.push(mg.n);
        } else {
            xs.push(mg.n as f64);
            ys.push(mg.gap_min.ln());
        }
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "only {} sizes have a resolvable gap (>= {:e}); need 4",
            xs.len(),
            GAP_NOISE_FLOOR
        )));
    }
    let (a, slope, rss) = linear_fit(&xs, &ys);
    let exp_fit = LogFit { a, b: -slope, rss };
    let log_n: Vec<f64> = xs.iter().map(|n| n.ln()).collect();
    let (a, slope, rss) = linear_fit(&log_n, &ys);
    let poly_fit = LogFit { a, b: -slope, rss };

    Ok(ScalingFit {
        r: family.r(),
        j,
        minima,
        excluded,
        classification: classify(&exp_fit, &poly_fit),
        exp_fit,
        poly_fit,
        warnings,
    })
}
