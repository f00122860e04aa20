//! Mean-field free energy per qubit and its self-consistent stationary points.
//!
//! With the effective longitudinal field `h_i(m) = 4 tau m^3 + s J_i` and the
//! transverse amplitude `Gamma = 1 - s`, the free energy per qubit is
//!
//! ```text
//! f(m) = 3 tau m^4 - [ phi(h_i(m)) ]_i
//! phi(h) = sqrt(h^2 + Gamma^2)                          (zero temperature)
//! phi(h) = (1/beta) ln 2 cosh(beta sqrt(h^2 + Gamma^2))  (finite beta)
//! ```
//!
//! and `f'(m) = 12 tau m^2 (m - [phi'(h_i)]_i)`, so stationary points are the
//! fixed points of `m = RHS(m) = [phi'(h_i(m))]_i`.

use crate::error::{Error, Result};
use crate::model::{ControlPoint, CouplingModel, Temperature};
use crate::numeric::{log_2cosh_over_beta, polish_root, sech2};

/// Curvature below which a stationary point is flagged as degenerate.
pub const DEGENERATE_CURVATURE: f64 = 1e-8;
/// Two minima whose free energies differ by less than this are tied.
pub const TIE_TOLERANCE: f64 = 1e-10;

const BASE_GRID: usize = 2001;
const MAX_GRID: usize = 32001;

/// A point `(m, f(m))` of the free-energy landscape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapePoint {
    pub m: f64,
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint {
    pub m: f64,
    pub f: f64,
    pub kind: StationaryKind,
    /// `|f''(m)|` fell below [`DEGENERATE_CURVATURE`].
    pub degenerate: bool,
    /// `|m - RHS(m)|`.
    pub residual: f64,
}

impl StationaryPoint {
    pub fn is_minimum(&self) -> bool {
        self.kind == StationaryKind::Minimum
    }
}

/// All stationary points of `f` at one control point, ascending in `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaReport {
    pub stationary: Vec<StationaryPoint>,
    /// Index into `stationary` of the global minimum. Ties within
    /// [`TIE_TOLERANCE`] resolve to the larger `m`.
    pub global: usize,
    pub control: ControlPoint,
    pub temperature: Temperature,
    pub couplings: CouplingModel,
}

impl MinimaReport {
    pub fn global_minimum(&self) -> &StationaryPoint {
        &self.stationary[self.global]
    }

    pub fn minima(&self) -> impl Iterator<Item = &StationaryPoint> + '_ {
        self.stationary.iter().filter(|p| p.is_minimum())
    }

    /// The local minimum closest to `m`.
    pub fn nearest_minimum(&self, m: f64) -> &StationaryPoint {
        self.minima()
            .min_by(|a, b| (a.m - m).abs().total_cmp(&(b.m - m).abs()))
            .expect("a report always contains its global minimum")
    }

    /// Every minimum tied with the global one within [`TIE_TOLERANCE`].
    pub fn degenerate_global_minima(&self) -> Vec<&StationaryPoint> {
        let fg = self.global_minimum().f;
        self.minima()
            .filter(|p| p.f - fg <= TIE_TOLERANCE)
            .collect()
    }
}

/// The free-energy landscape `m -> f(m)` at fixed physical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landscape {
    control: ControlPoint,
    temperature: Temperature,
    couplings: CouplingModel,
}

impl Landscape {
    pub fn new(control: ControlPoint, temperature: Temperature, couplings: CouplingModel) -> Self {
        Self {
            control,
            temperature,
            couplings,
        }
    }

    pub fn control(&self) -> ControlPoint {
        self.control
    }

    pub fn temperature(&self) -> Temperature {
        self.temperature
    }

    pub fn couplings(&self) -> CouplingModel {
        self.couplings
    }

    pub fn free_energy(&self, m: f64) -> Result<f64> {
        check_m(m)?;
        Ok(self.f(m))
    }

    pub fn self_consistency_rhs(&self, m: f64) -> Result<f64> {
        check_m(m)?;
        Ok(self.rhs(m))
    }

    /// `f(m)` without the `|m| <= 1` check; the formula itself is defined
    /// for every real `m`.
    pub fn f(&self, m: f64) -> f64 {
        let tau = self.control.tau();
        let m2 = m * m;
        3.0 * tau * m2 * m2 - self.avg_over_fields(m, |h, g| self.phi(h, g))
    }

    pub fn rhs(&self, m: f64) -> f64 {
        self.avg_over_fields(m, |h, g| self.dphi(h, g))
    }

    /// `g(m) = m - RHS(m)`; its zeros are the stationary points.
    pub fn residual(&self, m: f64) -> f64 {
        m - self.rhs(m)
    }

    /// `g'(m) = 1 - 12 tau m^2 [phi''(h_i)]_i`.
    pub fn residual_slope(&self, m: f64) -> f64 {
        let tau = self.control.tau();
        1.0 - 12.0 * tau * m * m * self.avg_over_fields(m, |h, g| self.d2phi(h, g))
    }

    /// Analytic `f'(m) = 12 tau m^2 g(m)`.
    pub fn df(&self, m: f64) -> f64 {
        12.0 * self.control.tau() * m * m * self.residual(m)
    }

    /// Analytic `f''(m) = 24 tau m g(m) + 12 tau m^2 g'(m)`.
    pub fn d2f(&self, m: f64) -> f64 {
        let tau = self.control.tau();
        24.0 * tau * m * self.residual(m) + 12.0 * tau * m * m * self.residual_slope(m)
    }

    fn avg_over_fields(&self, m: f64, term: impl Fn(f64, f64) -> f64) -> f64 {
        let s = self.control.s();
        let molecular = 4.0 * self.control.tau() * m * m * m;
        let gamma = self.control.gamma();
        self.couplings.average(|j| term(molecular + s * j, gamma))
    }

    fn phi(&self, h: f64, gamma: f64) -> f64 {
        let r = (h * h + gamma * gamma).sqrt();
        match self.temperature {
            Temperature::Zero => r,
            Temperature::Finite(b) => log_2cosh_over_beta(r, b.value()),
        }
    }

    fn dphi(&self, h: f64, gamma: f64) -> f64 {
        match self.temperature {
            Temperature::Zero => {
                if gamma == 0.0 {
                    sign(h)
                } else {
                    h / (h * h + gamma * gamma).sqrt()
                }
            }
            Temperature::Finite(b) => {
                let beta = b.value();
                if gamma == 0.0 {
                    (beta * h).tanh()
                } else {
                    let r = (h * h + gamma * gamma).sqrt();
                    h / r * (beta * r).tanh()
                }
            }
        }
    }

    fn d2phi(&self, h: f64, gamma: f64) -> f64 {
        match self.temperature {
            Temperature::Zero => {
                if gamma == 0.0 {
                    0.0
                } else {
                    let r2 = h * h + gamma * gamma;
                    gamma * gamma / (r2 * r2.sqrt())
                }
            }
            Temperature::Finite(b) => {
                let beta = b.value();
                if gamma == 0.0 {
                    beta * sech2(beta * h)
                } else {
                    let r2 = h * h + gamma * gamma;
                    let r = r2.sqrt();
                    gamma * gamma * (beta * r).tanh() / (r2 * r)
                        + beta * h * h * sech2(beta * r) / r2
                }
            }
        }
    }

    /// Every fixed point of `m = RHS(m)` in `[-1, 1]`, classified and sorted.
    pub fn stationary_points(&self) -> MinimaReport {
        let roots = if self.temperature.is_zero() && self.control.gamma() == 0.0 {
            self.piecewise_constant_roots()
        } else {
            self.scanned_roots()
        };

        let stationary: Vec<StationaryPoint> = roots
            .into_iter()
            .map(|m| {
                let slope = self.residual_slope(m);
                StationaryPoint {
                    m,
                    f: self.f(m),
                    kind: if slope >= 0.0 {
                        StationaryKind::Minimum
                    } else {
                        StationaryKind::Maximum
                    },
                    degenerate: self.d2f(m).abs() < DEGENERATE_CURVATURE,
                    residual: self.residual(m).abs(),
                }
            })
            .collect();

        let mut global = None::<usize>;
        for (i, p) in stationary.iter().enumerate() {
            if !p.is_minimum() {
                continue;
            }
            // Ascending m, so a tie goes to the later (larger-m) point.
            if global.is_none_or(|g| p.f <= stationary[g].f + TIE_TOLERANCE) {
                global = Some(i);
            }
        }

        MinimaReport {
            global: global.expect("g(-1) <= 0 <= g(1) guarantees a minimum"),
            stationary,
            control: self.control,
            temperature: self.temperature,
            couplings: self.couplings,
        }
    }

    /// Bracket sign changes of `g` on a uniform grid over `[-1, 1]`, then
    /// polish. The grid is refined while roots crowd within two cells or a
    /// root is nearly degenerate (a sign that more roots hide in one cell).
    fn scanned_roots(&self) -> Vec<f64> {
        let mut n = BASE_GRID;
        loop {
            let cell = 2.0 / (n - 1) as f64;
            let roots = self.scan(n);
            let crowded = roots.windows(2).any(|w| w[1] - w[0] < 2.0 * cell)
                || roots
                    .iter()
                    .any(|&m| self.residual_slope(m).abs() < 1e4 * cell * cell);
            if !crowded || n >= MAX_GRID {
                return roots;
            }
            n = 2 * n - 1;
        }
    }

    fn scan(&self, n: usize) -> Vec<f64> {
        let grid = |k: usize| -1.0 + 2.0 * k as f64 / (n - 1) as f64;
        let g = |m: f64| self.residual(m);
        let dg = |m: f64| self.residual_slope(m);
        let mut roots = Vec::new();
        let mut m_prev = grid(0);
        let mut g_prev = g(m_prev);
        if g_prev == 0.0 {
            roots.push(m_prev);
        }
        for k in 1..n {
            let m = grid(k);
            let gm = g(m);
            if gm == 0.0 {
                roots.push(m);
            } else if g_prev != 0.0 && (gm < 0.0) != (g_prev < 0.0) {
                roots.push(polish_root(g, dg, m_prev, m));
            }
            m_prev = m;
            g_prev = gm;
        }
        roots
    }

    /// At zero temperature and `s = 1` the right-hand side is a weighted sum
    /// of signs and takes finitely many values; each one is a candidate.
    fn piecewise_constant_roots(&self) -> Vec<f64> {
        let signs = [-1.0, 0.0, 1.0];
        let eps = self.couplings.epsilon();
        let mut candidates: Vec<f64> = if self.couplings.is_uniform() {
            signs.to_vec()
        } else {
            signs
                .iter()
                .flat_map(|&a| signs.iter().map(move |&b| eps * a + (1.0 - eps) * b))
                .collect()
        };
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        candidates
            .into_iter()
            .filter(|&m| (-1.0..=1.0).contains(&m) && self.residual(m) == 0.0)
            .collect()
    }
}

/// `sign(0) = 0`.
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_m(m: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&m) {
        Ok(())
    } else {
        Err(Error::domain(format!("m must be in [-1, 1], got {m}")))
    }
}

pub fn free_energy(
    m: f64,
    control: ControlPoint,
    temperature: Temperature,
    couplings: CouplingModel,
) -> Result<f64> {
    Landscape::new(control, temperature, couplings).free_energy(m)
}

pub fn self_consistency_rhs(
    m: f64,
    control: ControlPoint,
    temperature: Temperature,
    couplings: CouplingModel,
) -> Result<f64> {
    Landscape::new(control, temperature, couplings).self_consistency_rhs(m)
}

pub fn find_stationary_points(
    control: ControlPoint,
    temperature: Temperature,
    couplings: CouplingModel,
) -> MinimaReport {
    Landscape::new(control, temperature, couplings).stationary_points()
}

/// `f` sampled on `points` equally spaced values of `m` over `[-1, 1]`.
pub fn landscape(
    control: ControlPoint,
    temperature: Temperature,
    couplings: CouplingModel,
    points: usize,
) -> Result<Vec<LandscapePoint>> {
    if points < 2 {
        return Err(Error::domain(format!(
            "m grid needs >= 2 points, got {points}"
        )));
    }
    let l = Landscape::new(control, temperature, couplings);
    Ok((0..points)
        .map(|k| {
            let m = -1.0 + 2.0 * k as f64 / (points - 1) as f64;
            LandscapePoint { m, f: l.f(m) }
        })
        .collect())
}
