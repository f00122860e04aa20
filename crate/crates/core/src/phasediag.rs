//! First-order transition lines in the `(s, tau)` control plane.
//!
//! At fixed `s` the transition is located in `tau`: a coarse scan finds
//! intervals where the global minimum of `f(m)` changes basin, and a
//! bisection that tracks both basins by nearest-`m` association narrows the
//! interval until the two minima are degenerate.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::meanfield::{Landscape, MinimaReport};
use crate::model::{ControlPoint, CouplingModel, ScheduleFamily, Temperature};
use crate::numeric::quadratic_fit;

/// Minimum magnetization jump for a transition to count as first order.
pub const JUMP_THRESHOLD: f64 = 1e-3;
/// Free-energy degeneracy required at a transition point.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;
/// `|s^r - tau*(s)|` below this without a genuine crossing is a tangency.
pub const TANGENT_TOLERANCE: f64 = 1e-4;
/// Line points used to extrapolate a numeric critical point.
pub const EXTRAPOLATION_POINTS: usize = 5;

const TAU_SCAN_INTERVALS: usize = 100;
const SCREEN_LARGEST: usize = 4;
const MAX_REFINE_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionPoint {
    pub s: f64,
    pub tau_star: f64,
    pub m_low: f64,
    pub m_high: f64,
    /// `m_high - m_low`
    pub jump: f64,
    /// `f(m_high) - f(m_low)` at `tau_star`.
    pub delta_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalMethod {
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub s_c: f64,
    pub tau_c: f64,
    pub method: CriticalMethod,
}

/// Critical point of the zero-temperature, uniform-coupling model, where the
/// first three `m`-derivatives of the free energy vanish:
///
/// ```text
/// m_c   = sqrt(2/5)
/// s_c   = 2^{5/2} / (3^{5/2} J + 2^{5/2})
/// tau_c = 5^{5/2} J / (8 (3^{5/2} J + 2^{5/2}))
/// ```
pub fn critical_point_closed_form(j: f64) -> Result<CriticalPoint> {
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::domain(format!("J must be > 0, got {j}")));
    }
    let a = 2f64.powf(2.5);
    let b = 3f64.powf(2.5);
    let denom = b * j + a;
    Ok(CriticalPoint {
        s_c: a / denom,
        tau_c: 5f64.powf(2.5) * j / (8.0 * denom),
        method: CriticalMethod::ClosedForm,
    })
}

/// Critical magnetization `m_c = sqrt(2/5)`, independent of `J`.
pub fn critical_magnetization() -> f64 {
    (0.4f64).sqrt()
}

/// The exponent `r*` whose trajectory `tau = s^r` runs through the
/// closed-form critical point.
pub fn tangent_exponent(j: f64) -> Result<f64> {
    let cp = critical_point_closed_form(j)?;
    Ok(cp.tau_c.ln() / cp.s_c.ln())
}

/// Uniform grid `start, start + step, ...` up to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SGrid {
    start: f64,
    stop: f64,
    step: f64,
}

impl SGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || start > stop {
            return Err(Error::domain(format!(
                "s grid must satisfy 0 <= s-min <= s-max <= 1, got [{start}, {stop}]"
            )));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::domain(format!("s-step must be > 0, got {step}")));
        }
        Ok(Self { start, stop, step })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> f64 {
        (self.start + k as f64 * self.step).min(1.0)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionLine {
    /// Ascending in `s`.
    pub points: Vec<TransitionPoint>,
    /// Index ranges into `points`; each is a run of consecutive grid hits.
    pub segments: Vec<Range<usize>>,
    pub critical_point: Option<CriticalPoint>,
    pub grid: SGrid,
}

impl TransitionLine {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segment_points(&self) -> impl Iterator<Item = &[TransitionPoint]> + '_ {
        self.segments.iter().map(|r| &self.points[r.clone()])
    }

    /// Segment id of each point, in point order.
    pub fn segment_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.points.len()];
        for (id, r) in self.segments.iter().enumerate() {
            for i in r.clone() {
                ids[i] = id;
            }
        }
        ids
    }

    /// Linear interpolation of `(tau*, jump)` at `s`, within a segment only.
    pub fn interpolate(&self, s: f64) -> Option<(f64, f64)> {
        for seg in self.segment_points() {
            let (first, last) = (seg.first()?, seg.last()?);
            if s < first.s || s > last.s {
                continue;
            }
            if seg.len() == 1 {
                return Some((first.tau_star, first.jump));
            }
            let i = seg.partition_point(|p| p.s <= s).clamp(1, seg.len() - 1);
            let (a, b) = (&seg[i - 1], &seg[i]);
            let t = (s - a.s) / (b.s - a.s);
            return Some((
                a.tau_star + t * (b.tau_star - a.tau_star),
                a.jump + t * (b.jump - a.jump),
            ));
        }
        None
    }
}

fn landscape_at(
    s: f64,
    tau: f64,
    temperature: Temperature,
    couplings: CouplingModel,
) -> Result<MinimaReport> {
    Ok(Landscape::new(ControlPoint::new(s, tau)?, temperature, couplings).stationary_points())
}

/// Locate the first-order transition in `tau` at fixed `s`, if any.
///
/// Returns the lowest-`tau` transition in `tau_range` whose jump exceeds
/// [`JUMP_THRESHOLD`], with the two minima degenerate to
/// [`DEGENERACY_TOLERANCE`].
pub fn find_tau_star(
    s: f64,
    temperature: Temperature,
    couplings: CouplingModel,
    tau_range: (f64, f64),
) -> Result<Option<TransitionPoint>> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::domain(format!("s must be in [0, 1], got {s}")));
    }
    let (lo, hi) = tau_range;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(Error::domain(format!(
            "tau range must satisfy 0 <= tau-min < tau-max <= 1, got [{lo}, {hi}]"
        )));
    }

    let taus: Vec<f64> = (0..=TAU_SCAN_INTERVALS)
        .map(|k| lo + (hi - lo) * k as f64 / TAU_SCAN_INTERVALS as f64)
        .collect();
    let reports = taus
        .par_iter()
        .map(|&tau| landscape_at(s, tau, temperature, couplings))
        .collect::<Result<Vec<_>>>()?;
    let global: Vec<f64> = reports.iter().map(|r| r.global_minimum().m).collect();

    let separated = |r: &MinimaReport, a: f64, b: f64| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        r.stationary
            .iter()
            .any(|p| !p.is_minimum() && p.m > a && p.m < b)
    };
    let mut by_size: Vec<usize> = (0..TAU_SCAN_INTERVALS)
        .filter(|&k| (global[k + 1] - global[k]).abs() > JUMP_THRESHOLD)
        .collect();
    let mut candidates: Vec<usize> = by_size
        .iter()
        .copied()
        .filter(|&k| {
            separated(&reports[k], global[k], global[k + 1])
                || separated(&reports[k + 1], global[k], global[k + 1])
        })
        .collect();
    by_size.sort_by(|&a, &b| {
        let da = (global[a + 1] - global[a]).abs();
        let db = (global[b + 1] - global[b]).abs();
        db.total_cmp(&da).then(a.cmp(&b))
    });
    candidates.extend(by_size.into_iter().take(SCREEN_LARGEST));
    candidates.sort_unstable();
    candidates.dedup();

    for k in candidates {
        let hit = refine_transition(
            s,
            temperature,
            couplings,
            (taus[k], global[k]),
            (taus[k + 1], global[k + 1]),
        )?;
        if hit.is_some() {
            return Ok(hit);
        }
    }
    Ok(None)
}

/// Bisection in `tau` between a point where basin A holds the global minimum
/// and one where basin B does. Each basin is tracked by the global minimum
/// last seen on its side; a change that shrinks below the jump threshold as
/// the interval narrows is continuous and rejected.
fn refine_transition(
    s: f64,
    temperature: Temperature,
    couplings: CouplingModel,
    (mut tau_a, mut m_a): (f64, f64),
    (mut tau_b, mut m_b): (f64, f64),
) -> Result<Option<TransitionPoint>> {
    for _ in 0..MAX_REFINE_STEPS {
        if (m_b - m_a).abs() < JUMP_THRESHOLD {
            return Ok(None);
        }
        let mid = 0.5 * (tau_a + tau_b);
        if mid <= tau_a || mid >= tau_b {
            break;
        }
        let report = landscape_at(s, mid, temperature, couplings)?;
        if let Some(tp) = degenerate_pair(&report, m_a, m_b) {
            return Ok((tp.jump > JUMP_THRESHOLD).then_some(tp));
        }
        let m = report.global_minimum().m;
        if (m - m_a).abs() <= (m - m_b).abs() {
            tau_a = mid;
            m_a = m;
        } else {
            tau_b = mid;
            m_b = m;
        }
    }
    // The interval has collapsed in f64; accept the best pair at either end.
    let best = [tau_a, tau_b]
        .into_iter()
        .map(|tau| landscape_at(s, tau, temperature, couplings).map(|r| pair_at(&r, m_a, m_b)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .min_by(|a, b| a.delta_f.abs().total_cmp(&b.delta_f.abs()));
    Ok(best.filter(|tp| tp.jump > JUMP_THRESHOLD && tp.delta_f.abs() < DEGENERACY_TOLERANCE))
}

/// The minima nearest `m_a` and `m_b`, when they are distinct.
fn pair_at(report: &MinimaReport, m_a: f64, m_b: f64) -> Option<TransitionPoint> {
    let a = report.nearest_minimum(m_a);
    let b = report.nearest_minimum(m_b);
    if a.m == b.m {
        return None;
    }
    let (low, high) = if a.m < b.m { (a, b) } else { (b, a) };
    Some(TransitionPoint {
        s: report.control.s(),
        tau_star: report.control.tau(),
        m_low: low.m,
        m_high: high.m,
        jump: high.m - low.m,
        delta_f: high.f - low.f,
    })
}

fn degenerate_pair(report: &MinimaReport, m_a: f64, m_b: f64) -> Option<TransitionPoint> {
    pair_at(report, m_a, m_b).filter(|tp| tp.delta_f.abs() < DEGENERACY_TOLERANCE)
}

/// Transition points over an `s` grid, grouped into unbroken segments.
///
/// Zero-temperature uniform lines carry the closed-form critical point;
/// others carry a numeric one extrapolated from the segment end where the
/// jump vanishes.
pub fn trace_line(
    temperature: Temperature,
    couplings: CouplingModel,
    grid: SGrid,
) -> Result<TransitionLine> {
    let hits = grid
        .points()
        .into_par_iter()
        .map(|s| find_tau_star(s, temperature, couplings, (0.0, 1.0)))
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::new();
    let mut segments = Vec::new();
    let mut open: Option<usize> = None;
    for hit in hits {
        match hit {
            Some(tp) => {
                open.get_or_insert(points.len());
                points.push(tp);
            }
            None => {
                if let Some(start) = open.take() {
                    segments.push(start..points.len());
                }
            }
        }
    }
    if let Some(start) = open {
        segments.push(start..points.len());
    }

    let mut line = TransitionLine {
        points,
        segments,
        critical_point: None,
        grid,
    };
    line.critical_point = if temperature.is_zero() && couplings.is_uniform() {
        Some(critical_point_closed_form(couplings.j())?)
    } else {
        numeric_critical_point(&line)
    };
    Ok(line)
}

/// Where the jump extrapolates to zero at the interior segment end with the
/// smallest jump.
///
/// Near a critical point `jump^2` is analytic in `s`, so a least-squares
/// quadratic through the last [`EXTRAPOLATION_POINTS`] values of `jump^2`
/// (and of `tau*`) is extrapolated to its zero.
pub fn numeric_critical_point(line: &TransitionLine) -> Option<CriticalPoint> {
    let half = 0.5 * line.grid.step();
    let mut ends: Vec<Vec<TransitionPoint>> = Vec::new();
    for seg in line.segment_points() {
        let (first, last) = (seg.first()?, seg.last()?);
        if first.s > line.grid.start() + half {
            ends.push(
                seg.iter()
                    .take(EXTRAPOLATION_POINTS)
                    .rev()
                    .copied()
                    .collect(),
            );
        }
        if last.s < line.grid.stop() - half {
            ends.push(seg[seg.len().saturating_sub(EXTRAPOLATION_POINTS)..].to_vec());
        }
    }
    // each `end` runs from the interior toward the terminal point
    let end = ends
        .into_iter()
        .min_by(|a, b| a.last().unwrap().jump.total_cmp(&b.last().unwrap().jump))?;
    let terminal = *end.last()?;
    let outward = if end.len() > 1 && end[0].s > terminal.s {
        -1.0
    } else {
        1.0
    };

    let (s_c, tau_c) = if end.len() >= 3 {
        let xs: Vec<f64> = end.iter().map(|p| p.s).collect();
        let j2: Vec<f64> = end.iter().map(|p| p.jump * p.jump).collect();
        let taus: Vec<f64> = end.iter().map(|p| p.tau_star).collect();
        let c = quadratic_fit(&xs, &j2, terminal.s)?;
        let u = nearest_outward_root(c, outward, line.grid.step())?;
        let t = quadratic_fit(&xs, &taus, terminal.s)?;
        (terminal.s + u, t[0] + t[1] * u + t[2] * u * u)
    } else {
        (terminal.s, terminal.tau_star)
    };
    Some(CriticalPoint {
        s_c,
        tau_c,
        method: CriticalMethod::Numeric,
    })
}

/// Root of `c0 + c1 u + c2 u^2` closest to the terminal point, preferring
/// the outward side and staying within a few grid steps of it.
fn nearest_outward_root(c: [f64; 3], outward: f64, step: f64) -> Option<f64> {
    let [c0, c1, c2] = c;
    let mut roots = Vec::new();
    if c2.abs() < 1e-300 {
        if c1 != 0.0 {
            roots.push(-c0 / c1);
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc >= 0.0 {
            let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
            roots.push(q / c2);
            if q != 0.0 {
                roots.push(c0 / q);
            }
        }
    }
    if roots.is_empty() && c1 != 0.0 {
        roots.push(-c0 / c1);
    }
    roots
        .into_iter()
        .filter(|u| u * outward > -step && u.abs() < 4.0 * step)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
}

/// `(s, jump)` along the line, ascending in `s`.
pub fn jump_profile(line: &TransitionLine) -> Vec<(f64, f64)> {
    line.points.iter().map(|p| (p.s, p.jump)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    Crosses { s: f64, tau: f64 },
    Tangent { s: f64, tau: f64, distance: f64 },
    Avoids { distance: f64 },
}

/// Compare the trajectory `tau = s^r` against the piecewise-linear line.
///
/// The critical point, when it terminates a segment, is the last vertex of
/// that segment. `Crosses` requires `s^r - tau*` to exceed
/// [`TANGENT_TOLERANCE`] on both sides; otherwise a closest approach below
/// the tolerance is a tangency.
pub fn schedule_crossing(family: ScheduleFamily, line: &TransitionLine) -> Crossing {
    const SUBDIVISIONS: usize = 16;
    let step = line.grid.step();

    // (s, tau*, segment) samples, each segment refined between vertices
    let mut samples: Vec<(f64, f64, usize)> = Vec::new();
    for (id, seg) in line.segment_points().enumerate() {
        let mut verts: Vec<(f64, f64)> = seg.iter().map(|p| (p.s, p.tau_star)).collect();
        if let Some(cp) = line.critical_point {
            let (first, last) = (verts[0], verts[verts.len() - 1]);
            if cp.s_c > last.0 && cp.s_c - last.0 <= 2.0 * step {
                verts.push((cp.s_c, cp.tau_c));
            } else if cp.s_c < first.0 && first.0 - cp.s_c <= 2.0 * step {
                verts.insert(0, (cp.s_c, cp.tau_c));
            }
        }
        samples.push((verts[0].0, verts[0].1, id));
        for w in verts.windows(2) {
            for k in 1..=SUBDIVISIONS {
                let t = k as f64 / SUBDIVISIONS as f64;
                samples.push((
                    w[0].0 + t * (w[1].0 - w[0].0),
                    w[0].1 + t * (w[1].1 - w[0].1),
                    id,
                ));
            }
        }
    }
    if samples.is_empty() {
        return Crossing::Avoids {
            distance: f64::INFINITY,
        };
    }

    let diff = |&(s, tau, _): &(f64, f64, usize)| family.tau_unchecked(s.clamp(0.0, 1.0)) - tau;
    let diffs: Vec<f64> = samples.iter().map(diff).collect();
    let max = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = diffs.iter().copied().fold(f64::INFINITY, f64::min);

    if max > TANGENT_TOLERANCE && min < -TANGENT_TOLERANCE {
        for i in 1..samples.len() {
            let (d0, d1) = (diffs[i - 1], diffs[i]);
            if d0 == 0.0 {
                return Crossing::Crosses {
                    s: samples[i - 1].0,
                    tau: samples[i - 1].1,
                };
            }
            if d0.signum() != d1.signum() {
                let (a, b) = (samples[i - 1], samples[i]);
                if a.2 != b.2 {
                    return Crossing::Crosses { s: b.0, tau: b.1 };
                }
                let t = d0 / (d0 - d1);
                return Crossing::Crosses {
                    s: a.0 + t * (b.0 - a.0),
                    tau: a.1 + t * (b.1 - a.1),
                };
            }
        }
    }

    let (i, distance) = diffs
        .iter()
        .map(|d| d.abs())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    if distance < TANGENT_TOLERANCE {
        Crossing::Tangent {
            s: samples[i].0,
            tau: samples[i].1,
            distance,
        }
    } else {
        Crossing::Avoids { distance }
    }
}
