//! Domain parameters shared by every analysis module.

use crate::error::{Error, Result};

/// Distribution of the single-qubit fields `J_i` of the mean-field problem
/// Hamiltonian.
///
/// `Uniform` puts every field at `+J`; `Bimodal` draws `+J` with weight
/// `epsilon` and `-J` with weight `1 - epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingModel {
    j: f64,
    kind: CouplingKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingKind {
    Uniform,
    Bimodal { epsilon: f64 },
}

impl CouplingModel {
    pub fn uniform(j: f64) -> Result<Self> {
        check_j(j)?;
        Ok(Self {
            j,
            kind: CouplingKind::Uniform,
        })
    }

    pub fn bimodal(j: f64, epsilon: f64) -> Result<Self> {
        check_j(j)?;
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::domain(format!(
                "epsilon must be in [0, 1], got {epsilon}"
            )));
        }
        Ok(Self {
            j,
            kind: CouplingKind::Bimodal { epsilon },
        })
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    /// Weight of the `+J` component.
    pub fn epsilon(&self) -> f64 {
        match self.kind {
            CouplingKind::Uniform => 1.0,
            CouplingKind::Bimodal { epsilon } => epsilon,
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, CouplingKind::Uniform)
    }

    /// Average `[g(J_i)]_i` over the field distribution.
    ///
    /// For `Bimodal` this is `eps * g(+J) + (1 - eps) * g(-J)`, which reduces
    /// bit-for-bit to `g(+J)` at `eps = 1`.
    pub(crate) fn average(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        match self.kind {
            CouplingKind::Uniform => g(self.j),
            CouplingKind::Bimodal { epsilon } => epsilon * g(self.j) + (1.0 - epsilon) * g(-self.j),
        }
    }
}

fn check_j(j: f64) -> Result<()> {
    if j.is_finite() && j > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("J must be > 0, got {j}")))
    }
}

/// A point `(s, tau)` of the annealing control plane `[0, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPoint {
    s: f64,
    tau: f64,
}

impl ControlPoint {
    /// Out-of-range coordinates are rejected, never clipped.
    pub fn new(s: f64, tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::domain(format!("s must be in [0, 1], got {s}")));
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::domain(format!("tau must be in [0, 1], got {tau}")));
        }
        Ok(Self { s, tau })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Transverse-field amplitude `1 - s`.
    pub fn gamma(&self) -> f64 {
        1.0 - self.s
    }
}

/// A finite, strictly positive inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Beta(f64);

impl Beta {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > 0.0 {
            Ok(Self(beta))
        } else {
            Err(Error::domain(format!(
                "beta must be > 0 (or \"inf\"), got {beta}"
            )))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Inverse temperature. `Zero` is the genuine `beta = inf` limit and selects
/// the zero-temperature formulas, not a large-beta approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Zero,
    Finite(Beta),
}

impl Temperature {
    pub fn finite(beta: f64) -> Result<Self> {
        Beta::new(beta).map(Temperature::Finite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Temperature::Zero)
    }

    /// `None` for zero temperature.
    pub fn beta(&self) -> Option<f64> {
        match self {
            Temperature::Zero => None,
            Temperature::Finite(b) => Some(b.value()),
        }
    }
}

/// Physical-qubit and constraint counts of an LHZ layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LhzCounts {
    pub logical: u64,
    pub physical: u64,
    pub constraints: u64,
}

/// Counts for `n_logical` logical qubits: one physical qubit per pair of
/// logical qubits, and `(N_l - 1)(N_l - 2)/2` four-body constraints.
pub fn lhz_counts(n_logical: u64) -> Result<LhzCounts> {
    if n_logical < 2 {
        return Err(Error::domain(format!(
            "N_l must be >= 2 (no interactions exist), got {n_logical}"
        )));
    }
    let overflow = || Error::domain(format!("N_l = {n_logical} overflows the qubit count"));
    let physical = n_logical.checked_mul(n_logical - 1).ok_or_else(overflow)? / 2;
    let constraints = (n_logical - 1)
        .checked_mul(n_logical - 2)
        .ok_or_else(overflow)?
        / 2;
    Ok(LhzCounts {
        logical: n_logical,
        physical,
        constraints,
    })
}

/// Power-law annealing trajectory `tau = s^r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleFamily {
    r: f64,
}

impl ScheduleFamily {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > 0.0 {
            Ok(Self { r })
        } else {
            Err(Error::domain(format!("r must be > 0, got {r}")))
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `s^r`, with `s` in `[0, 1]`.
    pub fn tau(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::domain(format!("s must be in [0, 1], got {s}")));
        }
        Ok(self.tau_unchecked(s))
    }

    pub(crate) fn tau_unchecked(&self, s: f64) -> f64 {
        s.powf(self.r)
    }

    /// The control point reached at `s` along this trajectory.
    pub fn point(&self, s: f64) -> Result<ControlPoint> {
        ControlPoint::new(s, self.tau(s)?)
    }
}

/// Free-function form of [`ScheduleFamily::tau`].
pub fn schedule_tau(family: ScheduleFamily, s: f64) -> Result<f64> {
    family.tau(s)
}
