//! Mean-field analysis of the LHZ quantum-annealing Hamiltonian.
//!
//! The crate is organized by the quantity being computed:
//!
//! * [`model`]: control-plane points, coupling distributions, temperatures,
//!   LHZ qubit counts and the `tau = s^r` schedule family.
//! * [`meanfield`]: the free energy per qubit `f(m)` and its self-consistent
//!   stationary points.
//! * [`phasediag`]: first-order transition lines in the `(s, tau)` plane,
//!   critical points, magnetization jumps and schedule crossings.
//! * [`spectrum`]: exact diagonalization in the permutation-symmetric sector,
//!   minimum gaps along schedules and gap-scaling fits.

pub mod error;
pub mod meanfield;
pub mod model;
pub mod phasediag;
pub mod spectrum;

mod numeric;

pub use error::{Error, Result};
pub use model::{Beta, ControlPoint, CouplingModel, LhzCounts, ScheduleFamily, Temperature};
