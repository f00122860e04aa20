use lhz_core::meanfield::{find_stationary_points, Landscape};
use lhz_core::{ControlPoint, CouplingModel, Temperature};
use proptest::prelude::*;

fn grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |k| -1.0 + 2.0 * k as f64 / (points - 1) as f64)
}

fn cp(s: f64, tau: f64) -> ControlPoint {
    ControlPoint::new(s, tau).unwrap()
}

#[test]
fn half_filled_bimodal_is_even() {
    let half = CouplingModel::bimodal(0.5, 0.5).unwrap();
    for temp in [Temperature::Zero, Temperature::finite(3.0).unwrap()] {
        for s in [0.0, 0.2, 0.5, 0.9, 1.0] {
            for tau in [0.0, 0.3, 1.0] {
                let l = Landscape::new(cp(s, tau), temp, half);
                for m in grid(201) {
                    assert!((l.f(m) - l.f(-m)).abs() <= 1e-14, "s={s} tau={tau} m={m}");
                }
            }
        }
    }
}

#[test]
fn saturated_bimodal_is_uniform() {
    let uni = CouplingModel::uniform(0.5).unwrap();
    let sat = CouplingModel::bimodal(0.5, 1.0).unwrap();
    for temp in [Temperature::Zero, Temperature::finite(2.0).unwrap()] {
        for (s, tau) in [(0.1, 0.9), (0.42, 0.26), (0.8, 0.5)] {
            let a = Landscape::new(cp(s, tau), temp, uni);
            let b = Landscape::new(cp(s, tau), temp, sat);
            for m in grid(101) {
                assert!((a.f(m) - b.f(m)).abs() <= 1e-14);
                assert!((a.rhs(m) - b.rhs(m)).abs() <= 1e-14);
            }
        }
    }
}

#[test]
fn reported_minima_are_self_consistent_on_a_grid() {
    for couplings in [
        CouplingModel::uniform(0.5).unwrap(),
        CouplingModel::bimodal(0.5, 0.8).unwrap(),
    ] {
        for i in 0..=20 {
            for k in 0..=20 {
                let (s, tau) = (i as f64 / 20.0, k as f64 / 20.0);
                let report = find_stationary_points(cp(s, tau), Temperature::Zero, couplings);
                for p in report.minima() {
                    assert!(p.residual.abs() < 1e-10, "s={s} tau={tau} m={}", p.m);
                }
            }
        }
    }
}

#[test]
fn global_minimum_beats_every_grid_point() {
    let couplings = CouplingModel::uniform(0.5).unwrap();
    for i in 0..=10 {
        for k in 0..=10 {
            let (s, tau) = (i as f64 / 10.0, k as f64 / 10.0);
            let report = find_stationary_points(cp(s, tau), Temperature::Zero, couplings);
            let l = Landscape::new(cp(s, tau), Temperature::Zero, couplings);
            let best = grid(2001).map(|m| l.f(m)).fold(f64::INFINITY, f64::min);
            assert!(report.global_minimum().f <= best + 1e-12, "s={s} tau={tau}");
        }
    }
}

#[test]
fn large_beta_approaches_zero_temperature() {
    let couplings = CouplingModel::uniform(0.5).unwrap();
    let vals = [0.0, 0.25, 0.5, 0.75, 1.0];
    for s in vals {
        for tau in vals {
            let zero = Landscape::new(cp(s, tau), Temperature::Zero, couplings);
            let warm = Landscape::new(cp(s, tau), Temperature::finite(1e3).unwrap(), couplings);
            for m in grid(201) {
                assert!(
                    (zero.f(m) - warm.f(m)).abs() < 1e-3,
                    "s={s} tau={tau} m={m}"
                );
            }
        }
    }
}

#[test]
fn stationary_points_have_vanishing_slope() {
    let couplings = CouplingModel::bimodal(0.5, 0.8).unwrap();
    for temp in [Temperature::Zero, Temperature::finite(2.0).unwrap()] {
        for (s, tau) in [(0.3, 0.5), (0.6, 0.25), (0.45, 0.9)] {
            let l = Landscape::new(cp(s, tau), temp, couplings);
            let h = 1e-6;
            for p in find_stationary_points(cp(s, tau), temp, couplings).stationary {
                if p.m.abs() > 1.0 - h {
                    continue;
                }
                let slope = (l.f(p.m + h) - l.f(p.m - h)) / (2.0 * h);
                assert!(slope.abs() < 1e-4, "s={s} tau={tau} m={}: {slope}", p.m);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minima_and_maxima_alternate(s in 0.0f64..=1.0, tau in 0.0f64..=1.0, eps in 0.0f64..=1.0) {
        let couplings = CouplingModel::bimodal(0.5, eps).unwrap();
        let report = find_stationary_points(cp(s, tau), Temperature::Zero, couplings);
        prop_assert!(!report.stationary.is_empty());
        prop_assert!(report.global_minimum().is_minimum());
        let min_f = report.minima().map(|p| p.f).fold(f64::INFINITY, f64::min);
        prop_assert!(report.global_minimum().f <= min_f + 1e-10);
        for w in report.stationary.windows(2) {
            prop_assert!(w[0].m < w[1].m);
        }
    }

    #[test]
    fn free_energy_is_bounded_below_by_field_energy(
        s in 0.0f64..=1.0, tau in 0.0f64..=1.0, m in -1.0f64..=1.0, beta in 0.1f64..50.0
    ) {
        // f >= 3 tau m^4 - R_max - ln2 / beta with R_max over the bounded fields
        let couplings = CouplingModel::uniform(0.5).unwrap();
        let l = Landscape::new(cp(s, tau), Temperature::finite(beta).unwrap(), couplings);
        let r_max = ((4.0 * tau + 0.5 * s).powi(2) + (1.0 - s).powi(2)).sqrt();
        prop_assert!(l.f(m).is_finite());
        prop_assert!(l.f(m) >= 3.0 * tau * m.powi(4) - r_max - 2f64.ln() / beta - 1e-12);
    }
}
