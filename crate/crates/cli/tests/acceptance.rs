//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use lhz_cli::commands::render;
use lhz_cli::parse_args;
use lhz_core::meanfield::{find_stationary_points, Landscape};
use lhz_core::phasediag::{
    critical_point_closed_form, jump_profile, numeric_critical_point, schedule_crossing,
    tangent_exponent, trace_line, Crossing, SGrid,
};
use lhz_core::spectrum::{build_hamiltonian, gap_at, gap_scaling, GapClass};
use lhz_core::{ControlPoint, CouplingModel, ScheduleFamily, Temperature};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run_cli(args: &[&str]) -> serde_json::Value {
    let cfg = parse_args(std::iter::once("lhz").chain(args.iter().copied())).expect("valid args");
    let out = render(&cfg).expect("command succeeds");
    serde_json::from_str(&out[0].content).expect("json output")
}

fn standard_grid() -> SGrid {
    SGrid::new(0.01, 0.99, 0.002).unwrap()
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (
        e < limit,
        format!("{:.2}s < {}s", e.as_secs_f64(), limit.as_secs()),
    )
}

/// Closed-form critical point from `critical-point --J 0.5`.
fn criterion_1() -> Outcome {
    let t = Instant::now();
    let j: f64 = 0.5;
    let v = run_cli(&["critical-point", "--J", "0.5"]);
    let (s_c, tau_c) = (v["s_c"].as_f64().unwrap(), v["tau_c"].as_f64().unwrap());
    let (a, b) = (3f64.powf(2.5), 2f64.powf(2.5));
    let s_formula = b / (a * j + b);
    let tau_formula = j / 2f64.sqrt() * (a - b) / (a * j + b);
    let ds = (s_c - s_formula).abs();
    let dtau = (tau_c - tau_formula).abs();
    let formula_ok = ds < 1e-12 && dtau < 1e-12;

    // zero-temperature uniform free energy, written out independently
    let f = |m: f64| {
        3.0 * tau_c * m.powi(4)
            - ((4.0 * tau_c * m.powi(3) + s_c * j).powi(2) + (1.0 - s_c).powi(2)).sqrt()
    };
    let report = find_stationary_points(
        ControlPoint::new(s_c, tau_c).unwrap(),
        Temperature::Zero,
        CouplingModel::uniform(j).unwrap(),
    );
    let m = report.global_minimum().m;
    // fourth-order central differences
    let h = 1e-3;
    let at = |k: f64| f(m + k * h);
    let d1 = (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h);
    let d2 =
        (-at(-2.0) + 16.0 * at(-1.0) - 30.0 * at(0.0) + 16.0 * at(1.0) - at(2.0)) / (12.0 * h * h);
    let d3 = (-at(3.0) + 8.0 * at(2.0) - 13.0 * at(1.0) + 13.0 * at(-1.0) - 8.0 * at(-2.0)
        + at(-3.0))
        / (8.0 * h.powi(3));
    let deriv_ok = d1.abs() < 1e-4 && d2.abs() < 1e-4 && d3.abs() < 1e-4;
    let (time_ok, time) = within(t, Duration::from_secs(1));
    check(
        formula_ok && deriv_ok && time_ok,
        format!(
            "(s_c, tau_c) = ({s_c:.9}, {tau_c:.9}); printed closed form |ds| = {ds:.1e}, |dtau| = {dtau:.1e} (tol 1e-12) {}; \
             at m = {m:.6}: f' = {d1:.1e}, f'' = {d2:.1e}, f''' = {d3:.1e} (tol 1e-4) {}; {time}",
            ok(formula_ok),
            ok(deriv_ok)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "VIOLATED"
    }
}

/// Numeric jump -> 0 endpoint against the closed form.
fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for j in [0.1, 0.5, 1.0] {
        let t = Instant::now();
        let line = trace_line(
            Temperature::Zero,
            CouplingModel::uniform(j).unwrap(),
            standard_grid(),
        )
        .unwrap();
        let num = numeric_critical_point(&line);
        let cp = critical_point_closed_form(j).unwrap();
        let (time_ok, time) = within(t, Duration::from_secs(60));
        match num {
            Some(num) => {
                let (ds, dt) = ((num.s_c - cp.s_c).abs(), (num.tau_c - cp.tau_c).abs());
                pass &= ds < 1e-4 && dt < 1e-4 && time_ok;
                parts.push(format!("J={j}: |ds|={ds:.1e} |dtau|={dt:.1e} {time}"));
            }
            None => {
                pass = false;
                parts.push(format!("J={j}: no numeric critical point"));
            }
        }
    }
    check(pass, parts.join("; "))
}

/// Tangency exponent and schedule crossings.
fn criterion_3() -> Outcome {
    let t = Instant::now();
    let r = tangent_exponent(0.5).unwrap();
    let in_range = (1.54..=1.57).contains(&r);
    let r1 = run_cli(&["schedule-check", "--J", "0.5", "--r", "1"]);
    let r2 = run_cli(&["schedule-check", "--J", "0.5", "--r", "2"]);
    let (time_ok, time) = within(t, Duration::from_secs(60));
    check(
        in_range && r1["result"] == "crosses" && r2["result"] == "avoids" && time_ok,
        format!(
            "r* = {r:.5} in [1.54, 1.57]; r=1 -> {}; r=2 -> {}; {time}",
            r1["result"], r2["result"]
        ),
    )
}

/// Gap-scaling contrast between r = 1 and r = 1.56.
fn criterion_4() -> Outcome {
    let t = Instant::now();
    let ns = [8, 16, 32, 64, 128, 256];
    let lin = gap_scaling(&ns, ScheduleFamily::new(1.0).unwrap(), 0.5).unwrap();
    let bent = gap_scaling(&ns, ScheduleFamily::new(1.56).unwrap(), 0.5).unwrap();
    let decreasing = lin.minima.windows(2).all(|w| w[1].gap_min < w[0].gap_min);
    let (time_ok, time) = within(t, Duration::from_secs(600));
    check(
        lin.classification == GapClass::Exponential
            && bent.classification == GapClass::Polynomial
            && lin.rss_ratio() > 2.0
            && bent.rss_ratio() > 2.0
            && decreasing
            && time_ok,
        format!(
            "r=1: {:?} (RSS ratio {:.1}), r=1.56: {:?} (RSS ratio {:.1}); r=1 gap_min strictly decreasing: {decreasing}; {time}",
            lin.classification,
            lin.rss_ratio(),
            bent.classification,
            bent.rss_ratio()
        ),
    )
}

fn full_hamiltonian(n: usize, s: f64, tau: f64, j: f64) -> DMatrix<f64> {
    let dim = 1usize << n;
    let nf = n as f64;
    let mut h = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let w = nf - 2.0 * b.count_ones() as f64;
        h[(b, b)] = -s * j * w - tau * nf * (w / nf).powi(4);
        for i in 0..n {
            h[(b, b ^ (1 << i))] = -(1.0 - s);
        }
    }
    h
}

/// Symmetric-sector spectrum against brute-force diagonalization.
fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_member = 0.0f64;
    let mut worst_ground = 0.0f64;
    for n in [2, 4, 6, 8, 10] {
        for _ in 0..25 {
            let (s, tau) = (rng.gen::<f64>(), rng.gen::<f64>());
            let mut full: Vec<f64> = full_hamiltonian(n, s, tau, 0.5)
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect();
            full.sort_by(f64::total_cmp);
            let sector = build_hamiltonian(n, ControlPoint::new(s, tau).unwrap(), 0.5)
                .unwrap()
                .eigenvalues()
                .unwrap();
            for e in &sector {
                let d = full
                    .iter()
                    .map(|x| (x - e).abs())
                    .fold(f64::INFINITY, f64::min);
                worst_member = worst_member.max(d);
            }
            worst_ground = worst_ground.max((sector[0] - full[0]).abs());
        }
    }
    let (time_ok, time) = within(t, Duration::from_secs(120));
    check(
        worst_member < 1e-8 && worst_ground < 1e-8 && time_ok,
        format!("max distance to full spectrum {worst_member:.1e}, max |E0 - E0_full| {worst_ground:.1e} (tol 1e-8); {time}"),
    )
}

/// Finite-size ground energy per qubit approaches the mean-field minimum.
fn criterion_6() -> Outcome {
    let t = Instant::now();
    let control = ControlPoint::new(0.7, 0.7).unwrap();
    let f_min = find_stationary_points(
        control,
        Temperature::Zero,
        CouplingModel::uniform(0.5).unwrap(),
    )
    .global_minimum()
    .f;
    let diffs: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&n| (gap_at(n, control, 0.5).unwrap().e0 / n as f64 - f_min).abs())
        .collect();
    let monotone = diffs.windows(2).all(|w| w[1] < w[0]);
    let (time_ok, time) = within(t, Duration::from_secs(60));
    check(
        monotone && diffs[3] < 1e-2 && time_ok,
        format!(
            "|E0/N - min f| for N = 64..512: {}; {time}",
            diffs
                .iter()
                .map(|d| format!("{d:.2e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

/// Mean-field invariant suite.
fn criterion_7() -> Outcome {
    let t = Instant::now();
    let cp = |s: f64, tau: f64| ControlPoint::new(s, tau).unwrap();
    let ms: Vec<f64> = (0..=200).map(|k| -1.0 + k as f64 * 0.01).collect();
    let uni = CouplingModel::uniform(0.5).unwrap();
    let half = CouplingModel::bimodal(0.5, 0.5).unwrap();
    let sat = CouplingModel::bimodal(0.5, 1.0).unwrap();
    let grid5 = [0.0, 0.25, 0.5, 0.75, 1.0];

    let mut even = 0.0f64;
    let mut same = 0.0f64;
    let mut zero_t = 0.0f64;
    for &s in &grid5 {
        for &tau in &grid5 {
            for temp in [Temperature::Zero, Temperature::finite(2.0).unwrap()] {
                let lh = Landscape::new(cp(s, tau), temp, half);
                let (lu, ls) = (
                    Landscape::new(cp(s, tau), temp, uni),
                    Landscape::new(cp(s, tau), temp, sat),
                );
                for &m in &ms {
                    even = even.max((lh.f(m) - lh.f(-m)).abs());
                    same = same.max((lu.f(m) - ls.f(m)).abs());
                }
            }
            let (z, w) = (
                Landscape::new(cp(s, tau), Temperature::Zero, uni),
                Landscape::new(cp(s, tau), Temperature::finite(1e3).unwrap(), uni),
            );
            for &m in &ms {
                zero_t = zero_t.max((z.f(m) - w.f(m)).abs());
            }
        }
    }
    let mut residual = 0.0f64;
    for couplings in [uni, half, CouplingModel::bimodal(0.5, 0.8).unwrap()] {
        for i in 0..=20 {
            for k in 0..=20 {
                let report = find_stationary_points(
                    cp(i as f64 / 20.0, k as f64 / 20.0),
                    Temperature::Zero,
                    couplings,
                );
                for p in report.minima() {
                    residual = residual.max(p.residual.abs());
                }
            }
        }
    }
    let (time_ok, time) = within(t, Duration::from_secs(120));
    check(
        even <= 1e-14 && same <= 1e-14 && residual < 1e-10 && zero_t < 1e-3 && time_ok,
        format!(
            "evenness {even:.1e} (tol 1e-14), eps=1 vs uniform {same:.1e} (tol 1e-14), max residual {residual:.1e} (tol 1e-10), beta=1e3 vs zero T {zero_t:.1e} (tol 1e-3); {time}"
        ),
    )
}

/// Spin-glass phase structure for bimodal couplings.
fn criterion_8() -> Outcome {
    let t = Instant::now();
    let trace = |eps: f64| {
        trace_line(
            Temperature::Zero,
            CouplingModel::bimodal(0.5, eps).unwrap(),
            standard_grid(),
        )
        .unwrap()
    };
    let strong = trace(0.8);
    let half = trace(0.5);
    let broken = strong.segments.len() >= 2;
    let single = half.segments.len() == 1;
    let (tuned, detail) = match schedule_crossing(ScheduleFamily::new(1.0).unwrap(), &strong) {
        Crossing::Crosses { s, .. } => {
            let at = strong.interpolate(s).map(|p| p.1).unwrap_or(f64::NAN);
            let (s_min, j_min) = jump_profile(&strong)
                .into_iter()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap_or((f64::NAN, f64::NAN));
            (
                j_min < at,
                format!("tau=s crosses at s={s:.4} with jump {at:.4}; smallest jump {j_min:.4} at s={s_min:.3}"),
            )
        }
        other => (
            false,
            format!("tau=s does not cross the eps=0.8 line: {other:?}"),
        ),
    };
    let (time_ok, time) = within(t, Duration::from_secs(300));
    check(
        broken && single && tuned && time_ok,
        format!(
            "eps=0.8 segments = {} (need >= 2) {}; eps=0.5 segments = {} (need 1) {}; {detail} {}; {time}",
            strong.segments.len(),
            ok(broken),
            half.segments.len(),
            ok(single),
            ok(tuned)
        ),
    )
}

/// Byte-identical outputs for one and eight worker threads.
fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 10] = [
        &[
            "free-energy",
            "--s",
            "0.3",
            "--tau",
            "0.5",
            "--epsilon",
            "0.8",
        ],
        &["solve-m", "--s", "0.3", "--tau", "0.5", "--format", "json"],
        &["phase-line", "--s-step", "0.01"],
        &[
            "phase-line",
            "--beta",
            "2",
            "--s-step",
            "0.02",
            "--format",
            "json",
        ],
        &["critical-point", "--epsilon", "0.9", "--s-step", "0.01"],
        &["jump-profile", "--epsilon", "0.8", "--s-step", "0.01"],
        &["schedule-check", "--r", "1", "--s-step", "0.01"],
        &["gap", "--N", "64", "--s", "0.4", "--tau", "0.3"],
        &["gap-scaling", "--r", "1", "--N", "8,16,32,64"],
        &["lhz-counts", "--Nl", "5"],
    ];
    let mut differing = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for (rep, threads) in ["1", "8", "1", "8"].iter().enumerate() {
            let out = dir.path().join(format!("c{i}-{rep}.out"));
            let fit = dir.path().join(format!("c{i}-{rep}.fit.json"));
            let mut argv = vec!["lhz"];
            argv.extend_from_slice(args);
            let (out_s, fit_s) = (
                out.to_str().unwrap().to_string(),
                fit.to_str().unwrap().to_string(),
            );
            argv.extend(["--threads", threads, "--out", &out_s]);
            if args[0] == "gap-scaling" {
                argv.extend(["--fit-out", &fit_s]);
            }
            let cfg = parse_args(argv).expect("valid args");
            lhz_cli::run(&cfg).expect("command succeeds");
            let mut bytes = std::fs::read(&out).unwrap();
            if args[0] == "gap-scaling" {
                bytes.extend(std::fs::read(&fit).unwrap());
            }
            outputs.push(bytes);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            differing.push(args[0]);
        }
    }
    check(
        differing.is_empty(),
        if differing.is_empty() {
            format!(
                "{} commands, 2 runs each at --threads 1 and 8: byte-identical",
                commands.len()
            )
        } else {
            format!("outputs differ for {differing:?}")
        },
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("critical point closed form", criterion_1),
        ("numeric vs closed-form critical point", criterion_2),
        ("tangency exponent and schedule crossings", criterion_3),
        ("gap-scaling contrast", criterion_4),
        ("brute-force spectral oracle", criterion_5),
        ("mean-field/spectrum consistency", criterion_6),
        ("mean-field invariant suite", criterion_7),
        ("bimodal phase structure", criterion_8),
        ("determinism across thread counts", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {tag}: {name}: {}", k + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
