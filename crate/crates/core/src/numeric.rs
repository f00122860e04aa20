//! Small one-dimensional numerical routines.

/// Safeguarded Newton iteration on a sign-changing bracket `[a, b]`.
///
/// Takes a Newton step when it lands inside the current bracket and
/// otherwise bisects, so convergence is never worse than bisection. Iterates
/// until the bracket cannot be split further in `f64` or `f` vanishes.
pub(crate) fn polish_root(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
) -> f64 {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum());

    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d.is_finite() && d != 0.0 && newton > a && newton < b {
            newton
        } else {
            mid
        };
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
///
/// Returns `(x, f(x))` for the best point seen once the bracket is narrower
/// than `tol` (or no longer shrinks in `f64`).
pub(crate) fn golden_section(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            if c <= a || c >= d {
                break;
            }
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            if d >= b || d <= c {
                break;
            }
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}

/// Ordinary least-squares line `y = intercept + slope * x`, with the
/// residual sum of squares.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    (intercept, slope, rss)
}

/// Least-squares quadratic `y = c0 + c1 u + c2 u^2` in the centered variable
/// `u = x - x0`. Returns `[c0, c1, c2]`; needs at least three distinct `x`.
pub(crate) fn quadratic_fit(xs: &[f64], ys: &[f64], x0: f64) -> Option<[f64; 3]> {
    let mut a = [[0.0f64; 4]; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let u = x - x0;
        let basis = [1.0, u, u * u];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += basis[i] * basis[j];
            }
            a[i][3] += basis[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting on the 3x4 augmented system.
    for col in 0..3 {
        let pivot = (col..3).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
        }
    }
    let mut c = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * c[k]).sum();
        c[row] = (a[row][3] - tail) / a[row][row];
    }
    Some(c)
}

/// `(1/beta) ln(2 cosh(beta x))`, evaluated as `|x| + ln(1 + e^{-2 beta |x|}) / beta`.
pub(crate) fn log_2cosh_over_beta(x: f64, beta: f64) -> f64 {
    let ax = x.abs();
    ax + (-2.0 * beta * ax).exp().ln_1p() / beta
}

/// `sech^2(x)` without overflowing `cosh`.
pub(crate) fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polish_finds_cubic_root() {
        let r = polish_root(|x| x * x * x - 2.0, |x| 3.0 * x * x, 0.0, 2.0);
        assert!((r - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_section(|x| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn linear_fit_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let (a, b, rss) = linear_fit(&xs, &ys);
        assert!((a - 2.0).abs() < 1e-14 && (b + 0.5).abs() < 1e-14 && rss < 1e-28);
    }

    #[test]
    fn quadratic_fit_recovers_coefficients() {
        let xs = [0.1, 0.2, 0.3, 0.4, 0.5];
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 1.0 - 3.0 * (x - 0.3) + 2.0 * (x - 0.3) * (x - 0.3))
            .collect();
        let c = quadratic_fit(&xs, &ys, 0.3).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12);
        assert!((c[1] + 3.0).abs() < 1e-12);
        assert!((c[2] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn log_cosh_is_stable() {
        assert!((log_2cosh_over_beta(1.0, 1.0) - (2.0 * 1f64.cosh()).ln()).abs() < 1e-15);
        let big = log_2cosh_over_beta(3.0, 1e6);
        assert_eq!(big, 3.0);
        assert!((log_2cosh_over_beta(0.0, 2.0) - 2f64.ln() / 2.0).abs() < 1e-16);
        assert_eq!(sech2(1e4), 0.0);
        assert!((sech2(0.5) - 1.0 / 0.5f64.cosh().powi(2)).abs() < 1e-15);
    }
}
