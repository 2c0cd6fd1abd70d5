//! One-dimensional Gauss–Legendre nodes and the adaptive panel-doubling
//! integrator used for every density integral in the crate.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    if n == 0 {
        return (nodes, weights);
    }
    let half = (n + 1) / 2;
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const PANEL_ORDER: usize = 20;
const MAX_DOUBLINGS: u32 = 14;

/// Composite Gauss–Legendre on `[a, b]` with 1, 2, 4, ... panels until two
/// successive estimates agree to `rel_tol` relative to the integral of `|f|`.
///
/// Returns `None` when the doubling budget is exhausted.
pub(crate) fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Option<f64> {
    if b <= a {
        return Some(0.0);
    }
    let (xs, ws) = gauss_legendre(PANEL_ORDER);
    let estimate = |panels: usize| -> (f64, f64) {
        let h = (b - a) / panels as f64;
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for p in 0..panels {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            for (x, w) in xs.iter().zip(&ws) {
                let v = f(mid + 0.5 * h * x) * w;
                sum += v;
                abs_sum += v.abs();
            }
        }
        (0.5 * h * sum, 0.5 * h * abs_sum)
    };
    let (mut prev, _) = estimate(1);
    for j in 1..=MAX_DOUBLINGS {
        let (cur, abs_cur) = estimate(1 << j);
        if (cur - prev).abs() <= rel_tol * abs_cur.max(f64::MIN_POSITIVE) || abs_cur == 0.0 {
            return Some(cur);
        }
        prev = cur;
    }
    None
}
