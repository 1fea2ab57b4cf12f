//! One-dimensional quadrature.
//!
//! Periodic analytic integrands get the trapezoid rule, which converges
//! geometrically in that setting; everything else gets adaptive Simpson
//! with a Richardson error estimate.

/// Trapezoid sum of a `tau`-periodic function over one full period with `n`
/// uniformly spaced nodes.
fn periodic_trapezoid_sum(f: &impl Fn(f64) -> f64, tau: f64, n: usize) -> f64 {
    let h = tau / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

/// Integrates a smooth `tau`-periodic function over one period, doubling the
/// node count from `n0` until two successive estimates agree to `tol`.
pub fn trapezoid_periodic(f: impl Fn(f64) -> f64, tau: f64, n0: usize, tol: f64) -> f64 {
    let mut n = n0.max(4);
    let mut prev = periodic_trapezoid_sum(&f, tau, n);
    while n < (1 << 22) {
        n *= 2;
        let cur = periodic_trapezoid_sum(&f, tau, n);
        if (cur - prev).abs() <= tol {
            return cur;
        }
        prev = cur;
    }
    prev
}

fn simpson_rule(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn simpson_recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_rule(fa, flm, fm, m - a);
    let right = simpson_rule(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`. Handles
/// reversed limits with the usual sign convention.
pub fn simpson_adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if b < a {
        return -simpson_adaptive(f, b, a, tol);
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson_rule(fa, fm, fb, b - a);
    simpson_recurse(f, a, b, fa, fm, fb, whole, tol.max(1e-15), 52)
}
