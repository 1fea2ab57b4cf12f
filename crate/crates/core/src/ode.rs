//! Explicit integrators over small fixed-size state vectors.
//!
//! The crate's flows are smooth and low-dimensional, so a fixed-step
//! classical RK4 with a final clamped step is the workhorse. An embedded
//! Fehlberg 4(5) pair with error-per-unit-step control is available where a
//! tolerance is more natural than a step size.

use crate::error::{Error, Result};

/// How to advance the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical RK4 with the given step; the last step shrinks to land on
    /// the end time exactly.
    Rk4 { step: f64 },
    /// Fehlberg 4(5) keeping the local error below `tol` per unit time.
    Rkf45 { tol: f64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Rk4 { step: 1e-3 }
    }
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// One classical RK4 step of size `h`.
pub fn rk4_step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates `y' = f(t, y)` from `t = 0` to `t_end` with fixed steps,
/// feeding `sink` the initial state, every `sample_every`-th step, and the
/// final state at exactly `t_end`.
pub fn integrate_fixed<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_end: f64,
    step: f64,
    sample_every: usize,
    mut sink: impl FnMut(f64, &[f64; N]),
) {
    assert!(t_end > 0.0 && step > 0.0, "need positive horizon and step");
    let k = sample_every.max(1) as u64;
    let n_total = ((t_end / step) - 1e-9).floor().max(0.0) as u64 + 1;
    let mut y = y0;
    sink(0.0, &y);
    for i in 0..n_total {
        let t = i as f64 * step;
        let h = if i + 1 == n_total { t_end - t } else { step };
        y = rk4_step(f, t, &y, h);
        let done = i + 1 == n_total;
        if (i + 1) % k == 0 || done {
            let ts = if done { t_end } else { (i + 1) as f64 * step };
            sink(ts, &y);
        }
    }
}

// Fehlberg coefficients for the embedded 4(5) pair.
const A2: f64 = 1.0 / 4.0;
const A3: [f64; 2] = [3.0 / 32.0, 9.0 / 32.0];
const A4: [f64; 3] = [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0];
const A5: [f64; 4] = [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0];
const A6: [f64; 5] = [
    -8.0 / 27.0,
    2.0,
    -3544.0 / 2565.0,
    1859.0 / 4104.0,
    -11.0 / 40.0,
];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const B4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -1.0 / 5.0,
    0.0,
];

fn rkf45_step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> ([f64; N], f64) {
    let k1 = f(t, y);
    let k2 = f(t + h / 4.0, &axpy(y, h * A2, &k1));
    let mut y3 = *y;
    for i in 0..N {
        y3[i] += h * (A3[0] * k1[i] + A3[1] * k2[i]);
    }
    let k3 = f(t + 3.0 * h / 8.0, &y3);
    let mut y4 = *y;
    for i in 0..N {
        y4[i] += h * (A4[0] * k1[i] + A4[1] * k2[i] + A4[2] * k3[i]);
    }
    let k4 = f(t + 12.0 * h / 13.0, &y4);
    let mut y5 = *y;
    for i in 0..N {
        y5[i] += h * (A5[0] * k1[i] + A5[1] * k2[i] + A5[2] * k3[i] + A5[3] * k4[i]);
    }
    let k5 = f(t + h, &y5);
    let mut y6 = *y;
    for i in 0..N {
        y6[i] +=
            h * (A6[0] * k1[i] + A6[1] * k2[i] + A6[2] * k3[i] + A6[3] * k4[i] + A6[4] * k5[i]);
    }
    let k6 = f(t + h / 2.0, &y6);

    let ks = [k1, k2, k3, k4, k5, k6];
    let mut out = *y;
    let mut err = 0.0f64;
    for i in 0..N {
        let mut hi = 0.0;
        let mut lo = 0.0;
        for (j, k) in ks.iter().enumerate() {
            hi += B5[j] * k[i];
            lo += B4[j] * k[i];
        }
        out[i] += h * hi;
        err = err.max((h * (hi - lo)).abs());
    }
    (out, err)
}

/// Integrates with the adaptive 4(5) pair, holding the local error below
/// `tol * h` per step. `sink` receives the start, every `sample_every`-th
/// accepted step, and the final state. Fails with step underflow if the
/// controller stalls.
pub fn integrate_adaptive<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_end: f64,
    tol: f64,
    sample_every: usize,
    mut sink: impl FnMut(f64, &[f64; N]),
) -> Result<()> {
    assert!(
        t_end > 0.0 && tol > 0.0,
        "need positive horizon and tolerance"
    );
    let k = sample_every.max(1) as u64;
    let h_min = 1e-13 * t_end.max(1.0);
    let mut h = (1e-2f64).min(t_end);
    let mut t = 0.0;
    let mut y = y0;
    let mut accepted: u64 = 0;
    sink(0.0, &y);
    while t < t_end {
        let h_try = h.min(t_end - t);
        let (y_new, err) = rkf45_step(f, t, &y, h_try);
        if err <= tol * h_try || h_try <= h_min {
            if h_try <= h_min && err > tol * h_try {
                return Err(Error::StepUnderflow { t_reached: t });
            }
            t += h_try;
            y = y_new;
            accepted += 1;
            let done = t >= t_end - 1e-15 * t_end.max(1.0);
            if accepted % k == 0 || done {
                sink(if done { t_end } else { t }, &y);
            }
            if done {
                break;
            }
        }
        let scale = if err > 0.0 {
            0.9 * (tol * h_try / err).powf(0.25)
        } else {
            5.0
        };
        h = h_try * scale.clamp(0.2, 5.0);
        if h < h_min {
            h = h_min;
        }
    }
    Ok(())
}
