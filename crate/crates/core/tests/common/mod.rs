//! Shared oracles and helpers for the integration tests.
//!
//! The elliptic integrals here are computed by the arithmetic-geometric
//! mean, independently of the crate's quadratures, so the period map can be
//! checked against a second numerical method rather than against itself.

#![allow(dead_code)]

use rand::Rng;
use se2_geodesics::momentum::{hill_intervals, level_p_theta, IntervalKind, Momentum};
use se2_geodesics::{CotangentState, ReducedState};
use std::f64::consts::PI;

pub fn assert_close(a: f64, b: f64, tol: f64) {
    assert!(
        (a - b).abs() <= tol,
        "{a} vs {b} differ by {} (tol {tol})",
        (a - b).abs()
    );
}

/// Complete elliptic integral `K(k)` in the modulus convention, via AGM.
///
/// The iteration count is capped: the means converge quadratically but can
/// end in a one-ulp two-cycle, so an open-ended loop on `|a - b|` may never
/// terminate.
pub fn elliptic_k(k: f64) -> f64 {
    assert!((0.0..1.0).contains(&k), "modulus out of range: {k}");
    let mut a = 1.0f64;
    let mut b = (1.0 - k * k).sqrt();
    for _ in 0..40 {
        if (a - b).abs() <= 1e-17 {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    PI / (2.0 * a)
}

/// Complete elliptic integral `E(k)` in the modulus convention, via AGM.
pub fn elliptic_e(k: f64) -> f64 {
    assert!((0.0..1.0).contains(&k), "modulus out of range: {k}");
    let mut a = 1.0f64;
    let mut b = (1.0 - k * k).sqrt();
    let mut c = k;
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5f64;
    for _ in 0..40 {
        if c.abs() <= 1e-17 {
            break;
        }
        c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    PI / (2.0 * a) * (1.0 - sum)
}

/// A random state on the unit-speed level `H = 1/2`, with free sideways
/// momentum and pose.
pub fn random_arc_length_state(rng: &mut impl Rng) -> CotangentState {
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let p_theta = phi.cos();
    let p_u = phi.sin();
    let p_v: f64 = rng.gen_range(-2.0..2.0);
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (s, c) = theta.sin_cos();
    CotangentState {
        p_theta,
        p_x: p_u * c - p_v * s,
        p_y: p_u * s + p_v * c,
        theta,
        x: rng.gen_range(-3.0..3.0),
        y: rng.gen_range(-3.0..3.0),
    }
}

/// A random momentum outside the separatrix guard band together with a
/// random unit-speed reduced state on its level set, kept away from the
/// Hill endpoints.
pub fn random_momentum_and_state(rng: &mut impl Rng) -> (Momentum, ReducedState) {
    loop {
        let r: f64 = rng.gen_range(0.0..3.0);
        if (r - 1.0).abs() < 1e-6 {
            continue;
        }
        let mu = Momentum::new(r, rng.gen_range(0.0..std::f64::consts::TAU));
        let iv = hill_intervals(&mu)[0];
        let theta = if iv.kind == IntervalKind::FullCircle {
            rng.gen_range(0.0..std::f64::consts::TAU)
        } else {
            iv.lo + iv.width() * rng.gen_range(0.05..0.95)
        };
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let r0 = ReducedState::new(sign * level_p_theta(&mu, theta), theta);
        if se2_geodesics::momentum::on_level_residual(&mu, &r0) < 1e-12 {
            return (mu, r0);
        }
    }
}

#[test]
fn elliptic_oracles_match_frozen_references() {
    // Reference values computed with 20-digit arbitrary precision
    // arithmetic, modulus convention.
    assert_close(elliptic_k(0.5), 1.6857503548125960429, 1e-15);
    assert_close(elliptic_e(0.5), 1.4674622093394271555, 1e-15);
    assert_close(elliptic_k(0.25), 1.5962422221317835101, 1e-15);
    assert_close(elliptic_k(0.0), PI / 2.0, 1e-15);
    assert_close(elliptic_e(0.0), PI / 2.0, 1e-15);
    assert_close(elliptic_k(0.2), 1.5868678474541662373, 1e-15);
    assert_close(elliptic_k(2.0 / 3.0), 1.8096674954865884946, 1e-15);
    assert_close(elliptic_e(0.25), 1.5459572561054650350, 1e-15);
    assert_close(elliptic_e(0.75), 1.3184721079946209974, 1e-15);
    assert_close(elliptic_e(0.9), 1.1716970527816141412, 1e-15);
    assert_close(elliptic_e(0.2), 1.5549685462425292835, 1e-15);
    assert_close(elliptic_e(2.0 / 3.0), 1.3781039378999829545, 1e-15);
}
