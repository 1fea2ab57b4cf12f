//! Pins the traverse-time and displacement quadratures against an
//! independent AGM evaluation of the complete elliptic integrals, and checks
//! them against the reduced flow itself.
//!
//! With `k` the modulus, the closed forms used here are
//!
//! ```text
//! L(R) = 4 K(R)            R < 1        L(0) = 2 pi
//! L(R) = (2 / R) K(1 / R)  R > 1
//! dx(R, delta = 0) = (4 / R) (K(R) - E(R))       R < 1
//! dx(R, delta = 0) = 2 (K(1 / R) - E(1 / R))     R > 1, either interval
//! ```
//!
//! with `dy(delta = 0) = 0`, a general `delta` rotating the displacement, and
//! the periodicity witness equal to `R` times `dx` at `delta = 0`.

mod common;

use common::{assert_close, elliptic_e, elliptic_k};
use se2_geodesics::momentum::{hill_intervals, level_p_theta, Momentum, ReducedState};
use se2_geodesics::ode::integrate_adaptive;
use se2_geodesics::period::{
    displacement_independence_check, is_periodic, one_period_arc, period_displacement,
    reduced_period, theta_period,
};
use std::f64::consts::TAU;

#[test]
fn traverse_times_match_the_elliptic_oracle() {
    let cases = [
        (0.0, TAU, 1e-12),
        (0.25, 4.0 * elliptic_k(0.25), 1e-9),
        (0.5, 4.0 * elliptic_k(0.5), 1e-9),
        (1.5, (2.0 / 1.5) * elliptic_k(1.0 / 1.5), 1e-9),
        (2.0, elliptic_k(0.5), 1e-9),
        (5.0, 0.4 * elliptic_k(0.2), 1e-9),
    ];
    for (r, expected, tol) in cases {
        let mu = Momentum::new(r, 0.9);
        let iv = hill_intervals(&mu)[0];
        assert_close(theta_period(&mu, &iv).unwrap(), expected, tol);
    }
}

#[test]
fn displacements_match_the_elliptic_oracle() {
    let slow = [(0.25, 16.0), (0.5, 8.0)];
    for (r, factor) in slow {
        let mu = Momentum::new(r, 0.0);
        let iv = hill_intervals(&mu)[0];
        let (dx, dy) = period_displacement(&mu, &iv).unwrap();
        assert_close(dx, factor * (elliptic_k(r) - elliptic_e(r)), 1e-9);
        assert_close(dy, 0.0, 1e-9);
    }
    for r in [2.0, 5.0] {
        let k = 1.0 / r;
        let mu = Momentum::new(r, 0.0);
        let iv = hill_intervals(&mu)[0];
        let (dx, dy) = period_displacement(&mu, &iv).unwrap();
        assert_close(dx, 2.0 * (elliptic_k(k) - elliptic_e(k)), 1e-9);
        assert_close(dy, 0.0, 1e-9);
    }
}

#[test]
fn displacement_rotates_with_the_momentum_direction() {
    let d = 0.7;
    let mu = Momentum::new(2.0, d);
    let iv = hill_intervals(&mu)[0];
    let (dx, dy) = period_displacement(&mu, &iv).unwrap();
    let magnitude = 2.0 * (elliptic_k(0.5) - elliptic_e(0.5));
    assert_close(dx, magnitude * d.cos(), 1e-9);
    assert_close(dy, magnitude * d.sin(), 1e-9);
}

#[test]
fn periodicity_witness_matches_the_elliptic_oracle() {
    let (_, w_slow) = is_periodic(&Momentum::new(0.5, 0.3)).unwrap();
    assert_close(w_slow, 4.0 * (elliptic_k(0.5) - elliptic_e(0.5)), 1e-9);
    let (_, w_fast) = is_periodic(&Momentum::new(2.0, 0.3)).unwrap();
    assert_close(w_fast, 4.0 * (elliptic_k(0.5) - elliptic_e(0.5)), 1e-9);
    let (periodic, w_zero) = is_periodic(&Momentum::new(0.0, 0.0)).unwrap();
    assert!(periodic);
    assert_eq!(w_zero, 0.0);
}

fn flow_reduced(mu: &Momentum, start: [f64; 2], t: f64) -> [f64; 2] {
    let mu = *mu;
    let rhs = move |_t: f64, y: &[f64; 2]| {
        let (dp, dth) =
            se2_geodesics::momentum::reduced_vector_field(&mu, &ReducedState::new(y[0], y[1]));
        [dp, dth]
    };
    let mut end = start;
    integrate_adaptive(&rhs, start, t, 1e-12, usize::MAX, |_, y| end = *y).unwrap();
    end
}

#[test]
fn rotation_period_closes_one_full_turn_of_the_flow() {
    for r in [0.25, 0.5] {
        let mu = Momentum::new(r, 0.6);
        let iv = hill_intervals(&mu)[0];
        let l = theta_period(&mu, &iv).unwrap();
        let th0 = 1.2;
        let p0 = level_p_theta(&mu, th0);
        let end = flow_reduced(&mu, [p0, th0], l);
        assert_close(end[1], th0 + TAU, 1e-6);
        assert_close(end[0], p0, 1e-6);
    }
}

#[test]
fn oscillation_traverse_connects_the_hill_endpoints() {
    for r in [2.0, 5.0] {
        let mu = Momentum::new(r, 0.6);
        let iv = hill_intervals(&mu)[0];
        let l = theta_period(&mu, &iv).unwrap();
        let end = flow_reduced(&mu, [0.0, iv.lo], l);
        assert_close(end[1], iv.hi, 1e-6);
        assert_close(end[0], 0.0, 1e-6);
    }
}

#[test]
fn full_period_lift_reproduces_the_quadrature_displacement() {
    for (r, d, doubling) in [
        (0.25, 0.0, 1.0),
        (0.5, 1.0, 1.0),
        (2.0, 0.7, 2.0),
        (5.0, 1.0, 2.0),
    ] {
        let mu = Momentum::new(r, d);
        let iv = hill_intervals(&mu)[0];
        let theta0 = iv.midpoint();
        let r0 = ReducedState::new(level_p_theta(&mu, theta0), theta0);
        let arc = one_period_arc(&mu, &r0).unwrap();
        let end = arc.final_state();
        let (dx, dy) = period_displacement(&mu, &iv).unwrap();
        assert_close(end.x, doubling * dx, 1e-6);
        assert_close(end.y, doubling * dy, 1e-6);
        assert_close(
            end.theta,
            theta0 + if doubling == 1.0 { TAU } else { 0.0 },
            1e-6,
        );
    }
}

#[test]
fn displacement_is_independent_of_the_starting_point() {
    for (r, d) in [(0.5, 0.0), (0.5, 1.0), (2.0, 0.0), (2.0, 1.0)] {
        let mu = Momentum::new(r, d);
        let iv = hill_intervals(&mu)[0];
        let w = iv.width();
        let pairs = [
            (0.3, 1.0, 0.6, 1.0),
            (0.2, 1.0, 0.8, -1.0),
            (0.5, -1.0, 0.25, -1.0),
        ];
        for (fa, sa, fb, sb) in pairs {
            let ta = iv.lo + fa * w;
            let tb = iv.lo + fb * w;
            let a = ReducedState::new(sa * level_p_theta(&mu, ta), ta);
            let b = ReducedState::new(sb * level_p_theta(&mu, tb), tb);
            let report = displacement_independence_check(&mu, &a, &b).unwrap();
            assert!(
                report.passed,
                "gap {} for R = {r}, delta = {d}, pair {fa}/{fb}",
                report.gap
            );
            assert!(report.gap <= 1e-7);
        }
    }
}

#[test]
fn reduced_period_matches_the_return_of_the_flow() {
    for (r, d) in [(0.5, 0.2), (2.0, 0.2)] {
        let mu = Momentum::new(r, d);
        let iv = hill_intervals(&mu)[0];
        let theta0 = iv.lo + 0.4 * iv.width();
        let p0 = level_p_theta(&mu, theta0);
        let period = reduced_period(&mu).unwrap();
        let end = flow_reduced(&mu, [p0, theta0], period);
        assert_close(end[0], p0, 1e-6);
        let wrapped = if r < 1.0 { end[1] - TAU } else { end[1] };
        assert_close(wrapped, theta0, 1e-6);
    }
}
