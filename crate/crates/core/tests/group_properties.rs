//! Group-theoretic properties: associativity, inverses, left invariance of
//! the frame, duality, the bracket relations, and the inner product.

mod common;

use common::assert_close;
use proptest::prelude::*;
use se2_geodesics::se2::{
    coframe_at, compose, frame_at, inverse, pose_gap, sr_inner, Pose, TangentVector,
};

fn arb_pose() -> impl Strategy<Value = Pose> {
    (-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0).prop_map(|(t, x, y)| Pose::new(t, x, y))
}

proptest! {
    #[test]
    fn composition_is_associative(g in arb_pose(), h in arb_pose(), k in arb_pose()) {
        let left = compose(compose(g, h), k);
        let right = compose(g, compose(h, k));
        prop_assert!(pose_gap(left, right) <= 1e-9);
    }

    #[test]
    fn inverse_cancels(g in arb_pose()) {
        prop_assert!(pose_gap(compose(g, inverse(g)), Pose::identity()) <= 1e-9);
        prop_assert!(pose_gap(compose(inverse(g), g), Pose::identity()) <= 1e-9);
    }

    #[test]
    fn frame_is_left_invariant(g in arb_pose(), h in arb_pose()) {
        // Pushing X_i(h) forward by left translation with g must give
        // X_i(gh): left translation rotates planar components by g's angle.
        let (s, c) = g.theta.sin_cos();
        let push = |v: &TangentVector| TangentVector {
            base: compose(g, h),
            c_theta: v.c_theta,
            c_x: c * v.c_x - s * v.c_y,
            c_y: s * v.c_x + c * v.c_y,
        };
        let here = frame_at(h);
        let there = frame_at(compose(g, h));
        for (a, b) in [(&here.0, &there.0), (&here.1, &there.1), (&here.2, &there.2)] {
            let p = push(a);
            prop_assert!((p.c_theta - b.c_theta).abs() <= 1e-12);
            prop_assert!((p.c_x - b.c_x).abs() <= 1e-12);
            prop_assert!((p.c_y - b.c_y).abs() <= 1e-12);
        }
    }

    #[test]
    fn pairing_is_bilinear(g in arb_pose(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let (xt, xu, xv) = frame_at(g);
        let (tt, tu, _) = coframe_at(g);
        let v = TangentVector {
            base: g,
            c_theta: a * xt.c_theta + b * xu.c_theta,
            c_x: a * xt.c_x + b * xu.c_x,
            c_y: a * xt.c_y + b * xu.c_y,
        };
        prop_assert!((tt.pair(&v) - a).abs() <= 1e-12);
        prop_assert!((tu.pair(&v) - b).abs() <= 1e-12);
        let _ = xv;
    }

    #[test]
    fn inner_product_is_symmetric_and_positive(
        g in arb_pose(),
        a1 in -4.0f64..4.0, b1 in -4.0f64..4.0,
        a2 in -4.0f64..4.0, b2 in -4.0f64..4.0,
    ) {
        let v = TangentVector::from_frame(g, a1, b1, 0.0);
        let w = TangentVector::from_frame(g, a2, b2, 0.0);
        let vw = sr_inner(&v, &w).unwrap();
        let wv = sr_inner(&w, &v).unwrap();
        prop_assert!((vw - wv).abs() <= 1e-12);
        let vv = sr_inner(&v, &v).unwrap();
        prop_assert!(vv >= 0.0);
        prop_assert!((vv - (a1 * a1 + b1 * b1)).abs() <= 1e-10);
    }
}

/// Flow of a left-invariant frame field: right translation by the
/// corresponding one-parameter subgroup.
fn flow(g: Pose, dir: usize, h: f64) -> Pose {
    let step = match dir {
        0 => Pose::new(h, 0.0, 0.0),
        1 => Pose::new(0.0, h, 0.0),
        _ => Pose::new(0.0, 0.0, h),
    };
    compose(g, step)
}

/// Symmetrized finite-difference estimate of `[X_a, X_b]` at `g` from the
/// group commutator of flows; second-order accurate in `h`.
fn bracket_fd(g: Pose, a: usize, b: usize, h: f64) -> (f64, f64, f64) {
    let commutator = |h: f64| {
        let mut q = g;
        q = flow(q, a, h);
        q = flow(q, b, h);
        q = flow(q, a, -h);
        q = flow(q, b, -h);
        q
    };
    let plus = commutator(h);
    let minus = commutator(-h);
    let scale = 1.0 / (2.0 * h * h);
    (
        (plus.theta + minus.theta - 2.0 * g.theta) * scale,
        (plus.x + minus.x - 2.0 * g.x) * scale,
        (plus.y + minus.y - 2.0 * g.y) * scale,
    )
}

#[test]
fn bracket_relations_from_commutator_flows() {
    let h = 1e-4;
    for g in [
        Pose::identity(),
        Pose::new(0.7, 1.0, -2.0),
        Pose::new(-2.2, 0.1, 0.4),
        Pose::new(3.9, -5.0, 2.5),
    ] {
        let (xt, xu, xv) = frame_at(g);

        // [X_theta, X_u] = X_v
        let (bt, bx, by) = bracket_fd(g, 0, 1, h);
        assert_close(bt, xv.c_theta, 1e-6);
        assert_close(bx, xv.c_x, 1e-6);
        assert_close(by, xv.c_y, 1e-6);

        // [X_theta, X_v] = -X_u
        let (bt, bx, by) = bracket_fd(g, 0, 2, h);
        assert_close(bt, -xu.c_theta, 1e-6);
        assert_close(bx, -xu.c_x, 1e-6);
        assert_close(by, -xu.c_y, 1e-6);

        // [X_u, X_v] = 0
        let (bt, bx, by) = bracket_fd(g, 1, 2, h);
        assert_close(bt, 0.0, 1e-6);
        assert_close(bx, 0.0, 1e-6);
        assert_close(by, 0.0, 1e-6);

        let _ = xt;
    }
}

#[test]
fn quarter_turn_compose_example() {
    let g = Pose::new(std::f64::consts::FRAC_PI_2, 1.0, 0.0);
    let h = Pose::new(0.0, 1.0, 0.0);
    let gh = compose(g, h);
    assert_close(gh.theta, std::f64::consts::FRAC_PI_2, 1e-15);
    assert_close(gh.x, 1.0, 1e-15);
    assert_close(gh.y, 1.0, 1e-15);
}
