//! Calibration functions: exact solutions of the horizontal eikonal
//! equation whose differential has unit pairing with geodesic velocity.
//!
//! A function `S` calibrates a unit-speed curve when `dS(gamma') = 1`
//! pointwise while `|dS(v)| <= 1` for every unit horizontal `v`; any curve
//! so calibrated is a minimizing geodesic as long as the calibration holds.
//! Two families are provided:
//!
//! - [`LocalEikonal`]: for momentum `(R, delta)`,
//!   `S = sign * F(theta) + R cos(delta) x + R sin(delta) y` with
//!   `F' = sqrt(1 - R^2 cos^2(theta - delta))`, defined on the Hill region;
//! - [`GlobalSeparatrix`]: the `R = 1` limit
//!   `S = -sign * cos(theta - delta) + cos(delta) x + sin(delta) y`,
//!   smooth on the whole group, which certifies lines and heteroclinic
//!   geodesics as metric lines.

use crate::error::{Error, Result};
use crate::flow::GeodesicArc;
use crate::momentum::{hill_intervals, HillInterval, IntervalKind, Momentum};
use crate::quadrature::{simpson_adaptive, trapezoid_periodic};
use crate::se2::{Pose, TangentVector};
use std::f64::consts::{PI, TAU};

/// Branch selector for a calibration function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// The sign of `v`, zero mapping to `Plus`.
    pub fn of(v: f64) -> Self {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

/// The momentum-adapted eikonal solution on (part of) the Hill region.
///
/// For `R > 1` the angle antiderivative only exists on one Hill interval at
/// a time; `theta_ref` records the interval and the zero of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEikonal {
    pub mu: Momentum,
    pub sign: Sign,
    pub theta_ref: f64,
}

impl LocalEikonal {
    /// The standard choice of reference angle: the left endpoint of the
    /// first Hill interval for `R >= 1`, the momentum angle `delta` for
    /// `R < 1`.
    pub fn new(mu: Momentum, sign: Sign) -> Self {
        let theta_ref = if mu.r() >= 1.0 {
            hill_intervals(&mu)[0].lo
        } else {
            mu.delta()
        };
        LocalEikonal {
            mu,
            sign,
            theta_ref,
        }
    }

    /// The eikonal anchored on a specific Hill interval.
    pub fn on_interval(mu: Momentum, sign: Sign, which: &HillInterval) -> Result<Self> {
        let iv = crate::momentum::resolve_interval(&mu, which)?;
        Ok(LocalEikonal {
            mu,
            sign,
            theta_ref: iv.lo,
        })
    }

    /// The Hill interval the reference angle lives on, for `R > 1`.
    fn domain_interval(&self) -> Option<HillInterval> {
        if self.mu.r() > 1.0 {
            crate::momentum::hill_interval_containing(&self.mu, self.theta_ref)
        } else {
            None
        }
    }

    fn check_domain(&self, theta: f64) -> Result<()> {
        if let Some(iv) = self.domain_interval() {
            if !iv.contains(theta, 1e-9) {
                return Err(Error::OutsideHillRegion { theta });
            }
        }
        Ok(())
    }

    /// The angle antiderivative `F(theta)`, integrating
    /// `sqrt(1 - R^2 cos^2(s - delta))` from `theta_ref`.
    fn angle_antiderivative(&self, theta: f64) -> Result<f64> {
        self.check_domain(theta)?;
        let (r, d) = (self.mu.r(), self.mu.delta());
        if r == 0.0 {
            return Ok(theta - self.theta_ref);
        }
        if r == 1.0 {
            return Ok(
                abs_sin_antiderivative(theta - d) - abs_sin_antiderivative(self.theta_ref - d)
            );
        }
        if r < 1.0 {
            let f = |s: f64| (1.0 - r * r * (s - d).cos().powi(2)).sqrt();
            return Ok(simpson_adaptive(&f, self.theta_ref, theta, 1e-12));
        }
        // R > 1: R cos(theta - delta) = sin(psi) turns the root into
        // cos(psi); integrate the analytic psi-form instead.
        let iv = self.domain_interval().expect("R > 1 has a domain interval");
        let psi_of = |theta: f64| {
            let q = (r * (theta - d).cos()).clamp(-1.0, 1.0);
            q.asin()
        };
        let integrand = |psi: f64| {
            let c = psi.cos();
            let q = psi.sin() / r;
            c * c / (r * (1.0 - q * q).sqrt())
        };
        let (p0, p1) = (psi_of(self.theta_ref), psi_of(theta));
        let val = match iv.kind {
            // On I1, psi decreases as theta increases.
            IntervalKind::I1 => simpson_adaptive(&integrand, p1, p0, 1e-12),
            _ => simpson_adaptive(&integrand, p0, p1, 1e-12),
        };
        Ok(val)
    }
}

/// Antiderivative of `|sin|` vanishing at zero.
fn abs_sin_antiderivative(u: f64) -> f64 {
    let k = (u / PI).floor();
    2.0 * k + 1.0 - (u - k * PI).cos()
}

/// Value of the local eikonal at a pose.
pub fn local_eikonal_value(cf: &LocalEikonal, g: &Pose) -> Result<f64> {
    let f = cf.angle_antiderivative(g.theta)?;
    let (a, b) = cf.mu.cartesian();
    Ok(cf.sign.as_f64() * f + a * g.x + b * g.y)
}

/// The separatrix calibration, defined on the whole group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalSeparatrix {
    pub delta: f64,
    pub sign: Sign,
}

/// Value of the separatrix calibration at a pose.
pub fn global_calibration_value(delta: f64, sign: Sign, g: &Pose) -> f64 {
    -sign.as_f64() * (g.theta - delta).cos() + delta.cos() * g.x + delta.sin() * g.y
}

/// Either family, for code that verifies calibrations generically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibrationFunction {
    Local(LocalEikonal),
    Global(GlobalSeparatrix),
}

impl CalibrationFunction {
    pub fn value(&self, g: &Pose) -> Result<f64> {
        match self {
            CalibrationFunction::Local(cf) => local_eikonal_value(cf, g),
            CalibrationFunction::Global(cf) => Ok(global_calibration_value(cf.delta, cf.sign, g)),
        }
    }
}

/// Components of `dS` against the left-invariant coframe
/// `(Theta_theta, Theta_u, Theta_v)`.
pub fn differential_in_coframe(cf: &CalibrationFunction, g: &Pose) -> Result<(f64, f64, f64)> {
    match cf {
        CalibrationFunction::Local(local) => {
            local.check_domain(g.theta)?;
            let (r, d) = (local.mu.r(), local.mu.delta());
            let (su, cu) = (g.theta - d).sin_cos();
            let root = (1.0 - r * r * cu * cu).max(0.0).sqrt();
            Ok((local.sign.as_f64() * root, r * cu, -r * su))
        }
        CalibrationFunction::Global(global) => {
            let (su, cu) = (g.theta - global.delta).sin_cos();
            Ok((global.sign.as_f64() * su, cu, -su))
        }
    }
}

/// The horizontal gradient of `S`: the projection of `dS` onto the
/// distribution, expressed as a tangent vector. Its sub-Riemannian norm is
/// exactly 1 for both families.
pub fn horizontal_gradient(cf: &CalibrationFunction, g: &Pose) -> Result<TangentVector> {
    let (c_theta, c_u, _) = differential_in_coframe(cf, g)?;
    Ok(TangentVector::from_frame(*g, c_theta, c_u, 0.0))
}

/// Pass thresholds for [`verify_calibration`].
pub const CALIBRATION_DS_TOL: f64 = 1e-7;
pub const UNIT_EXCESS_TOL: f64 = 1e-10;

/// What a calibration verification measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationReport {
    /// Largest `|dS(gamma') - 1|` over the arc's samples.
    pub max_ds_err: f64,
    /// Smallest `dS(gamma')`, reported as evidence on failure paths.
    pub min_ds: f64,
    /// Largest `|dS(v)| - 1` over random unit horizontal vectors.
    pub max_unit_excess: f64,
    pub n_samples: usize,
    pub n_random: usize,
    pub seed: u64,
    pub passed: bool,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn unit_uniform(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Checks that `cf` calibrates the arc: `dS(gamma') = 1` at every sample,
/// and `|dS(v)| <= 1` on `n_random` random unit horizontal vectors drawn at
/// random samples (seeded, reproducible).
///
/// If the arc turns against the branch of `cf` (the sign of `p_theta`
/// disagrees with the angle component of `dS` somewhere), the verification
/// fails with a sign-mismatch error carrying the worst pairing seen.
pub fn verify_calibration(
    cf: &CalibrationFunction,
    arc: &GeodesicArc,
    n_random: usize,
    seed: u64,
) -> Result<CalibrationReport> {
    let mut max_ds_err = 0.0f64;
    let mut min_ds = f64::INFINITY;
    let mut mismatch = false;
    for i in 0..arc.len() {
        let s = &arc.samples[i].1;
        let (c_theta, c_u, _) = differential_in_coframe(cf, &s.pose())?;
        let ds = c_theta * s.p_theta + c_u * s.momentum_u();
        max_ds_err = max_ds_err.max((ds - 1.0).abs());
        min_ds = min_ds.min(ds);
        if s.p_theta * c_theta < -1e-12 {
            mismatch = true;
        }
    }
    if mismatch {
        return Err(Error::CalibrationSignMismatch { min_ds });
    }

    let mut state = seed;
    let mut max_unit_excess = f64::NEG_INFINITY;
    for _ in 0..n_random {
        let idx = (splitmix64(&mut state) % arc.len() as u64) as usize;
        let phi = TAU * unit_uniform(&mut state);
        let pose = arc.samples[idx].1.pose();
        let (c_theta, c_u, _) = differential_in_coframe(cf, &pose)?;
        let ds = c_theta * phi.cos() + c_u * phi.sin();
        max_unit_excess = max_unit_excess.max(ds.abs() - 1.0);
    }
    if n_random == 0 {
        max_unit_excess = 0.0;
    }

    Ok(CalibrationReport {
        max_ds_err,
        min_ds,
        max_unit_excess,
        n_samples: arc.len(),
        n_random,
        seed,
        passed: max_ds_err <= CALIBRATION_DS_TOL && max_unit_excess <= UNIT_EXCESS_TOL,
    })
}

/// The Mane critical value `c(mu) = R^2 / 2`: the least energy at which the
/// reduced potential `V = R^2 cos^2(theta - delta) / 2` stops obstructing.
pub fn mane_critical_value(mu: &Momentum) -> f64 {
    0.5 * mu.r() * mu.r()
}

/// Numerically maximizes the reduced potential on a grid of `n` angles,
/// polishing the best candidate with Newton steps on `V'`. Agrees with
/// [`mane_critical_value`] to machine precision.
pub fn mane_grid_maximum(mu: &Momentum, n: usize) -> f64 {
    assert!(n >= 4, "need a few grid points");
    let (r, d) = (mu.r(), mu.delta());
    if r == 0.0 {
        return 0.0;
    }
    let value = |u: f64| 0.5 * r * r * u.cos().powi(2);
    let mut best_u = 0.0f64;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let u = TAU * i as f64 / n as f64 - d;
        let v = value(u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    // Newton on V'(u) = -R^2 sin(2u)/2 from the grid argmax; V'' = -R^2
    // cos(2u) is bounded away from zero near maxima.
    let mut u = best_u;
    for _ in 0..8 {
        let d1 = -0.5 * r * r * (2.0 * u).sin();
        let d2 = -r * r * (2.0 * u).cos();
        if d2.abs() < 1e-12 * r * r {
            break;
        }
        u -= d1 / d2;
    }
    best.max(value(u))
}

/// Integral of `sqrt(1 - R^2 cos^2(theta - delta))` around the full circle:
/// the growth of the local eikonal's angle part over one turn. Strictly
/// positive for `R < 1`, which is the obstruction to closing the local
/// calibration into a global one.
pub fn eikonal_loop_integral(mu: &Momentum) -> Result<f64> {
    if mu.r() >= 1.0 {
        return Err(Error::Precondition(
            "loop integral needs the full circle as Hill region (R < 1)".into(),
        ));
    }
    let (r, d) = (mu.r(), mu.delta());
    Ok(trapezoid_periodic(
        |th| (1.0 - r * r * (th - d).cos().powi(2)).sqrt(),
        TAU,
        1 << 8,
        1e-13,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{lift_geodesic, lift_geodesic_with, FlowOptions};
    use crate::momentum::{level_p_theta, ReducedState};
    use crate::se2::sr_norm;
    use std::f64::consts::FRAC_PI_2;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn abs_sin_antiderivative_matches_quadrature() {
        for u in [-7.3, -0.4, 0.0, 1.2, 3.5, 9.9] {
            let direct = simpson_adaptive(&|s: f64| s.sin().abs(), 0.0, u, 1e-12);
            assert_close(abs_sin_antiderivative(u), direct, 1e-9);
        }
    }

    #[test]
    fn value_is_linear_in_the_plane() {
        let cf = LocalEikonal::new(Momentum::new(0.5, 0.3), Sign::Plus);
        let g0 = Pose::new(1.0, 0.0, 0.0);
        let g1 = Pose::new(1.0, 2.0, -1.0);
        let (a, b) = cf.mu.cartesian();
        let diff = local_eikonal_value(&cf, &g1).unwrap() - local_eikonal_value(&cf, &g0).unwrap();
        assert_close(diff, 2.0 * a - 1.0 * b, 1e-12);
    }

    #[test]
    fn value_vanishes_at_the_reference_angle() {
        for r in [0.0, 0.4, 1.0, 2.5] {
            let cf = LocalEikonal::new(Momentum::new(r, 0.8), Sign::Plus);
            let g = Pose::new(cf.theta_ref, 0.0, 0.0);
            assert_close(local_eikonal_value(&cf, &g).unwrap(), 0.0, 1e-14);
        }
    }

    fn fd_check(cf: &CalibrationFunction, g: &Pose) {
        let h = 1e-6;
        let val = |g: &Pose| cf.value(g).unwrap();
        let d_theta = (val(&Pose::new(g.theta + h, g.x, g.y))
            - val(&Pose::new(g.theta - h, g.x, g.y)))
            / (2.0 * h);
        let d_x = (val(&Pose::new(g.theta, g.x + h, g.y)) - val(&Pose::new(g.theta, g.x - h, g.y)))
            / (2.0 * h);
        let d_y = (val(&Pose::new(g.theta, g.x, g.y + h)) - val(&Pose::new(g.theta, g.x, g.y - h)))
            / (2.0 * h);
        let (c_theta, c_u, c_v) = differential_in_coframe(cf, g).unwrap();
        let (s, c) = g.theta.sin_cos();
        assert_close(d_theta, c_theta, 1e-7);
        assert_close(d_x, c_u * c - c_v * s, 1e-8);
        assert_close(d_y, c_u * s + c_v * c, 1e-8);
    }

    #[test]
    fn differential_matches_finite_differences() {
        let slow = Momentum::new(0.6, 0.5);
        fd_check(
            &CalibrationFunction::Local(LocalEikonal::new(slow, Sign::Plus)),
            &Pose::new(2.2, 0.7, -0.4),
        );
        fd_check(
            &CalibrationFunction::Local(LocalEikonal::new(slow, Sign::Minus)),
            &Pose::new(-1.0, 0.0, 3.0),
        );
        let fast = Momentum::new(2.0, 0.0);
        let iv = hill_intervals(&fast)[0];
        fd_check(
            &CalibrationFunction::Local(LocalEikonal::new(fast, Sign::Plus)),
            &Pose::new(iv.midpoint() + 0.2, 1.0, 1.0),
        );
        fd_check(
            &CalibrationFunction::Global(GlobalSeparatrix {
                delta: 0.9,
                sign: Sign::Plus,
            }),
            &Pose::new(4.4, -2.0, 0.3),
        );
        fd_check(
            &CalibrationFunction::Global(GlobalSeparatrix {
                delta: 0.9,
                sign: Sign::Minus,
            }),
            &Pose::new(0.1, 0.0, 0.0),
        );
    }

    #[test]
    fn horizontal_gradient_is_unit() {
        let cases = [
            CalibrationFunction::Local(LocalEikonal::new(Momentum::new(0.7, 1.1), Sign::Plus)),
            CalibrationFunction::Global(GlobalSeparatrix {
                delta: 0.2,
                sign: Sign::Minus,
            }),
        ];
        for cf in &cases {
            for theta in [0.0, 1.0, 2.5, 4.0, 6.0] {
                let g = Pose::new(theta, 0.3, -0.8);
                let grad = horizontal_gradient(cf, &g).unwrap();
                assert_close(sr_norm(&grad).unwrap(), 1.0, 1e-12);
            }
        }
    }

    #[test]
    fn local_eikonal_rejects_angles_outside_its_interval() {
        let mu = Momentum::new(2.0, 0.0);
        let cf = LocalEikonal::new(mu, Sign::Plus);
        let outside = Pose::new(0.0, 0.0, 0.0);
        assert!(matches!(
            local_eikonal_value(&cf, &outside),
            Err(Error::OutsideHillRegion { .. })
        ));
        let on_i2 = LocalEikonal::on_interval(mu, Sign::Plus, &hill_intervals(&mu)[1]).unwrap();
        let inside_i2 = Pose::new(3.0 * FRAC_PI_2, 0.0, 0.0);
        assert!(local_eikonal_value(&on_i2, &inside_i2).is_ok());
    }

    #[test]
    fn slow_momentum_eikonal_calibrates_long_arcs() {
        let mu = Momentum::new(0.5, 0.2);
        let theta0 = 1.3;
        let r0 = ReducedState::new(level_p_theta(&mu, theta0), theta0);
        let arc = lift_geodesic(&mu, &r0, &Pose::identity(), 15.0, 1e-8).unwrap();
        let cf = CalibrationFunction::Local(LocalEikonal::new(mu, Sign::Plus));
        let report = verify_calibration(&cf, &arc, 500, 42).unwrap();
        assert!(report.passed, "report {report:?}");
        assert!(report.max_ds_err <= 1e-9, "ds err {}", report.max_ds_err);
        assert!(report.max_unit_excess <= 0.0);
    }

    #[test]
    fn separatrix_calibration_certifies_the_heteroclinic() {
        let mu = Momentum::new(1.0, 0.0);
        let r0 = ReducedState::new(1.0, FRAC_PI_2);
        let arc = lift_geodesic(&mu, &r0, &Pose::identity(), 20.0, 1e-8).unwrap();
        let plus = CalibrationFunction::Global(GlobalSeparatrix {
            delta: 0.0,
            sign: Sign::Plus,
        });
        let report = verify_calibration(&plus, &arc, 1000, 7).unwrap();
        assert!(report.passed, "report {report:?}");
        let minus = CalibrationFunction::Global(GlobalSeparatrix {
            delta: 0.0,
            sign: Sign::Minus,
        });
        match verify_calibration(&minus, &arc, 0, 7) {
            Err(Error::CalibrationSignMismatch { min_ds }) => assert!(min_ds < 0.0),
            other => panic!("expected sign mismatch, got {other:?}"),
        }
    }

    #[test]
    fn oscillating_arc_past_its_turning_point_breaks_the_local_branch() {
        let mu = Momentum::new(2.0, 0.0);
        let iv = hill_intervals(&mu)[0];
        let r0 = ReducedState::new(level_p_theta(&mu, iv.midpoint()), iv.midpoint());
        let opts = FlowOptions {
            sample_every: 1,
            ..FlowOptions::default()
        };
        let arc = lift_geodesic_with(&mu, &r0, &Pose::identity(), 3.0, 1e-8, &opts).unwrap();
        let cf = CalibrationFunction::Local(LocalEikonal::new(mu, Sign::Plus));
        assert!(matches!(
            verify_calibration(&cf, &arc, 0, 1),
            Err(Error::CalibrationSignMismatch { .. })
        ));
    }

    #[test]
    fn verification_is_seed_reproducible() {
        let mu = Momentum::new(0.3, 1.0);
        let r0 = ReducedState::new(level_p_theta(&mu, 0.0), 0.0);
        let arc = lift_geodesic(&mu, &r0, &Pose::identity(), 5.0, 1e-8).unwrap();
        let cf = CalibrationFunction::Local(LocalEikonal::new(mu, Sign::Plus));
        let a = verify_calibration(&cf, &arc, 200, 99).unwrap();
        let b = verify_calibration(&cf, &arc, 200, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mane_value_and_grid_maximum_agree() {
        for (r, d) in [(0.0, 0.0), (1.0, 0.7), (2.0, 2.2), (0.3, 5.5)] {
            let mu = Momentum::new(r, d);
            let exact = mane_critical_value(&mu);
            assert_close(exact, 0.5 * r * r, 0.0);
            assert_close(mane_grid_maximum(&mu, 721), exact, 1e-12);
        }
    }

    #[test]
    fn loop_integral_obstructs_small_momenta() {
        assert_close(
            eikonal_loop_integral(&Momentum::new(0.0, 0.0)).unwrap(),
            TAU,
            1e-12,
        );
        let val = eikonal_loop_integral(&Momentum::new(0.5, 0.4)).unwrap();
        // 4 E(1/2), elliptic modulus convention.
        assert_close(val, 5.8698488373577086, 1e-10);
        for r in [0.1, 0.5, 0.9] {
            let v = eikonal_loop_integral(&Momentum::new(r, 0.0)).unwrap();
            assert!(v > 0.1, "loop integral {v} at R = {r}");
        }
        assert!(eikonal_loop_integral(&Momentum::new(1.0, 0.0)).is_err());
    }
}
