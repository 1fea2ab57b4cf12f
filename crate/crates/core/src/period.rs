//! Traverse times and planar displacements of the reduced dynamics, computed
//! as quadratures in the angle rather than by integrating in time.
//!
//! On the unit-speed level `p_theta = +/- sqrt(1 - R^2 cos^2(theta - delta))`,
//! so time along one monotone traverse is
//!
//! ```text
//! L = integral d theta / sqrt(1 - R^2 cos^2(theta - delta))
//! ```
//!
//! over the full circle when `R < 1` and over a Hill interval when `R > 1`,
//! and the planar displacement accumulates `R cos(theta - delta)`
//! `(cos theta, sin theta)` against the same measure. For `R > 1` the
//! integrand has inverse square-root endpoint singularities; the
//! substitution `R cos(theta - delta) = sin psi` removes them and leaves an
//! analytic integrand on `[-pi/2, pi/2]`. The integrals are complete
//! elliptic; tests pin them against an independent AGM evaluation.

use crate::error::{Error, Result};
use crate::flow::{lift_geodesic, GeodesicArc};
use crate::momentum::{
    hill_interval_containing, resolve_interval, HillInterval, IntervalKind, Momentum, ReducedState,
};
use crate::quadrature::{simpson_adaptive, trapezoid_periodic};
use crate::se2::Pose;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Momenta with `|R - 1|` below this are rejected by the quadratures; the
/// period diverges logarithmically at the separatrix.
pub const SEPARATRIX_GUARD: f64 = 1e-6;

/// One Hill traverse: its time and planar displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodData {
    pub interval: HillInterval,
    /// Traverse time `L`.
    pub l: f64,
    pub dx: f64,
    pub dy: f64,
}

fn guard_separatrix(mu: &Momentum) -> Result<()> {
    let gap = (mu.r() - 1.0).abs();
    if gap < SEPARATRIX_GUARD {
        return Err(Error::SeparatrixPeriod { gap });
    }
    Ok(())
}

/// Maps the caller's interval onto this momentum's own, rejecting kinds that
/// do not match the regime (`FullCircle` needs `R < 1`, arcs need `R > 1`).
fn checked_interval(mu: &Momentum, which: &HillInterval) -> Result<HillInterval> {
    let iv = resolve_interval(mu, which)?;
    let wants_full = mu.r() < 1.0;
    let is_full = iv.kind == IntervalKind::FullCircle;
    if wants_full != is_full {
        return Err(Error::InconsistentInterval { r: mu.r() });
    }
    Ok(iv)
}

/// Quadrature of `g(theta) / sqrt(1 - R^2 cos^2(theta - delta))` over one
/// traverse of `iv`, positively oriented.
///
/// For `R < 1` the integrand is periodic and analytic: trapezoid. For
/// `R > 1` the angle is reparametrized by `R cos(theta - delta) = sin psi`,
/// under which the measure becomes `d psi / (R sqrt(1 - sin^2 psi / R^2))`
/// and `theta = delta + arccos(sin psi / R)` on `I1` (the mirror image on
/// `I2`): adaptive Simpson on an analytic integrand.
fn traverse_quadrature(mu: &Momentum, iv: &HillInterval, g: impl Fn(f64) -> f64) -> f64 {
    let (r, d) = (mu.r(), mu.delta());
    if iv.kind == IntervalKind::FullCircle {
        trapezoid_periodic(
            |th| g(th) / (1.0 - r * r * (th - d).cos().powi(2)).sqrt(),
            TAU,
            1 << 10,
            1e-13,
        )
    } else {
        let scale = FRAC_PI_2 / r;
        let f = |psi: f64| {
            let q = psi.sin() / r;
            let u = q.clamp(-1.0, 1.0).acos();
            let theta = if iv.kind == IntervalKind::I1 {
                d + u
            } else {
                d + TAU - u
            };
            g(theta) / (r * (1.0 - q * q).sqrt())
        };
        simpson_adaptive(&f, -FRAC_PI_2, FRAC_PI_2, (1e-12 * scale).max(1e-15))
    }
}

/// Time of one positively oriented traverse of the Hill interval.
///
/// Rejects momenta inside [`SEPARATRIX_GUARD`] and intervals that do not
/// belong to `mu`.
pub fn theta_period(mu: &Momentum, which: &HillInterval) -> Result<f64> {
    guard_separatrix(mu)?;
    let iv = checked_interval(mu, which)?;
    Ok(traverse_quadrature(mu, &iv, |_| 1.0))
}

/// Planar displacement `(dx, dy)` accumulated over one traverse.
///
/// The displacement integrand is invariant under `theta -> theta + pi`, so
/// both Hill intervals of an `R > 1` momentum produce the same value; it is
/// also parallel to `(cos delta, sin delta)`.
pub fn period_displacement(mu: &Momentum, which: &HillInterval) -> Result<(f64, f64)> {
    guard_separatrix(mu)?;
    let iv = checked_interval(mu, which)?;
    if mu.r() == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (r, d) = (mu.r(), mu.delta());
    let dx = traverse_quadrature(mu, &iv, |th| r * (th - d).cos() * th.cos());
    let dy = traverse_quadrature(mu, &iv, |th| r * (th - d).cos() * th.sin());
    Ok((dx, dy))
}

/// Assembles the traverse time and displacement of one interval.
pub fn period_data(mu: &Momentum, which: &HillInterval) -> Result<PeriodData> {
    let iv = checked_interval(mu, which)?;
    let l = theta_period(mu, &iv)?;
    let (dx, dy) = period_displacement(mu, &iv)?;
    Ok(PeriodData {
        interval: iv,
        l,
        dx,
        dy,
    })
}

/// The full period of the reduced orbit: time for `(p_theta, theta)` to
/// return to its starting point.
///
/// For `R < 1` the heading is monotone and one full circle closes the
/// orbit; for `R > 1` the heading sweeps the Hill interval up and back, so
/// the reduced period is twice the traverse time.
pub fn reduced_period(mu: &Momentum) -> Result<f64> {
    guard_separatrix(mu)?;
    let ivs = crate::momentum::hill_intervals(mu);
    if mu.r() < 1.0 {
        theta_period(mu, &ivs[0])
    } else {
        Ok(2.0 * theta_period(mu, &ivs[0])?)
    }
}

/// Outcome of comparing two same-interval geodesics over one reduced period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementReport {
    /// The integration horizon: the reduced period of `mu`.
    pub time: f64,
    pub disp_a: (f64, f64),
    pub disp_b: (f64, f64),
    /// Euclidean distance between the two displacements.
    pub gap: f64,
    pub passed: bool,
}

/// Tolerance under which two displacements count as equal.
pub const DISPLACEMENT_TOL: f64 = 1e-7;

/// Integrates two unit-speed geodesics with the same momentum over one full
/// reduced period and compares their planar displacements, which must agree
/// no matter where on the orbit each starts.
pub fn displacement_independence_check(
    mu: &Momentum,
    r0a: &ReducedState,
    r0b: &ReducedState,
) -> Result<DisplacementReport> {
    for r0 in [r0a, r0b] {
        if r0.p_theta == 0.0 {
            return Err(Error::TurningPointStart);
        }
    }
    let iv_a = hill_interval_containing(mu, r0a.theta);
    let iv_b = hill_interval_containing(mu, r0b.theta);
    match (iv_a, iv_b) {
        (Some(a), Some(b)) if a.kind == b.kind => {}
        (Some(_), Some(_)) => return Err(Error::DifferentHillIntervals),
        _ => {
            return Err(Error::Precondition(
                "reduced state outside the Hill region".into(),
            ))
        }
    }
    let time = reduced_period(mu)?;
    let displacement = |r0: &ReducedState| -> Result<(f64, f64)> {
        let arc = lift_geodesic(mu, r0, &Pose::identity(), time, 1e-8)?;
        let end = arc.final_state();
        Ok((end.x, end.y))
    };
    let disp_a = displacement(r0a)?;
    let disp_b = displacement(r0b)?;
    let gap = (disp_a.0 - disp_b.0).hypot(disp_a.1 - disp_b.1);
    Ok(DisplacementReport {
        time,
        disp_a,
        disp_b,
        gap,
        passed: gap <= DISPLACEMENT_TOL,
    })
}

/// Decides periodicity of the geodesics with momentum `mu` in the group.
///
/// Returns the verdict and the obstruction witness
///
/// ```text
/// w = integral R^2 cos^2(theta - delta) / sqrt(1 - R^2 cos^2(theta - delta)) d theta
/// ```
///
/// over one traverse: `w` is the forward-speed energy accumulated by the
/// heading, strictly positive unless `R = 0`, and exactly the obstruction to
/// the plane curve closing up. Only `R = 0` geodesics are periodic.
pub fn is_periodic(mu: &Momentum) -> Result<(bool, f64)> {
    if mu.r() == 0.0 {
        return Ok((true, 0.0));
    }
    guard_separatrix(mu)?;
    let (r, d) = (mu.r(), mu.delta());
    let iv = crate::momentum::hill_intervals(mu)[0];
    let witness = traverse_quadrature(mu, &iv, |th| {
        let c = (th - d).cos();
        r * r * c * c
    });
    Ok((false, witness))
}

/// Returns the lifted arc of one reduced period, a convenience for callers
/// that want the closed reduced orbit with its open planar shadow.
pub fn one_period_arc(mu: &Momentum, r0: &ReducedState) -> Result<GeodesicArc> {
    let time = reduced_period(mu)?;
    lift_geodesic(mu, r0, &Pose::identity(), time, 1e-8)
}
