//! Minimality certificates and their failures.
//!
//! Three mechanisms decide how long a geodesic minimizes:
//!
//! - a **cut witness**: two distinct equal-length geodesics joining the same
//!   endpoints, built from the reflection `p_theta -> -p_theta` and meeting
//!   after one full reduced period;
//! - a **conjugate point**: along an arc launched from a Hill endpoint the
//!   Jacobi-type field `W1 - W2` (initial-translation minus velocity)
//!   vanishes again one reduced period later;
//! - a **calibration**: separatrix geodesics (`R = 1`) pair with the global
//!   calibration function and therefore minimize on every interval, making
//!   them metric lines.
//!
//! [`certify_metric_line`] routes each unit-speed geodesic to the mechanism
//! that settles it.

use crate::calibration::{
    verify_calibration, CalibrationFunction, CalibrationReport, GlobalSeparatrix, Sign,
};
use crate::error::{Error, Result};
use crate::flow::{lift_geodesic_with, Dynamical, FlowOptions, GeodesicArc};
use crate::momentum::{hill_interval_containing, on_level_residual, Momentum, ReducedState};
use crate::ode::rk4_step;
use crate::period::{reduced_period, theta_period};
use crate::se2::{angle_gap, pose_gap, Pose};
use std::f64::consts::TAU;

/// Two equal-length geodesics with shared endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct CutWitness {
    /// The common length: one reduced period of the momentum.
    pub meeting_time: f64,
    /// Pose distance between the two endpoints at the meeting time.
    pub endpoint_gap: f64,
    /// Smallest pose distance between the curves at interior times, which
    /// must stay large for the witness to certify two distinct curves.
    pub min_mid_separation: f64,
    pub gamma: GeodesicArc,
    pub gamma_tilde: GeodesicArc,
}

fn fine_options() -> FlowOptions {
    FlowOptions {
        sample_every: 1,
        ..FlowOptions::default()
    }
}

/// Builds the reflected-pair cut witness for a non-turning unit-speed start.
///
/// `gamma` flows from `r0`, `gamma_tilde` from `(-p_theta, theta)`; both are
/// integrated for one reduced period, after which they occupy the same pose
/// while disagreeing in between. Degenerate momenta (`R = 0` periodic,
/// `R = 1` separatrix) and turning-point starts are rejected.
pub fn cut_witness(mu: &Momentum, r0: &ReducedState, g0: &Pose) -> Result<CutWitness> {
    if mu.r() == 0.0 {
        return Err(Error::PeriodicDegenerate);
    }
    if r0.p_theta.abs() <= 1e-12 {
        return Err(Error::TurningPointStart);
    }
    let residual = on_level_residual(mu, r0);
    if residual > crate::flow::REDUCED_LEVEL_TOL {
        return Err(Error::OffLevel { residual });
    }
    let meeting_time = reduced_period(mu)?;
    let opts = fine_options();
    let gamma = lift_geodesic_with(mu, r0, g0, meeting_time, 1e-8, &opts)?;
    let reflected = ReducedState::new(-r0.p_theta, r0.theta);
    let gamma_tilde = lift_geodesic_with(mu, &reflected, g0, meeting_time, 1e-8, &opts)?;

    let endpoint_gap = pose_gap(gamma.final_state().pose(), gamma_tilde.final_state().pose());
    let n = gamma.len().min(gamma_tilde.len());
    let mut min_mid_separation = f64::INFINITY;
    for j in 1..=100u64 {
        let idx = (j as usize * (n - 1)) / 101;
        if idx == 0 || idx >= n - 1 {
            continue;
        }
        let sep = pose_gap(
            gamma.samples[idx].1.pose(),
            gamma_tilde.samples[idx].1.pose(),
        );
        min_mid_separation = min_mid_separation.min(sep);
    }
    Ok(CutWitness {
        meeting_time,
        endpoint_gap,
        min_mid_separation,
        gamma,
        gamma_tilde,
    })
}

/// Result of scanning for a conjugate point from a Hill endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyReport {
    /// First time after zero where the comparison field vanishes.
    pub t_star: f64,
    /// One-way traverse time of the Hill interval containing the start.
    pub l_hill: f64,
    pub j_norm_at_zero: f64,
    pub j_norm_at_t_star: f64,
    /// Norm at (the sample nearest to) `t_star / 2`.
    pub j_norm_at_midpoint: f64,
    pub midpoint_nonvanishing: bool,
    /// How far the heading at `t_star` is from the initial heading.
    pub theta_return_gap: f64,
    /// Coarse `(t, |J|)` profile of the scan.
    pub profile: Vec<(f64, f64)>,
}

/// Norm of `J(t) = gamma'(0) - gamma'(t)` in frame components at matched
/// base points, the comparison field whose interior zeros mark conjugate
/// points of the bang arc.
fn j_norm(initial: &crate::flow::CotangentState, s: &crate::flow::CotangentState) -> f64 {
    let pu0 = initial.momentum_u();
    let pu = s.momentum_u();
    let (s0, c0) = initial.theta.sin_cos();
    let (st, ct) = s.theta.sin_cos();
    let j_theta = initial.p_theta - s.p_theta;
    let j_x = pu0 * c0 - pu * ct;
    let j_y = pu0 * s0 - pu * st;
    (j_theta * j_theta + j_x * j_x + j_y * j_y).sqrt()
}

/// Scans an oscillating geodesic launched at rest from a Hill endpoint for
/// its first conjugate point.
///
/// Candidates are the turning times of `p_theta`; each is refined by
/// bisection on the reduced flow and accepted when the comparison field
/// drops below `1e-6`. The first conjugate point sits one reduced period
/// out (the turn at the far endpoint leaves the field of size about the
/// interval's chord, so it is rejected and reported in the profile).
pub fn conjugate_point_check(mu: &Momentum, theta0: f64, g0: &Pose) -> Result<ConjugacyReport> {
    if mu.r() <= 1.0 {
        return Err(Error::Precondition(
            "conjugate-point scan needs an oscillating momentum (R > 1)".into(),
        ));
    }
    let c = (theta0 - mu.delta()).cos();
    let residual = (mu.r() * mu.r() * c * c - 1.0).abs();
    if residual > 1e-10 {
        return Err(Error::NotHillEndpoint { theta0, residual });
    }
    let iv =
        hill_interval_containing(mu, theta0).ok_or(Error::NotHillEndpoint { theta0, residual })?;
    let l_hill = theta_period(mu, &iv)?;
    let t_max = 2.0 * l_hill + 0.1;

    let r0 = ReducedState::new(0.0, theta0);
    let arc = lift_geodesic_with(mu, &r0, g0, t_max, 1e-8, &fine_options())?;
    let initial = *arc.initial();
    let norms: Vec<f64> = arc
        .samples
        .iter()
        .map(|(_, s)| j_norm(&initial, s))
        .collect();

    let (r, d) = (mu.r(), mu.delta());
    let reduced_rhs = move |_t: f64, y: &[f64; 2]| {
        let (su, cu) = (y[1] - d).sin_cos();
        [r * r * cu * su, y[0]]
    };
    let p_after = |start: [f64; 2], tau: f64| -> [f64; 2] {
        let mut y = start;
        let h = tau / 4.0;
        for k in 0..4 {
            y = rk4_step(&reduced_rhs, k as f64 * h, &y, h);
        }
        y
    };

    let mut found: Option<(f64, f64, f64)> = None;
    for i in 1..arc.len() - 1 {
        let p_i = arc.samples[i].1.p_theta;
        let p_next = arc.samples[i + 1].1.p_theta;
        if !(p_i > 0.0 && p_next <= 0.0 || p_i < 0.0 && p_next >= 0.0) {
            continue;
        }
        let t_i = arc.samples[i].0;
        let dt = arc.samples[i + 1].0 - t_i;
        let start = [p_i, arc.samples[i].1.theta];
        let (mut lo, mut hi) = (0.0f64, dt);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let p_mid = p_after(start, mid)[0];
            if p_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (p_mid > 0.0) == (p_i > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = 0.5 * (lo + hi);
        let y_star = p_after(start, tau);
        let state_star = crate::flow::CotangentState {
            p_theta: y_star[0],
            theta: y_star[1],
            ..initial
        };
        let j_here = j_norm(&initial, &state_star);
        if j_here <= 1e-6 {
            found = Some((t_i + tau, j_here, y_star[1]));
            break;
        }
    }

    let (t_star, j_norm_at_t_star, theta_star) =
        found.ok_or(Error::ConjugateScanFailed { t_max })?;
    let half_idx = arc
        .samples
        .iter()
        .position(|(t, _)| *t >= 0.5 * t_star)
        .unwrap_or(arc.len() - 1);
    let j_norm_at_midpoint = norms[half_idx];
    let stride = (arc.len() / 200).max(1);
    let profile = arc
        .samples
        .iter()
        .zip(&norms)
        .step_by(stride)
        .map(|((t, _), n)| (*t, *n))
        .collect();

    Ok(ConjugacyReport {
        t_star,
        l_hill,
        j_norm_at_zero: norms[0],
        j_norm_at_t_star,
        j_norm_at_midpoint,
        midpoint_nonvanishing: j_norm_at_midpoint >= 1e-3,
        theta_return_gap: angle_gap(theta_star, theta0),
        profile,
    })
}

/// Why a geodesic is a metric line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricLineReason {
    Line,
    Heteroclinic,
}

/// The evidence bounding a non-minimizing geodesic.
#[derive(Debug, Clone, PartialEq)]
pub enum CutEvidence {
    Witness(CutWitness),
    Conjugacy(ConjugacyReport),
    ClosedOrbit { period: f64, closure_gap: f64 },
}

/// Verdict of the certifier.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricLineVerdict {
    /// The geodesic minimizes between any two of its points, certified by a
    /// calibration that holds along the sampled arc.
    MetricLine {
        reason: MetricLineReason,
        calibration: CalibrationReport,
    },
    /// The geodesic stops minimizing at or before `bound`.
    NotMinimizingPast {
        bound: f64,
        evidence: Box<CutEvidence>,
    },
}

/// Horizon over which separatrix calibrations are spot-checked.
pub const METRIC_LINE_HORIZON: f64 = 20.0;

/// Random pairings drawn when verifying a certifying calibration.
pub const CERTIFY_RANDOM_DRAWS: usize = 1000;

/// Decides whether the unit-speed geodesic through `r0` is a metric line.
///
/// `R = 1` geodesics are certified by the global separatrix calibration on
/// the branch matching the initial turning direction. Everything else gets
/// explicit non-minimality evidence: a closed orbit for `R = 0`, a
/// conjugate point for turning-point starts with `R > 1`, and the reflected
/// cut witness otherwise. Momenta inside the separatrix guard band cannot
/// be certified either way and propagate the quadrature error.
pub fn certify_metric_line(
    mu: &Momentum,
    r0: &ReducedState,
    g0: &Pose,
    seed: u64,
) -> Result<MetricLineVerdict> {
    let residual = on_level_residual(mu, r0);
    if residual > crate::flow::REDUCED_LEVEL_TOL {
        return Err(Error::OffLevel { residual });
    }
    if mu.r() == 1.0 {
        let class = crate::flow::classify_geodesic(mu, r0)?;
        let reason = match class.dynamical {
            Dynamical::Line => MetricLineReason::Line,
            Dynamical::Heteroclinic => MetricLineReason::Heteroclinic,
            Dynamical::ThetaPeriodic => unreachable!("R = 1 orbits are never theta-periodic"),
        };
        let sign = Sign::of(r0.p_theta * (r0.theta - mu.delta()).sin());
        let cf = CalibrationFunction::Global(GlobalSeparatrix {
            delta: mu.delta(),
            sign,
        });
        let arc = lift_geodesic_with(
            mu,
            r0,
            g0,
            METRIC_LINE_HORIZON,
            1e-8,
            &FlowOptions::default(),
        )?;
        let calibration = verify_calibration(&cf, &arc, CERTIFY_RANDOM_DRAWS, seed)?;
        return Ok(MetricLineVerdict::MetricLine {
            reason,
            calibration,
        });
    }
    if mu.r() == 0.0 {
        let arc = lift_geodesic_with(mu, r0, g0, TAU, 1e-8, &FlowOptions::default())?;
        let closure_gap = pose_gap(arc.initial().pose(), arc.final_state().pose());
        return Ok(MetricLineVerdict::NotMinimizingPast {
            bound: TAU,
            evidence: Box::new(CutEvidence::ClosedOrbit {
                period: TAU,
                closure_gap,
            }),
        });
    }
    if r0.p_theta.abs() > 1e-12 {
        let witness = cut_witness(mu, r0, g0)?;
        return Ok(MetricLineVerdict::NotMinimizingPast {
            bound: witness.meeting_time,
            evidence: Box::new(CutEvidence::Witness(witness)),
        });
    }
    if mu.r() > 1.0 {
        let report = conjugate_point_check(mu, r0.theta, g0)?;
        return Ok(MetricLineVerdict::NotMinimizingPast {
            bound: report.t_star,
            evidence: Box::new(CutEvidence::Conjugacy(report)),
        });
    }
    Err(Error::Precondition(
        "R < 1 unit-speed states cannot be turning points".into(),
    ))
}
