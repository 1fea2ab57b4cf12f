//! The geodesic flow, twice.
//!
//! The full flow integrates the canonical equations of the sub-Riemannian
//! Hamiltonian `H = (P_theta^2 + P_u^2)/2` on the cotangent bundle:
//!
//! ```text
//! theta' = p_theta        p_theta' = -P_u P_v
//! x'     = P_u cos theta  p_x'     = 0
//! y'     = P_u sin theta  p_y'     = 0
//! ```
//!
//! The reduced route integrates the pendulum on `(p_theta, theta)` and
//! recovers the plane motion from `x' = R cos(theta - delta) cos theta`,
//! `y' = R cos(theta - delta) sin theta`. Both produce a [`GeodesicArc`]
//! carrying sampled cotangent states, conserved-quantity drift bounds, and
//! the orbit classification.

use crate::error::{Error, Result};
use crate::momentum::{self, momentum_from_cartesian, Momentum, ReducedState};
use crate::ode::{integrate_adaptive, integrate_fixed, Method};
use crate::se2::{angle_gap, Pose, TangentVector};
use std::f64::consts::PI;

/// How far off the unit-speed level the full flow and classification accept
/// initial data.
pub const ON_LEVEL_TOL: f64 = 1e-9;

/// Stricter level tolerance demanded of reduced initial data before lifting.
pub const REDUCED_LEVEL_TOL: f64 = 1e-10;

/// A point of the cotangent bundle in canonical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentState {
    pub p_theta: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub theta: f64,
    pub x: f64,
    pub y: f64,
}

impl CotangentState {
    /// Linear-in-fibre momentum `P_u`, the pairing with the forward field.
    pub fn momentum_u(&self) -> f64 {
        let (s, c) = self.theta.sin_cos();
        self.p_x * c + self.p_y * s
    }

    /// Linear-in-fibre momentum `P_v`, the pairing with the sideways field.
    pub fn momentum_v(&self) -> f64 {
        let (s, c) = self.theta.sin_cos();
        -self.p_x * s + self.p_y * c
    }

    /// The sub-Riemannian Hamiltonian `(P_theta^2 + P_u^2)/2`.
    pub fn energy(&self) -> f64 {
        let pu = self.momentum_u();
        0.5 * (self.p_theta * self.p_theta + pu * pu)
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.theta, self.x, self.y)
    }

    pub fn reduced(&self) -> ReducedState {
        ReducedState::new(self.p_theta, self.theta)
    }

    /// The conserved planar momentum in polar form.
    pub fn momentum(&self) -> Momentum {
        momentum_from_cartesian(self.p_x, self.p_y)
    }

    fn is_finite(&self) -> bool {
        [self.p_theta, self.p_x, self.p_y, self.theta, self.x, self.y]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Orbit type of the reduced dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dynamical {
    /// An equilibrium of the separatrix level: straight line in the plane.
    Line,
    /// A separatrix orbit limiting onto two equilibria.
    Heteroclinic,
    /// Any `R != 1` orbit; the heading is periodic in time.
    ThetaPeriodic,
}

/// Whether the planar curvature `p_theta` changes sign along the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inflectional {
    Inflection,
    NonInflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeodesicClass {
    pub dynamical: Dynamical,
    pub inflectional: Inflectional,
}

/// Classifies the unit-speed geodesic through the reduced state `r0`.
///
/// Lines are the `R = 1` equilibria (`p_theta = 0` and `theta` at an
/// equilibrium angle, both to `1e-10`); every other `R = 1` state is
/// heteroclinic. Curvature changes sign exactly when `R > 1`.
pub fn classify_geodesic(mu: &Momentum, r0: &ReducedState) -> Result<GeodesicClass> {
    let residual = momentum::on_level_residual(mu, r0);
    if residual > ON_LEVEL_TOL {
        return Err(Error::OffLevel { residual });
    }
    let dynamical = if mu.r() == 1.0 {
        let eq_gap = angle_gap(r0.theta, mu.delta()).min(angle_gap(r0.theta, mu.delta() + PI));
        if r0.p_theta.abs() < 1e-10 && eq_gap < 1e-10 {
            Dynamical::Line
        } else {
            Dynamical::Heteroclinic
        }
    } else {
        Dynamical::ThetaPeriodic
    };
    let inflectional = if mu.r() > 1.0 {
        Inflectional::Inflection
    } else {
        Inflectional::NonInflection
    };
    Ok(GeodesicClass {
        dynamical,
        inflectional,
    })
}

/// Integrator configuration for the flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub method: Method,
    /// Keep every k-th integration step as a sample.
    pub sample_every: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            method: Method::default(),
            sample_every: 10,
        }
    }
}

/// A sampled geodesic with its conserved-quantity report.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicArc {
    pub mu: Momentum,
    pub classification: GeodesicClass,
    /// `(t, state)` samples; the first is the initial condition and the last
    /// sits exactly at the requested horizon.
    pub samples: Vec<(f64, CotangentState)>,
    /// Largest `|H - H(0)|` over the samples.
    pub energy_drift: f64,
    /// Largest planar-momentum displacement over the samples.
    pub momentum_drift: f64,
}

impl GeodesicArc {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn initial(&self) -> &CotangentState {
        &self.samples[0].1
    }

    pub fn final_state(&self) -> &CotangentState {
        &self.samples[self.samples.len() - 1].1
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    /// The geodesic's velocity at sample `i`:
    /// `p_theta X_theta + P_u X_u`, expressed in coordinates. Horizontal by
    /// construction.
    pub fn velocity(&self, i: usize) -> TangentVector {
        let s = &self.samples[i].1;
        let pu = s.momentum_u();
        let (sin_th, cos_th) = s.theta.sin_cos();
        TangentVector {
            base: s.pose(),
            c_theta: s.p_theta,
            c_x: pu * cos_th,
            c_y: pu * sin_th,
        }
    }
}

fn canonical_rhs(_t: f64, y: &[f64; 6]) -> [f64; 6] {
    let [p_th, p_x, p_y, th, _, _] = *y;
    let (s, c) = th.sin_cos();
    let pu = p_x * c + p_y * s;
    let pv = -p_x * s + p_y * c;
    [-pu * pv, 0.0, 0.0, p_th, pu * c, pu * s]
}

fn run_integrator<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_end: f64,
    opts: &FlowOptions,
    sink: impl FnMut(f64, &[f64; N]),
) -> Result<()> {
    match opts.method {
        Method::Rk4 { step } => {
            integrate_fixed(f, y0, t_end, step, opts.sample_every, sink);
            Ok(())
        }
        Method::Rkf45 { tol } => integrate_adaptive(f, y0, t_end, tol, opts.sample_every, sink),
    }
}

/// Integrates the canonical geodesic equations from a unit-speed cotangent
/// state over `[0, t_end]` with default options.
///
/// `drift_tol` bounds the accepted energy and momentum drift; exceeding it
/// is an error rather than a silent degradation.
pub fn full_flow(s0: &CotangentState, t_end: f64, drift_tol: f64) -> Result<GeodesicArc> {
    full_flow_with(s0, t_end, drift_tol, &FlowOptions::default())
}

pub fn full_flow_with(
    s0: &CotangentState,
    t_end: f64,
    drift_tol: f64,
    opts: &FlowOptions,
) -> Result<GeodesicArc> {
    if !s0.is_finite() {
        return Err(Error::Precondition(
            "initial cotangent state must be finite".into(),
        ));
    }
    let residual = (s0.energy() - 0.5).abs();
    if residual > ON_LEVEL_TOL {
        return Err(Error::OffLevel { residual });
    }
    let mu = s0.momentum();
    let classification = classify_geodesic(&mu, &s0.reduced())?;

    let y0 = [s0.p_theta, s0.p_x, s0.p_y, s0.theta, s0.x, s0.y];
    let mut samples = Vec::new();
    run_integrator(&canonical_rhs, y0, t_end, opts, |t, y| {
        samples.push((
            t,
            CotangentState {
                p_theta: y[0],
                p_x: y[1],
                p_y: y[2],
                theta: y[3],
                x: y[4],
                y: y[5],
            },
        ));
    })?;

    let h0 = s0.energy();
    let mut energy_drift = 0.0f64;
    let mut momentum_drift = 0.0f64;
    for (_, s) in &samples {
        energy_drift = energy_drift.max((s.energy() - h0).abs());
        momentum_drift = momentum_drift.max((s.p_x - s0.p_x).hypot(s.p_y - s0.p_y));
    }
    let max_drift = energy_drift.max(momentum_drift);
    if max_drift > drift_tol {
        return Err(Error::DriftExceeded {
            drift: max_drift,
            tol: drift_tol,
        });
    }
    Ok(GeodesicArc {
        mu,
        classification,
        samples,
        energy_drift,
        momentum_drift,
    })
}

/// Integrates the reduced pendulum and lifts it horizontally.
///
/// The initial pose is `(r0.theta, g0.x, g0.y)`: the heading is part of the
/// reduced data, so only the planar base point of `g0` is used. The planar
/// momentum covector is reconstructed from `mu`, making the result directly
/// comparable with [`full_flow`].
pub fn lift_geodesic(
    mu: &Momentum,
    r0: &ReducedState,
    g0: &Pose,
    t_end: f64,
    drift_tol: f64,
) -> Result<GeodesicArc> {
    lift_geodesic_with(mu, r0, g0, t_end, drift_tol, &FlowOptions::default())
}

pub fn lift_geodesic_with(
    mu: &Momentum,
    r0: &ReducedState,
    g0: &Pose,
    t_end: f64,
    drift_tol: f64,
    opts: &FlowOptions,
) -> Result<GeodesicArc> {
    if !(r0.p_theta.is_finite() && r0.theta.is_finite() && g0.x.is_finite() && g0.y.is_finite()) {
        return Err(Error::Precondition(
            "initial reduced data must be finite".into(),
        ));
    }
    let residual = momentum::on_level_residual(mu, r0);
    if residual > REDUCED_LEVEL_TOL {
        return Err(Error::OffLevel { residual });
    }
    let classification = classify_geodesic(mu, r0)?;
    let (a, b) = mu.cartesian();
    let (r, d) = (mu.r(), mu.delta());

    let rhs = move |_t: f64, y: &[f64; 4]| {
        let [p, th, _, _] = *y;
        let (su, cu) = (th - d).sin_cos();
        let (s_th, c_th) = th.sin_cos();
        let pu = r * cu;
        [r * r * cu * su, p, pu * c_th, pu * s_th]
    };

    let y0 = [r0.p_theta, r0.theta, g0.x, g0.y];
    let mut samples = Vec::new();
    run_integrator(&rhs, y0, t_end, opts, |t, y| {
        samples.push((
            t,
            CotangentState {
                p_theta: y[0],
                p_x: a,
                p_y: b,
                theta: y[1],
                x: y[2],
                y: y[3],
            },
        ));
    })?;

    let h0 = samples[0].1.energy();
    let mut energy_drift = 0.0f64;
    for (_, s) in &samples {
        energy_drift = energy_drift.max((s.energy() - h0).abs());
    }
    if energy_drift > drift_tol {
        return Err(Error::DriftExceeded {
            drift: energy_drift,
            tol: drift_tol,
        });
    }
    Ok(GeodesicArc {
        mu: *mu,
        classification,
        samples,
        energy_drift,
        momentum_drift: 0.0,
    })
}

/// The planar projection `(t, x, y)` of the sampled arc.
pub fn planar_projection(arc: &GeodesicArc) -> Vec<(f64, f64, f64)> {
    arc.samples.iter().map(|(t, s)| (*t, s.x, s.y)).collect()
}

/// Forward speed below which a sample is too close to a cusp for the
/// curvature stencil.
pub const CUSP_SPEED_TOL: f64 = 1e-6;

/// Finite-difference curvature of the planar projection.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurvature {
    /// `(t, kappa)` at the interior samples where the stencil is clean.
    pub samples: Vec<(f64, f64)>,
    /// Interior sample indices excluded because the stencil touches a cusp.
    pub excluded: Vec<usize>,
}

/// Differentiates the planar unit tangent through each interior sample.
///
/// The unit tangent is the direction of `(x', y')`, which flips across
/// cusps of the projection, so any stencil containing `|P_u| <`
/// [`CUSP_SPEED_TOL`] or a sign change of `P_u` is excluded rather than
/// reported as garbage. On clean stencils the result equals `p_theta`, the
/// curvature of the projection in the time parametrization.
pub fn planar_curvature(arc: &GeodesicArc) -> PlanarCurvature {
    let mut out = PlanarCurvature {
        samples: Vec::new(),
        excluded: Vec::new(),
    };
    let n = arc.samples.len();
    for i in 1..n.saturating_sub(1) {
        let window = [
            &arc.samples[i - 1].1,
            &arc.samples[i].1,
            &arc.samples[i + 1].1,
        ];
        let speeds = window.map(CotangentState::momentum_u);
        let cusp = speeds.iter().any(|pu| pu.abs() < CUSP_SPEED_TOL)
            || speeds[0].signum() != speeds[1].signum()
            || speeds[1].signum() != speeds[2].signum();
        if cusp {
            out.excluded.push(i);
            continue;
        }
        let tangent = |j: usize| {
            let s = window[j];
            let (sin_th, cos_th) = s.theta.sin_cos();
            let sg = speeds[j].signum();
            (sg * cos_th, sg * sin_th)
        };
        let (tx0, ty0) = tangent(0);
        let (tx2, ty2) = tangent(2);
        let dt = arc.samples[i + 1].0 - arc.samples[i - 1].0;
        let s1 = window[1];
        let (sin_th, cos_th) = s1.theta.sin_cos();
        let sg = speeds[1].signum();
        let (nx, ny) = (-sg * sin_th, sg * cos_th);
        let kappa = (nx * (tx2 - tx0) + ny * (ty2 - ty0)) / dt;
        out.samples.push((arc.samples[i].0, kappa));
    }
    out
}
