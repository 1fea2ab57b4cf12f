//! Momentum-map reduction of the geodesic flow.
//!
//! The planar momentum `(p_x, p_y)` is conserved; writing it in polar form
//! `(a, b) = (R cos delta, R sin delta)` reduces the geodesic equations to a
//! pendulum on the `(p_theta, theta)` cylinder with Hamiltonian
//!
//! ```text
//! H_mu = (p_theta^2 + R^2 cos^2(theta - delta)) / 2.
//! ```
//!
//! Unit-speed geodesics live on the level `H_mu = 1/2`. The angles where
//! `R^2 cos^2(theta - delta) <= 1` form the Hill region: the whole circle
//! for `R <= 1`, and two symmetric arcs (Hill intervals) for `R > 1`. The
//! shape of the level set changes across `R = 1`, and that bifurcation is
//! what separates oscillating headings from monotone ones.

use crate::error::{Error, Result};
use crate::se2::normalize_angle;
use std::f64::consts::{PI, TAU};

/// Width of the warning band around the separatrix circle `R = 1`.
///
/// Classification compares `R` to 1 exactly; momenta inside this band that
/// are not exactly on it are almost certainly rounding casualties, and
/// [`Momentum::near_separatrix`] flags them so callers can warn.
pub const SEPARATRIX_WARN_BAND: f64 = 1e-9;

/// The conserved planar momentum in polar form.
///
/// Invariants: `r >= 0`, `delta` in `[0, 2*pi)`, and `delta = 0` when
/// `r = 0`. Construct via [`Momentum::new`] or
/// [`momentum_from_cartesian`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum {
    r: f64,
    delta: f64,
}

impl Momentum {
    pub fn new(r: f64, delta: f64) -> Self {
        assert!(
            r.is_finite() && r >= 0.0,
            "momentum radius must be finite and nonnegative"
        );
        assert!(delta.is_finite(), "momentum angle must be finite");
        let delta = if r == 0.0 {
            0.0
        } else {
            normalize_angle(delta)
        };
        Momentum { r, delta }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Cartesian components `(a, b) = (R cos delta, R sin delta)`.
    pub fn cartesian(&self) -> (f64, f64) {
        (self.r * self.delta.cos(), self.r * self.delta.sin())
    }

    /// True when `R` is within [`SEPARATRIX_WARN_BAND`] of 1 without being
    /// exactly 1.
    pub fn near_separatrix(&self) -> bool {
        self.r != 1.0 && (self.r - 1.0).abs() < SEPARATRIX_WARN_BAND
    }
}

/// Builds the polar momentum from Cartesian components.
pub fn momentum_from_cartesian(a: f64, b: f64) -> Momentum {
    let r = a.hypot(b);
    let delta = if r == 0.0 {
        0.0
    } else {
        normalize_angle(b.atan2(a))
    };
    Momentum::new(r, delta)
}

/// A point of the reduced phase cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub p_theta: f64,
    pub theta: f64,
}

impl ReducedState {
    pub fn new(p_theta: f64, theta: f64) -> Self {
        ReducedState { p_theta, theta }
    }
}

/// The reduced pendulum Hamiltonian.
pub fn reduced_hamiltonian(mu: &Momentum, s: &ReducedState) -> f64 {
    let c = (s.theta - mu.delta()).cos();
    0.5 * (s.p_theta * s.p_theta + mu.r() * mu.r() * c * c)
}

/// Residual `|H_mu - 1/2|` measuring how far a state is from unit speed.
pub fn on_level_residual(mu: &Momentum, s: &ReducedState) -> f64 {
    (reduced_hamiltonian(mu, s) - 0.5).abs()
}

/// The reduced equations of motion `(p_theta', theta')`.
pub fn reduced_vector_field(mu: &Momentum, s: &ReducedState) -> (f64, f64) {
    let (su, cu) = (s.theta - mu.delta()).sin_cos();
    (mu.r() * mu.r() * cu * su, s.p_theta)
}

/// The nonnegative root `sqrt(1 - R^2 cos^2(theta - delta))` of the
/// unit-speed level, clamped at zero outside the Hill region.
pub fn level_p_theta(mu: &Momentum, theta: f64) -> f64 {
    let c = (theta - mu.delta()).cos();
    (1.0 - mu.r() * mu.r() * c * c).max(0.0).sqrt()
}

/// Which connected piece of the Hill region an interval describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalKind {
    I1,
    I2,
    FullCircle,
}

/// A connected component of the Hill region `{R^2 cos^2(theta - delta) <= 1}`.
///
/// `lo` is normalized to `[0, 2*pi)`; `hi = lo + width` may exceed `2*pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillInterval {
    pub lo: f64,
    pub hi: f64,
    pub kind: IntervalKind,
}

impl HillInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Whether the circle point `theta` lies in the interval, up to `tol`.
    pub fn contains(&self, theta: f64, tol: f64) -> bool {
        if self.kind == IntervalKind::FullCircle {
            return true;
        }
        let rel = normalize_angle(theta - self.lo);
        rel <= self.width() + tol || rel >= TAU - tol
    }
}

/// The connected components of the Hill region, in a deterministic order.
///
/// For `R <= 1` the region is the whole circle; for `R = 1` it is split at
/// the two equilibria so that each piece carries one lobe of the figure
/// eight; for `R > 1` the two proper arcs around `delta + pi/2` and
/// `delta + 3*pi/2` are returned.
pub fn hill_intervals(mu: &Momentum) -> Vec<HillInterval> {
    let r = mu.r();
    let d = mu.delta();
    if r < 1.0 {
        vec![HillInterval {
            lo: 0.0,
            hi: TAU,
            kind: IntervalKind::FullCircle,
        }]
    } else {
        let u0 = if r == 1.0 { 0.0 } else { (1.0 / r).acos() };
        let width = PI - 2.0 * u0;
        let lo1 = normalize_angle(d + u0);
        let lo2 = normalize_angle(d + u0 + PI);
        vec![
            HillInterval {
                lo: lo1,
                hi: lo1 + width,
                kind: IntervalKind::I1,
            },
            HillInterval {
                lo: lo2,
                hi: lo2 + width,
                kind: IntervalKind::I2,
            },
        ]
    }
}

/// The component of the Hill region containing `theta`, if any.
pub fn hill_interval_containing(mu: &Momentum, theta: f64) -> Option<HillInterval> {
    hill_intervals(mu)
        .into_iter()
        .find(|iv| iv.contains(theta, 1e-9))
}

/// Topology of the unit-speed level set on the phase cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelSetShape {
    /// `R > 1`: two ovals over the Hill intervals.
    TwoContractibleOvals,
    /// `R = 1`: the separatrix pair of lobes through the equilibria.
    FigureEight,
    /// `R < 1`: two loops winding around the cylinder.
    TwoNonContractibleLoops,
}

/// Classifies the unit-speed level set. `R` is compared to 1 exactly; use
/// [`Momentum::near_separatrix`] to detect suspicious proximity.
pub fn classify_level_set(mu: &Momentum) -> LevelSetShape {
    if mu.r() > 1.0 {
        LevelSetShape::TwoContractibleOvals
    } else if mu.r() == 1.0 {
        LevelSetShape::FigureEight
    } else {
        LevelSetShape::TwoNonContractibleLoops
    }
}

/// One connected branch of the sampled level set.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetBranch {
    pub interval: HillInterval,
    /// Sign of `p_theta` along the branch: `+1.0` or `-1.0`.
    pub sign: f64,
    pub states: Vec<ReducedState>,
}

/// Samples the unit-speed level set with `n` points per branch.
///
/// Branches are ordered interval-first (`I1` before `I2`), positive root
/// before negative. Full-circle branches sample `[0, 2*pi)` uniformly
/// without the duplicate endpoint; arc branches include both endpoints.
pub fn sample_level_set(mu: &Momentum, n: usize) -> Vec<LevelSetBranch> {
    assert!(n >= 2, "need at least two sample points per branch");
    let mut branches = Vec::new();
    for iv in hill_intervals(mu) {
        for sign in [1.0, -1.0] {
            let states = (0..n)
                .map(|j| {
                    let theta = if iv.kind == IntervalKind::FullCircle {
                        iv.lo + iv.width() * j as f64 / n as f64
                    } else {
                        iv.lo + iv.width() * j as f64 / (n - 1) as f64
                    };
                    ReducedState {
                        p_theta: sign * level_p_theta(mu, theta),
                        theta,
                    }
                })
                .collect();
            branches.push(LevelSetBranch {
                interval: iv,
                sign,
                states,
            });
        }
    }
    branches
}

/// Checks that a caller-supplied interval matches this momentum, returning
/// the authoritative copy used by quadratures.
pub fn resolve_interval(mu: &Momentum, which: &HillInterval) -> Result<HillInterval> {
    let err = Error::InconsistentInterval { r: mu.r() };
    let own = hill_intervals(mu);
    let found = own
        .into_iter()
        .find(|iv| iv.kind == which.kind)
        .ok_or(err.clone())?;
    if (found.lo - which.lo).abs() > 1e-9 || (found.hi - which.hi).abs() > 1e-9 {
        return Err(err);
    }
    Ok(found)
}
