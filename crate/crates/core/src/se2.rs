//! The roto-translation group SE(2) and its left-invariant calculus.
//!
//! A pose `(theta, x, y)` acts on the plane by rotating through `theta` and
//! translating by `(x, y)`. The left-invariant frame is
//!
//! ```text
//! X_theta = d/dtheta
//! X_u     =  cos(theta) d/dx + sin(theta) d/dy
//! X_v     = -sin(theta) d/dx + cos(theta) d/dy
//! ```
//!
//! with dual coframe `Theta_theta, Theta_u, Theta_v`. The sub-Riemannian
//! structure declares `{X_theta, X_u}` orthonormal and horizontal; `X_v` is
//! the missing direction, recovered by one bracket: `[X_theta, X_u] = X_v`.

use crate::error::{Error, Result};
use std::f64::consts::{PI, TAU};

/// Tolerance below which a `Theta_v` component counts as horizontal.
pub const HORIZONTAL_TOL: f64 = 1e-10;

/// A group element. The angle is stored unwrapped so that trajectories can
/// accumulate turns; only comparisons normalize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
}

impl Pose {
    pub fn new(theta: f64, x: f64, y: f64) -> Self {
        Pose { theta, x, y }
    }

    pub fn identity() -> Self {
        Pose {
            theta: 0.0,
            x: 0.0,
            y: 0.0,
        }
    }

    /// The same pose with its angle wrapped into `[0, 2*pi)`.
    pub fn normalized(self) -> Self {
        Pose {
            theta: normalize_angle(self.theta),
            ..self
        }
    }
}

/// A tangent vector at `base`, in coordinate components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: Pose,
    pub c_theta: f64,
    pub c_x: f64,
    pub c_y: f64,
}

impl TangentVector {
    /// Components against the left-invariant coframe:
    /// `(Theta_theta(v), Theta_u(v), Theta_v(v))`.
    pub fn frame_components(&self) -> (f64, f64, f64) {
        let (s, c) = self.base.theta.sin_cos();
        (
            self.c_theta,
            c * self.c_x + s * self.c_y,
            -s * self.c_x + c * self.c_y,
        )
    }

    /// Whether the vector lies in the distribution, up to `tol` in `Theta_v`.
    pub fn is_horizontal(&self, tol: f64) -> bool {
        self.frame_components().2.abs() <= tol
    }

    /// Builds the vector with the given frame components at `base`.
    pub fn from_frame(base: Pose, c_theta: f64, c_u: f64, c_v: f64) -> Self {
        let (s, c) = base.theta.sin_cos();
        TangentVector {
            base,
            c_theta,
            c_x: c * c_u - s * c_v,
            c_y: s * c_u + c * c_v,
        }
    }
}

/// A covector at `base`, in coordinate components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covector {
    pub base: Pose,
    pub p_theta: f64,
    pub p_x: f64,
    pub p_y: f64,
}

impl Covector {
    /// The natural pairing `<p, v>`. Both sides must sit at the same pose.
    pub fn pair(&self, v: &TangentVector) -> f64 {
        self.p_theta * v.c_theta + self.p_x * v.c_x + self.p_y * v.c_y
    }

    /// Momentum functions `(P_theta, P_u, P_v)`: the pairings with the frame.
    pub fn frame_momenta(&self) -> (f64, f64, f64) {
        let (s, c) = self.base.theta.sin_cos();
        (
            self.p_theta,
            c * self.p_x + s * self.p_y,
            -s * self.p_x + c * self.p_y,
        )
    }
}

/// Wraps an angle into `[0, 2*pi)`.
pub fn normalize_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w == TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_to_pi(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Distance between two angles on the circle.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    wrap_to_pi(a - b).abs()
}

/// The group law: rotate `h`'s translation by `g`'s angle, then add.
pub fn compose(g: Pose, h: Pose) -> Pose {
    let (s, c) = g.theta.sin_cos();
    Pose {
        theta: g.theta + h.theta,
        x: g.x + c * h.x - s * h.y,
        y: g.y + s * h.x + c * h.y,
    }
}

/// The group inverse.
pub fn inverse(g: Pose) -> Pose {
    let (s, c) = g.theta.sin_cos();
    Pose {
        theta: -g.theta,
        x: -(c * g.x + s * g.y),
        y: s * g.x - c * g.y,
    }
}

/// The left-invariant frame `(X_theta, X_u, X_v)` at `g`.
pub fn frame_at(g: Pose) -> (TangentVector, TangentVector, TangentVector) {
    let (s, c) = g.theta.sin_cos();
    (
        TangentVector {
            base: g,
            c_theta: 1.0,
            c_x: 0.0,
            c_y: 0.0,
        },
        TangentVector {
            base: g,
            c_theta: 0.0,
            c_x: c,
            c_y: s,
        },
        TangentVector {
            base: g,
            c_theta: 0.0,
            c_x: -s,
            c_y: c,
        },
    )
}

/// The dual coframe `(Theta_theta, Theta_u, Theta_v)` at `g`.
pub fn coframe_at(g: Pose) -> (Covector, Covector, Covector) {
    let (s, c) = g.theta.sin_cos();
    (
        Covector {
            base: g,
            p_theta: 1.0,
            p_x: 0.0,
            p_y: 0.0,
        },
        Covector {
            base: g,
            p_theta: 0.0,
            p_x: c,
            p_y: s,
        },
        Covector {
            base: g,
            p_theta: 0.0,
            p_x: -s,
            p_y: c,
        },
    )
}

/// The sub-Riemannian inner product of two horizontal vectors at one pose.
///
/// Fails if the bases differ or if either vector has a `Theta_v` component
/// above [`HORIZONTAL_TOL`].
pub fn sr_inner(v: &TangentVector, w: &TangentVector) -> Result<f64> {
    if v.base != w.base {
        return Err(Error::BaseMismatch);
    }
    let (vt, vu, vv) = v.frame_components();
    let (wt, wu, wv) = w.frame_components();
    if vv.abs() > HORIZONTAL_TOL {
        return Err(Error::NonHorizontal { theta_v: vv });
    }
    if wv.abs() > HORIZONTAL_TOL {
        return Err(Error::NonHorizontal { theta_v: wv });
    }
    Ok(vt * wt + vu * wu)
}

/// The sub-Riemannian norm of a horizontal vector.
pub fn sr_norm(v: &TangentVector) -> Result<f64> {
    sr_inner(v, v).map(f64::sqrt)
}

/// Pose distance used by witness checks: the larger of the wrapped angle gap
/// and the planar Euclidean distance.
pub fn pose_gap(g: Pose, h: Pose) -> f64 {
    let dth = angle_gap(g.theta, h.theta);
    let dxy = ((g.x - h.x).powi(2) + (g.y - h.y).powi(2)).sqrt();
    dth.max(dxy)
}
