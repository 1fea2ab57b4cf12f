//! Sub-Riemannian geometry of the roto-translation group SE(2).
//!
//! The metric lives on the rank-two distribution spanned by the rotation
//! field and the forward translation field, so admissible curves are planar
//! paths traversed at unit speed whose heading is free to rotate. Geodesics
//! are governed by a pendulum: the heading's fibre momentum and angle obey
//! `p_theta' = R^2 cos(theta - delta) sin(theta - delta)`, where `(R, delta)`
//! are polar coordinates of the conserved planar momentum, and the plane
//! motion is recovered by a horizontal lift.
//!
//! The crate provides:
//!
//! - [`se2`]: the group, its left-invariant frame and coframe, and the
//!   sub-Riemannian inner product;
//! - [`momentum`]: the momentum map, the reduced pendulum system, Hill
//!   intervals and unit-level classification;
//! - [`flow`]: the full cotangent geodesic flow and the reduced-then-lifted
//!   flow, together with geodesic classification and planar curvature;
//! - [`period`]: the traverse time and planar displacement of one Hill
//!   excursion as quadratures, and the periodicity test they decide;
//! - [`calibration`]: eikonal calibration functions, their horizontal
//!   gradients, and the Mane critical value;
//! - [`minimality`]: cut witnesses, conjugate points along bang arcs, and
//!   the metric-line certifier.

pub mod calibration;
pub mod error;
pub mod flow;
pub mod minimality;
pub mod momentum;
pub mod ode;
pub mod period;
pub mod quadrature;
pub mod se2;

pub use calibration::{CalibrationFunction, CalibrationReport, Sign};
pub use error::{Error, Result};
pub use flow::{CotangentState, Dynamical, GeodesicArc, GeodesicClass, Inflectional};
pub use minimality::{CutEvidence, MetricLineReason, MetricLineVerdict};
pub use momentum::{HillInterval, IntervalKind, LevelSetShape, Momentum, ReducedState};
pub use period::PeriodData;
pub use se2::{Covector, Pose, TangentVector};
