//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Domain violations (off-level data, separatrix momenta, mismatched Hill
/// intervals) are distinguished from numerical failures (step underflow,
/// conservation drift) so callers can map them to different exit paths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A tangent vector sticks out of the distribution.
    #[error("vector outside the horizontal distribution: Theta_v component {theta_v:.3e}")]
    NonHorizontal { theta_v: f64 },

    /// Two vectors that must share a base pose do not.
    #[error("vectors are based at different poses")]
    BaseMismatch,

    /// Initial data does not lie on the required energy level.
    #[error("initial data off the unit-speed level: |H - 1/2| = {residual:.3e}")]
    OffLevel { residual: f64 },

    /// The momentum sits in the guard band around the separatrix circle.
    #[error("separatrix: period diverges (|R - 1| = {gap:.3e})")]
    SeparatrixPeriod { gap: f64 },

    /// A Hill interval argument does not belong to the given momentum.
    #[error("Hill interval inconsistent with momentum (R = {r})")]
    InconsistentInterval { r: f64 },

    /// Two reduced states expected on one Hill interval straddle two.
    #[error("reduced states lie on different Hill intervals")]
    DifferentHillIntervals,

    /// A pose's angle is outside the domain of a local calibration function.
    #[error("theta = {theta} is outside the Hill region of the calibration function")]
    OutsideHillRegion { theta: f64 },

    /// The arc's turning direction disagrees with the calibration branch.
    #[error("calibration sign mismatch along the arc (min dS(gamma') = {min_ds:.6})")]
    CalibrationSignMismatch { min_ds: f64 },

    /// Adaptive stepping drove the step size below its floor.
    #[error("step size underflow at t = {t_reached}")]
    StepUnderflow { t_reached: f64 },

    /// A conserved quantity drifted past the advertised tolerance.
    #[error("conservation drift {drift:.3e} exceeds tolerance {tol:.1e}")]
    DriftExceeded { drift: f64, tol: f64 },

    /// A cut witness cannot start at a turning point.
    #[error("p_theta(0) = 0 is a turning point; run the conjugate-point scan instead")]
    TurningPointStart,

    /// R = 0 geodesics close up; there is no cut witness to build.
    #[error("R = 0 geodesic is periodic; no cut witness exists")]
    PeriodicDegenerate,

    /// A conjugate-point scan must start at a Hill endpoint.
    #[error("theta0 = {theta0} is not a Hill endpoint (residual {residual:.3e})")]
    NotHillEndpoint { theta0: f64, residual: f64 },

    /// The conjugate-point scan exhausted its window without a vanishing.
    #[error("no conjugate point found in (0, {t_max}]")]
    ConjugateScanFailed { t_max: f64 },

    /// Any other violated precondition.
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
