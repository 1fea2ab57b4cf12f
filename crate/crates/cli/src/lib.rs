//! Command-line front end for the se2-geodesics library.
//!
//! The `se2geo` binary exposes trajectory, level-set, period, calibration,
//! and minimality runs with byte-stable output: CSV for plot-facing sample
//! tables, JSON for machine-facing reports, every float printed with 17
//! significant digits. Momenta are given either in polar form (`--R`,
//! `--delta`) or Cartesian form (`--a`, `--b`); angles are radians
//! throughout.

mod commands;
mod json;

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use se2_geodesics::momentum::momentum_from_cartesian;
use se2_geodesics::ode::Method;
use se2_geodesics::{Momentum, Pose, ReducedState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Parses the process arguments, runs the requested command, and returns the
/// exit code: 0 success, 1 numerical failure, 2 precondition violation, 64
/// usage error.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

/// A command that did not complete, with the exit code it maps to.
pub(crate) struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(err: std::io::Error) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: format!("writing output failed: {err}"),
        }
    }
}

impl From<se2_geodesics::Error> for Failure {
    fn from(err: se2_geodesics::Error) -> Self {
        use se2_geodesics::Error;
        let code = match err {
            Error::StepUnderflow { .. }
            | Error::DriftExceeded { .. }
            | Error::ConjugateScanFailed { .. } => EXIT_NUMERICAL,
            _ => EXIT_DOMAIN,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "se2geo",
    version,
    about = "Sub-Riemannian geodesics on SE(2): trajectories, level sets, periods, calibrations, minimality"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Integrate one unit-speed geodesic and emit its samples.
    Geodesic(GeodesicArgs),
    /// Sample the unit-speed level set of a momentum on the phase cylinder.
    Levelset(LevelsetArgs),
    /// Classify the geodesic through an initial condition.
    Classify(ClassifyArgs),
    /// Traverse time and planar displacement of one Hill excursion.
    Period(PeriodArgs),
    /// Verify a calibration function along an integrated arc.
    Calibrate(CalibrateArgs),
    /// Build non-minimality evidence: a cut witness or a conjugate point.
    Cut(CutArgs),
    /// Decide whether a geodesic is a metric line.
    Certify(CertifyArgs),
    /// Run one report command over a grid of momenta.
    Sweep(SweepArgs),
}

/// The conserved planar momentum, in exactly one of its two forms.
#[derive(Args)]
pub struct MomentumArgs {
    /// Momentum radius (polar form; pairs with --delta).
    #[arg(
        long = "R",
        value_name = "R",
        requires = "delta",
        conflicts_with_all = ["a", "b"],
        allow_hyphen_values = true
    )]
    pub r: Option<f64>,

    /// Momentum angle in radians (polar form; pairs with --R).
    #[arg(long, requires = "r", allow_hyphen_values = true)]
    pub delta: Option<f64>,

    /// Momentum x-component (Cartesian form; pairs with --b).
    #[arg(long, requires = "b", conflicts_with_all = ["r", "delta"], allow_hyphen_values = true)]
    pub a: Option<f64>,

    /// Momentum y-component (Cartesian form; pairs with --a).
    #[arg(long, requires = "a", allow_hyphen_values = true)]
    pub b: Option<f64>,
}

impl MomentumArgs {
    pub(crate) fn resolve(&self) -> Result<Momentum, Failure> {
        let mu = match (self.r, self.delta, self.a, self.b) {
            (Some(r), Some(delta), None, None) => {
                if !(r.is_finite() && r >= 0.0) {
                    return Err(Failure::usage("--R must be finite and nonnegative"));
                }
                if !delta.is_finite() {
                    return Err(Failure::usage("--delta must be finite"));
                }
                Momentum::new(r, delta)
            }
            (None, None, Some(a), Some(b)) => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Failure::usage("--a and --b must be finite"));
                }
                momentum_from_cartesian(a, b)
            }
            _ => {
                return Err(Failure::usage(
                    "supply the momentum as --R <R> --delta <DELTA> or as --a <A> --b <B>",
                ))
            }
        };
        if mu.near_separatrix() {
            eprintln!(
                "warning: |R - 1| = {:.3e} is inside the separatrix warning band",
                (mu.r() - 1.0).abs()
            );
        }
        Ok(mu)
    }
}

/// Initial data for commands that integrate a concrete geodesic.
#[derive(Args)]
pub struct StateArgs {
    /// Initial heading in radians [default: delta + pi/2, which is on-level
    /// with --ptheta0 1 for every momentum].
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,

    /// Initial fibre momentum [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    pub ptheta0: Option<f64>,

    /// Initial planar x-position.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,

    /// Initial planar y-position.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub y0: f64,
}

impl StateArgs {
    pub(crate) fn theta0(&self, mu: &Momentum) -> f64 {
        self.theta0.unwrap_or(mu.delta() + FRAC_PI_2)
    }

    pub(crate) fn ptheta0(&self) -> f64 {
        self.ptheta0.unwrap_or(1.0)
    }

    pub(crate) fn reduced(&self, mu: &Momentum) -> ReducedState {
        ReducedState::new(self.ptheta0(), self.theta0(mu))
    }

    pub(crate) fn pose(&self, mu: &Momentum) -> Pose {
        Pose::new(self.theta0(mu), self.x0, self.y0)
    }
}

/// Integrator configuration.
#[derive(Args)]
pub struct IntegrationArgs {
    /// Integration horizon.
    #[arg(long = "T", value_name = "T", default_value_t = 10.0)]
    pub t: f64,

    /// Fixed Runge-Kutta step size [default: 1e-3].
    #[arg(long, conflicts_with = "tol")]
    pub step: Option<f64>,

    /// Per-unit-time error tolerance; switches to the adaptive embedded
    /// 4(5) pair, trading bit-stable output for error control.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Keep every k-th integration step as a sample.
    #[arg(long, default_value_t = 10)]
    pub sample_every: usize,
}

impl IntegrationArgs {
    pub(crate) fn validate(&self) -> Result<(), Failure> {
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Failure::usage("--T must be finite and positive"));
        }
        if let Some(step) = self.step {
            if !(step.is_finite() && step > 0.0) {
                return Err(Failure::usage("--step must be finite and positive"));
            }
        }
        if let Some(tol) = self.tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Failure::usage("--tol must be finite and positive"));
            }
        }
        if self.sample_every == 0 {
            return Err(Failure::usage("--sample-every must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn method(&self) -> Method {
        match (self.step, self.tol) {
            (_, Some(tol)) => Method::Rkf45 { tol },
            (Some(step), None) => Method::Rk4 { step },
            (None, None) => Method::default(),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Output destination and format.
#[derive(Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,

    /// Output format [default: csv for sample tables, json for reports].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub momentum: MomentumArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct LevelsetArgs {
    #[command(flatten)]
    pub momentum: MomentumArgs,

    /// Sample points per branch.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub momentum: MomentumArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub momentum: MomentumArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub momentum: MomentumArgs,
    #[command(flatten)]
    pub state: StateArgs,

    /// Arc horizon [default: 10, or 45% of the one-way Hill traverse when
    /// R > 1 so the arc stays on one calibration branch].
    #[arg(long = "T", value_name = "T")]
    pub t: Option<f64>,

    /// Random unit horizontal vectors drawn per sample pose.
    #[arg(long, default_value_t = 1000)]
    pub n_random: usize,

    /// Seed for the random direction draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct CutArgs {
    #[command(flatten)]
    pub momentum: MomentumArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub momentum: MomentumArgs,
    #[command(flatten)]
    pub state: StateArgs,

    /// Seed for the calibration spot checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum SweepCommand {
    Classify,
    Period,
    Calibrate,
    Cut,
    Certify,
}

impl SweepCommand {
    pub(crate) fn name(self) -> &'static str {
        match self {
            SweepCommand::Classify => "classify",
            SweepCommand::Period => "period",
            SweepCommand::Calibrate => "calibrate",
            SweepCommand::Cut => "cut",
            SweepCommand::Certify => "certify",
        }
    }
}

#[derive(Args)]
pub struct SweepArgs {
    /// Report command to run at every grid point.
    #[arg(long, value_enum)]
    pub command: SweepCommand,

    /// Comma-separated list of momentum radii.
    #[arg(
        long = "R-values",
        value_name = "LIST",
        default_value = "",
        allow_hyphen_values = true
    )]
    pub r_values: String,

    /// Comma-separated list of momentum angles in radians.
    #[arg(
        long = "delta-values",
        value_name = "LIST",
        default_value = "0",
        allow_hyphen_values = true
    )]
    pub delta_values: String,

    /// Base seed; grid point i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub out: OutputArgs,
}
