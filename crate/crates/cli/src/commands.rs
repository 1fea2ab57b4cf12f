//! The command implementations: each builds its CSV table or JSON report and
//! writes it to the requested destination.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use se2_geodesics::calibration::{verify_calibration, GlobalSeparatrix, LocalEikonal, Sign};
use se2_geodesics::flow::{
    classify_geodesic, full_flow_with, lift_geodesic, CotangentState, FlowOptions, GeodesicArc,
};
use se2_geodesics::minimality::{
    certify_metric_line, conjugate_point_check, cut_witness, ConjugacyReport, CutWitness,
};
use se2_geodesics::momentum::{
    classify_level_set, hill_interval_containing, hill_intervals, on_level_residual,
    sample_level_set,
};
use se2_geodesics::period::{is_periodic, period_data, reduced_period, theta_period};
use se2_geodesics::{
    CalibrationFunction, CalibrationReport, CutEvidence, Dynamical, Error, HillInterval,
    Inflectional, IntervalKind, LevelSetShape, MetricLineReason, MetricLineVerdict, Momentum, Pose,
    ReducedState,
};

use crate::json::{fmt_f64, num, text, Json};
use crate::{
    CalibrateArgs, CertifyArgs, ClassifyArgs, Command, CutArgs, Failure, Format, GeodesicArgs,
    LevelsetArgs, OutputArgs, PeriodArgs, StateArgs, SweepArgs, SweepCommand, EXIT_NUMERICAL,
};

pub(crate) fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Geodesic(args) => geodesic(args),
        Command::Levelset(args) => levelset(args),
        Command::Classify(args) => classify(args),
        Command::Period(args) => period(args),
        Command::Calibrate(args) => calibrate(args),
        Command::Cut(args) => cut(args),
        Command::Certify(args) => certify(args),
        Command::Sweep(args) => sweep(args),
    }
}

/// Drift bound enforced on integrated arcs before anything is emitted.
const DRIFT_TOL: f64 = 1e-8;

fn emit(out: &OutputArgs, content: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => std::fs::write(path, content).map_err(Failure::io),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(Failure::io)
        }
    }
}

/// Rejects `--format csv` on commands that only produce a JSON report.
fn reject_csv(out: &OutputArgs, command: &str) -> Result<(), Failure> {
    if out.format == Some(Format::Csv) {
        return Err(Failure::usage(format!(
            "{command} emits a JSON report; drop --format csv"
        )));
    }
    Ok(())
}

fn envelope(command: &str, params: Json, result: Json) -> Json {
    Json::Obj(vec![
        ("version", Json::Int(1)),
        ("command", text(command)),
        ("params", params),
        ("result", result),
    ])
}

fn momentum_params(mu: &Momentum) -> Vec<(&'static str, Json)> {
    let (a, b) = mu.cartesian();
    vec![
        ("R", num(mu.r())),
        ("delta", num(mu.delta())),
        ("a", num(a)),
        ("b", num(b)),
    ]
}

fn state_params(state: &StateArgs, mu: &Momentum) -> Vec<(&'static str, Json)> {
    vec![
        ("theta0", num(state.theta0(mu))),
        ("ptheta0", num(state.ptheta0())),
        ("x0", num(state.x0)),
        ("y0", num(state.y0)),
    ]
}

fn kind_name(kind: IntervalKind) -> &'static str {
    match kind {
        IntervalKind::I1 => "I1",
        IntervalKind::I2 => "I2",
        IntervalKind::FullCircle => "full-circle",
    }
}

fn shape_name(shape: LevelSetShape) -> &'static str {
    match shape {
        LevelSetShape::TwoContractibleOvals => "two-contractible-ovals",
        LevelSetShape::FigureEight => "figure-eight",
        LevelSetShape::TwoNonContractibleLoops => "two-noncontractible-loops",
    }
}

fn interval_json(iv: &HillInterval) -> Json {
    Json::Obj(vec![
        ("kind", text(kind_name(iv.kind))),
        ("lo", num(iv.lo)),
        ("hi", num(iv.hi)),
    ])
}

fn push_row(out: &mut String, fields: &[f64]) {
    for (i, x) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&fmt_f64(*x));
    }
    out.push('\n');
}

fn sample_fields(t: f64, s: &CotangentState) -> [f64; 9] {
    [
        t,
        s.theta,
        s.x,
        s.y,
        s.p_theta,
        s.momentum_u(),
        s.momentum_v(),
        s.energy(),
        s.p_theta,
    ]
}

const GEODESIC_COLUMNS: &str = "t,theta,x,y,p_theta,P_u,P_v,H,kappa";

fn geodesic(args: GeodesicArgs) -> Result<(), Failure> {
    let mu = args.momentum.resolve()?;
    args.integration.validate()?;
    let (a, b) = mu.cartesian();
    let s0 = CotangentState {
        p_theta: args.state.ptheta0(),
        p_x: a,
        p_y: b,
        theta: args.state.theta0(&mu),
        x: args.state.x0,
        y: args.state.y0,
    };
    let opts = FlowOptions {
        method: args.integration.method(),
        sample_every: args.integration.sample_every,
    };
    let arc = full_flow_with(&s0, args.integration.t, DRIFT_TOL, &opts)?;

    let content = match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::with_capacity(64 * (arc.len() + 1));
            out.push_str(GEODESIC_COLUMNS);
            out.push('\n');
            for (t, s) in &arc.samples {
                push_row(&mut out, &sample_fields(*t, s));
            }
            out
        }
        Format::Json => {
            let mut params = momentum_params(&mu);
            params.extend(state_params(&args.state, &mu));
            params.push(("T", num(args.integration.t)));
            let samples = arc
                .samples
                .iter()
                .map(|(t, s)| Json::Arr(sample_fields(*t, s).iter().map(|x| num(*x)).collect()))
                .collect();
            let result = Json::Obj(vec![
                ("classification", class_json(&arc)),
                ("energy_drift", num(arc.energy_drift)),
                ("momentum_drift", num(arc.momentum_drift)),
                ("n_samples", Json::Int(arc.len() as i64)),
                (
                    "columns",
                    Json::Arr(GEODESIC_COLUMNS.split(',').map(text).collect()),
                ),
                ("samples", Json::Arr(samples)),
            ]);
            envelope("geodesic", Json::Obj(params), result).render()
        }
    };
    emit(&args.out, &content)
}

fn class_json(arc: &GeodesicArc) -> Json {
    let class = arc.classification;
    Json::Obj(vec![
        ("dynamical", text(dynamical_name(class.dynamical))),
        ("inflectional", text(inflectional_name(class.inflectional))),
    ])
}

fn dynamical_name(d: Dynamical) -> &'static str {
    match d {
        Dynamical::Line => "line",
        Dynamical::Heteroclinic => "heteroclinic",
        Dynamical::ThetaPeriodic => "theta-periodic",
    }
}

fn inflectional_name(i: Inflectional) -> &'static str {
    match i {
        Inflectional::Inflection => "inflection",
        Inflectional::NonInflection => "non-inflection",
    }
}

const LEVELSET_COLUMNS: &str = "branch,kind,sign,theta,p_theta";

fn levelset(args: LevelsetArgs) -> Result<(), Failure> {
    let mu = args.momentum.resolve()?;
    if args.samples < 2 {
        return Err(Failure::usage("--samples must be at least 2"));
    }
    let branches = sample_level_set(&mu, args.samples);
    let shape = classify_level_set(&mu);

    let content = match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(LEVELSET_COLUMNS);
            out.push('\n');
            for (i, branch) in branches.iter().enumerate() {
                let sign = if branch.sign > 0.0 { "1" } else { "-1" };
                for s in &branch.states {
                    out.push_str(&format!(
                        "{i},{},{sign},{},{}\n",
                        kind_name(branch.interval.kind),
                        fmt_f64(s.theta),
                        fmt_f64(s.p_theta)
                    ));
                }
            }
            out
        }
        Format::Json => {
            let mut params = momentum_params(&mu);
            params.push(("samples", Json::Int(args.samples as i64)));
            let branch_docs = branches
                .iter()
                .map(|branch| {
                    let states = branch
                        .states
                        .iter()
                        .map(|s| Json::Arr(vec![num(s.theta), num(s.p_theta)]))
                        .collect();
                    Json::Obj(vec![
                        ("kind", text(kind_name(branch.interval.kind))),
                        ("sign", Json::Int(if branch.sign > 0.0 { 1 } else { -1 })),
                        ("lo", num(branch.interval.lo)),
                        ("hi", num(branch.interval.hi)),
                        ("states", Json::Arr(states)),
                    ])
                })
                .collect();
            let result = Json::Obj(vec![
                ("shape", text(shape_name(shape))),
                ("near_separatrix", Json::Bool(mu.near_separatrix())),
                ("branches", Json::Arr(branch_docs)),
            ]);
            envelope("levelset", Json::Obj(params), result).render()
        }
    };
    emit(&args.out, &content)
}

fn classify(args: ClassifyArgs) -> Result<(), Failure> {
    reject_csv(&args.out, "classify")?;
    let mu = args.momentum.resolve()?;
    let r0 = args.state.reduced(&mu);
    let result = classify_report(&mu, &r0)?;
    let mut params = momentum_params(&mu);
    params.extend(state_params(&args.state, &mu));
    emit(
        &args.out,
        &envelope("classify", Json::Obj(params), result).render(),
    )
}

fn classify_report(mu: &Momentum, r0: &ReducedState) -> Result<Json, Failure> {
    let class = classify_geodesic(mu, r0)?;
    let intervals = hill_intervals(mu).iter().map(interval_json).collect();
    Ok(Json::Obj(vec![
        ("dynamical", text(dynamical_name(class.dynamical))),
        ("inflectional", text(inflectional_name(class.inflectional))),
        ("shape", text(shape_name(classify_level_set(mu)))),
        ("near_separatrix", Json::Bool(mu.near_separatrix())),
        ("on_level_residual", num(on_level_residual(mu, r0))),
        ("hill_intervals", Json::Arr(intervals)),
    ]))
}

fn period(args: PeriodArgs) -> Result<(), Failure> {
    reject_csv(&args.out, "period")?;
    let mu = args.momentum.resolve()?;
    let result = period_report(&mu)?;
    emit(
        &args.out,
        &envelope("period", Json::Obj(momentum_params(&mu)), result).render(),
    )
}

fn period_report(mu: &Momentum) -> Result<Json, Failure> {
    let intervals = hill_intervals(mu);
    let data = period_data(mu, &intervals[0])?;
    let (periodic, witness) = is_periodic(mu)?;
    Ok(Json::Obj(vec![
        ("L", num(data.l)),
        ("dx", num(data.dx)),
        ("dy", num(data.dy)),
        ("reduced_period", num(reduced_period(mu)?)),
        ("periodic", Json::Bool(periodic)),
        ("witness", num(witness)),
        (
            "intervals",
            Json::Arr(intervals.iter().map(interval_json).collect()),
        ),
    ]))
}

fn calibrate(args: CalibrateArgs) -> Result<(), Failure> {
    reject_csv(&args.out, "calibrate")?;
    let mu = args.momentum.resolve()?;
    if let Some(t) = args.t {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure::usage("--T must be finite and positive"));
        }
    }
    let r0 = args.state.reduced(&mu);
    let g0 = args.state.pose(&mu);
    let result = calibrate_report(&mu, &r0, &g0, args.t, args.n_random, args.seed)?;
    let mut params = momentum_params(&mu);
    params.extend(state_params(&args.state, &mu));
    params.push(("n_random", Json::Int(args.n_random as i64)));
    params.push(("seed", Json::UInt(args.seed)));
    emit(
        &args.out,
        &envelope("calibrate", Json::Obj(params), result).render(),
    )
}

/// Picks the calibration family matching the start: the global separatrix
/// function on the branch of the initial turning direction for `R = 1`, the
/// local eikonal on the Hill interval of `theta0` otherwise.
fn pick_calibration(mu: &Momentum, r0: &ReducedState) -> Result<CalibrationFunction, Error> {
    if mu.r() == 1.0 {
        let sign = Sign::of(r0.p_theta * (r0.theta - mu.delta()).sin());
        return Ok(CalibrationFunction::Global(GlobalSeparatrix {
            delta: mu.delta(),
            sign,
        }));
    }
    let sign = Sign::of(r0.p_theta);
    let local = if mu.r() > 1.0 {
        let iv = hill_interval_containing(mu, r0.theta)
            .ok_or(Error::OutsideHillRegion { theta: r0.theta })?;
        LocalEikonal::on_interval(*mu, sign, &iv)?
    } else {
        LocalEikonal::new(*mu, sign)
    };
    Ok(CalibrationFunction::Local(local))
}

fn calibrate_report(
    mu: &Momentum,
    r0: &ReducedState,
    g0: &Pose,
    t: Option<f64>,
    n_random: usize,
    seed: u64,
) -> Result<Json, Failure> {
    let cf = pick_calibration(mu, r0)?;
    let t_end = match t {
        Some(t) => t,
        None if mu.r() > 1.0 => {
            let iv = hill_interval_containing(mu, r0.theta)
                .ok_or(Error::OutsideHillRegion { theta: r0.theta })?;
            0.45 * theta_period(mu, &iv)?
        }
        None => 10.0,
    };
    let arc = lift_geodesic(mu, r0, g0, t_end, DRIFT_TOL)?;
    let report = verify_calibration(&cf, &arc, n_random, seed)?;
    let function = match cf {
        CalibrationFunction::Local(_) => "local-eikonal",
        CalibrationFunction::Global(_) => "global-separatrix",
    };
    let sign = match cf {
        CalibrationFunction::Local(local) => local.sign,
        CalibrationFunction::Global(global) => global.sign,
    };
    Ok(Json::Obj(vec![
        ("function", text(function)),
        ("sign", text(if sign == Sign::Plus { "+" } else { "-" })),
        ("T", num(t_end)),
        ("report", calibration_json(&report)),
    ]))
}

fn calibration_json(report: &CalibrationReport) -> Json {
    Json::Obj(vec![
        ("max_ds_err", num(report.max_ds_err)),
        ("min_ds", num(report.min_ds)),
        ("max_unit_excess", num(report.max_unit_excess)),
        ("n_samples", Json::Int(report.n_samples as i64)),
        ("n_random", Json::Int(report.n_random as i64)),
        ("seed", Json::UInt(report.seed)),
        ("passed", Json::Bool(report.passed)),
    ])
}

fn cut(args: CutArgs) -> Result<(), Failure> {
    reject_csv(&args.out, "cut")?;
    let mu = args.momentum.resolve()?;
    let r0 = args.state.reduced(&mu);
    let g0 = args.state.pose(&mu);
    let result = cut_report(&mu, &r0, &g0)?;
    let mut params = momentum_params(&mu);
    params.extend(state_params(&args.state, &mu));
    emit(
        &args.out,
        &envelope("cut", Json::Obj(params), result).render(),
    )
}

/// Turning-point starts with `R > 1` get the conjugate-point scan; every
/// other start gets the reflected cut witness.
fn cut_report(mu: &Momentum, r0: &ReducedState, g0: &Pose) -> Result<Json, Failure> {
    if mu.r() > 1.0 && r0.p_theta.abs() <= 1e-12 {
        let report = conjugate_point_check(mu, r0.theta, g0)?;
        Ok(conjugacy_json(&report))
    } else {
        let witness = cut_witness(mu, r0, g0)?;
        Ok(witness_json(&witness))
    }
}

fn witness_json(w: &CutWitness) -> Json {
    Json::Obj(vec![
        ("type", text("witness")),
        ("meeting_time", num(w.meeting_time)),
        ("endpoint_gap", num(w.endpoint_gap)),
        ("min_mid_separation", num(w.min_mid_separation)),
        (
            "certifies",
            Json::Bool(w.endpoint_gap <= 1e-6 && w.min_mid_separation > 1e-2),
        ),
    ])
}

fn conjugacy_json(report: &ConjugacyReport) -> Json {
    let profile = report
        .profile
        .iter()
        .map(|(t, j)| Json::Arr(vec![num(*t), num(*j)]))
        .collect();
    Json::Obj(vec![
        ("type", text("conjugacy")),
        ("t_star", num(report.t_star)),
        ("l_hill", num(report.l_hill)),
        ("j_norm_at_zero", num(report.j_norm_at_zero)),
        ("j_norm_at_t_star", num(report.j_norm_at_t_star)),
        ("j_norm_at_midpoint", num(report.j_norm_at_midpoint)),
        (
            "midpoint_nonvanishing",
            Json::Bool(report.midpoint_nonvanishing),
        ),
        ("theta_return_gap", num(report.theta_return_gap)),
        ("profile", Json::Arr(profile)),
    ])
}

fn certify(args: CertifyArgs) -> Result<(), Failure> {
    reject_csv(&args.out, "certify")?;
    let mu = args.momentum.resolve()?;
    let r0 = args.state.reduced(&mu);
    let g0 = args.state.pose(&mu);
    let result = certify_report(&mu, &r0, &g0, args.seed)?;
    let mut params = momentum_params(&mu);
    params.extend(state_params(&args.state, &mu));
    params.push(("seed", Json::UInt(args.seed)));
    emit(
        &args.out,
        &envelope("certify", Json::Obj(params), result).render(),
    )
}

fn certify_report(mu: &Momentum, r0: &ReducedState, g0: &Pose, seed: u64) -> Result<Json, Failure> {
    match certify_metric_line(mu, r0, g0, seed)? {
        MetricLineVerdict::MetricLine {
            reason,
            calibration,
        } => Ok(Json::Obj(vec![
            ("verdict", text("MetricLine")),
            (
                "reason",
                text(match reason {
                    MetricLineReason::Line => "Line",
                    MetricLineReason::Heteroclinic => "Heteroclinic",
                }),
            ),
            ("calibration", calibration_json(&calibration)),
        ])),
        MetricLineVerdict::NotMinimizingPast { bound, evidence } => {
            let evidence = match *evidence {
                CutEvidence::Witness(w) => witness_json(&w),
                CutEvidence::Conjugacy(c) => conjugacy_json(&c),
                CutEvidence::ClosedOrbit {
                    period,
                    closure_gap,
                } => Json::Obj(vec![
                    ("type", text("closed-orbit")),
                    ("period", num(period)),
                    ("closure_gap", num(closure_gap)),
                ]),
            };
            Ok(Json::Obj(vec![
                ("verdict", text("NotMinimizingPast")),
                ("bound", num(bound)),
                ("evidence", evidence),
            ]))
        }
    }
}

fn parse_list(list: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    let trimmed = list.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|part| {
            let part = part.trim();
            part.parse::<f64>()
                .map_err(|_| Failure::usage(format!("{flag}: cannot parse {part:?} as a number")))
        })
        .collect()
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    reject_csv(&args.out, "sweep")?;
    let r_values = parse_list(&args.r_values, "--R-values")?;
    let delta_values = parse_list(&args.delta_values, "--delta-values")?;
    for &r in &r_values {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Failure::usage(
                "--R-values entries must be finite and nonnegative",
            ));
        }
    }
    for &d in &delta_values {
        if !d.is_finite() {
            return Err(Failure::usage("--delta-values entries must be finite"));
        }
    }

    let mut points = Vec::new();
    let mut n_fail = 0u64;
    let mut index = 0u64;
    for &r in &r_values {
        for &delta in &delta_values {
            let seed = args.seed.wrapping_add(index);
            index += 1;
            let mut point = vec![
                ("R", num(r)),
                ("delta", num(delta)),
                ("seed", Json::UInt(seed)),
            ];
            match sweep_point(args.command, r, delta, seed) {
                Ok(result) => {
                    point.push(("ok", Json::Bool(true)));
                    point.push(("result", result));
                }
                Err(failure) => {
                    n_fail += 1;
                    point.push(("ok", Json::Bool(false)));
                    point.push(("error", text(failure.message)));
                    point.push(("code", Json::Int(failure.code as i64)));
                }
            }
            points.push(Json::Obj(point));
        }
    }

    let n_points = points.len() as u64;
    let params = Json::Obj(vec![
        ("command", text(args.command.name())),
        (
            "R_values",
            Json::Arr(r_values.iter().map(|&r| num(r)).collect()),
        ),
        (
            "delta_values",
            Json::Arr(delta_values.iter().map(|&d| num(d)).collect()),
        ),
        ("seed", Json::UInt(args.seed)),
    ]);
    let result = Json::Obj(vec![
        ("n_points", Json::UInt(n_points)),
        ("n_pass", Json::UInt(n_points - n_fail)),
        ("n_fail", Json::UInt(n_fail)),
        ("points", Json::Arr(points)),
    ]);
    emit(&args.out, &envelope("sweep", params, result).render())?;
    if n_fail > 0 {
        Err(Failure {
            code: EXIT_NUMERICAL,
            message: format!("{n_fail} of {n_points} grid points failed"),
        })
    } else {
        Ok(())
    }
}

/// One grid evaluation, from the default on-level start for its momentum.
fn sweep_point(command: SweepCommand, r: f64, delta: f64, seed: u64) -> Result<Json, Failure> {
    let mu = Momentum::new(r, delta);
    let r0 = ReducedState::new(1.0, mu.delta() + FRAC_PI_2);
    let g0 = Pose::new(r0.theta, 0.0, 0.0);
    match command {
        SweepCommand::Classify => classify_report(&mu, &r0),
        SweepCommand::Period => period_report(&mu),
        SweepCommand::Calibrate => calibrate_report(&mu, &r0, &g0, None, 1000, seed),
        SweepCommand::Cut => cut_report(&mu, &r0, &g0),
        SweepCommand::Certify => certify_report(&mu, &r0, &g0, seed),
    }
}
