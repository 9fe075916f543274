//! Subcommand bodies. Each returns tables; writing them is the caller's job.

use std::f64::consts::PI;
use std::path::PathBuf;

use mermin_core::optimize::{optimize_angles, optimize_ideal};
use mermin_core::source::fock_weight_distribution;
use mermin_core::sweep::{evaluate_point, SweepGrid, SweepPoint, SweepRecord};
use mermin_core::{AngleTriple, HalfInt, LossConfig, SqueezeParam, TruncationPolicy};
use rayon::prelude::*;

use crate::args::{Command, FockWeightsArgs, GridArgs, OptimizeArgs, OutputArgs, PolicyArgs, SweepThetaArgs};
use crate::output::{Format, Table, Value};
use crate::validate;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// A table and where it should be written.
#[derive(Debug)]
pub struct Emit {
    pub dest: Option<PathBuf>,
    pub format: Format,
    pub table: Table,
}

#[derive(Debug)]
pub struct Run {
    pub emits: Vec<Emit>,
    /// Rows or checks that failed; nonzero means exit status 1.
    pub failures: usize,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn worker_count(cmd: &Command) -> Option<usize> {
    output_args(cmd).workers
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::SweepTheta(a) => &a.output,
        Command::SweepEta(a) | Command::Surface(a) => &a.output,
        Command::Optimize(a) => &a.output,
        Command::Validate(a) => &a.output,
        Command::FockWeights(a) => &a.output,
    }
}

pub fn execute(cmd: &Command) -> Result<Run, CliError> {
    let out = output_args(cmd);
    if out.workers == Some(0) {
        return Err(usage("--workers must be at least 1"));
    }
    let single = |(table, failures): (Table, usize)| Run {
        emits: vec![Emit { dest: out.out.clone(), format: out.format, table }],
        failures,
    };
    match cmd {
        Command::SweepTheta(a) => sweep_theta(a).map(single),
        Command::SweepEta(a) | Command::Surface(a) => sweep_eta(a).map(single),
        Command::Optimize(a) => optimize(a).map(single),
        Command::Validate(a) => validate::run(a),
        Command::FockWeights(a) => fock_weights(a).map(single),
    }
}

pub fn policy_for(p: &PolicyArgs) -> Result<impl Fn(HalfInt) -> TruncationPolicy + Sync + Copy, CliError> {
    if !(p.policy_tol > 0.0 && p.policy_tol.is_finite()) {
        return Err(usage(format!("--policy-tol {} must be positive", p.policy_tol)));
    }
    if p.policy_max_s < HalfInt::ZERO {
        return Err(usage(format!("--policy-max-s {} must be >= 0", p.policy_max_s)));
    }
    let (tol, offset) = (p.policy_tol, p.policy_max_s);
    Ok(move |s| TruncationPolicy::with_tolerance(s, tol, offset))
}

fn check_spins(s: &[HalfInt]) -> Result<(), CliError> {
    if s.is_empty() {
        return Err(usage("empty spin list"));
    }
    match s.iter().find(|&&x| x < HalfInt::HALF) {
        Some(x) => Err(usage(format!("spin {x} must be >= 1/2"))),
        None => Ok(()),
    }
}

fn squeeze(r: &[f64]) -> Result<Vec<SqueezeParam>, CliError> {
    if r.is_empty() {
        return Err(usage("empty squeezing list"));
    }
    r.iter().map(|&x| SqueezeParam::new(x).map_err(|e| usage(e.to_string()))).collect()
}

fn check_etas(eta: &[f64]) -> Result<(), CliError> {
    if eta.is_empty() {
        return Err(usage("empty efficiency list"));
    }
    match eta.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        Some(x) => Err(usage(format!("efficiency {x} outside [0, 1]"))),
        None => Ok(()),
    }
}

/// `steps` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn theta_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(usage(format!("empty theta grid [{lo}, {hi}] with {steps} steps")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

const RECORD_COLUMNS: [&str; 11] = [
    "convention",
    "lhs",
    "rhs",
    "violation",
    "normalized_violation",
    "sector_probability",
    "converged",
    "s_cutoff_used",
    "alpha",
    "beta",
    "gamma",
];

fn record_values(rec: &SweepRecord) -> (Vec<Value>, bool) {
    let p = &rec.point;
    let mut v: Vec<Value> = vec![p.convention.name().into()];
    let ok = rec.outcome.is_ok();
    match &rec.outcome {
        Ok(r) => v.extend([
            r.lhs.into(),
            r.rhs.into(),
            r.violation.into(),
            r.normalized_violation.into(),
            r.sector_probability.into(),
            r.converged.into(),
            r.s_cutoff_used.value().into(),
        ]),
        Err(_) => v.extend([
            f64::NAN.into(),
            f64::NAN.into(),
            f64::NAN.into(),
            f64::NAN.into(),
            f64::NAN.into(),
            false.into(),
            f64::NAN.into(),
        ]),
    }
    v.extend([p.angles.alpha.into(), p.angles.beta.into(), p.angles.gamma.into()]);
    v.push(rec.outcome.as_ref().err().cloned().unwrap_or_default().into());
    (v, ok)
}

fn header(lead: &[&'static str]) -> Vec<&'static str> {
    lead.iter().copied().chain(RECORD_COLUMNS).chain(["error"]).collect()
}

fn evaluate_all(points: &[SweepPoint], policy: impl Fn(HalfInt) -> TruncationPolicy + Sync) -> Vec<SweepRecord> {
    points.par_iter().map(|p| evaluate_point(p, &policy(p.s_star))).collect()
}

pub fn sweep_theta(a: &SweepThetaArgs) -> Result<(Table, usize), CliError> {
    let thetas = theta_grid(a.theta_min, a.theta_max, a.steps)?;
    check_spins(&[a.s])?;
    check_etas(&a.eta)?;
    let r = squeeze(&[a.r])?;
    let policy = policy_for(&a.policy)?;
    let grid = SweepGrid {
        s_star: vec![a.s],
        r,
        eta: a.eta.clone(),
        angles: thetas.iter().map(|&t| AngleTriple::from_theta(t)).collect(),
        conventions: a.conventions.list(),
    };
    let records = evaluate_all(&grid.points(), policy);
    let mut table = Table::new(header(&["s", "r", "eta", "theta"]));
    let mut failures = 0;
    for rec in &records {
        let p = &rec.point;
        let (vals, ok) = record_values(rec);
        failures += usize::from(!ok);
        let mut row: Vec<Value> = vec![p.s_star.value().into(), p.r.value().into(), p.eta.into(), thetas[p.angle_index].into()];
        row.extend(vals);
        table.push(row);
    }
    Ok((table, failures))
}

/// Shared by `sweep-eta` and `surface`: every `(s, r, eta)` at the
/// lossless optimal angles of `s`.
pub fn sweep_eta(a: &GridArgs) -> Result<(Table, usize), CliError> {
    check_spins(&a.s)?;
    check_etas(&a.eta)?;
    let rs = squeeze(&a.r)?;
    let policy = policy_for(&a.policy)?;
    let best: Vec<AngleTriple> = a.s.par_iter().map(|&s| optimize_ideal(s).angles).collect();
    let mut points = Vec::new();
    for (&s, &angles) in a.s.iter().zip(&best) {
        let grid = SweepGrid { s_star: vec![s], r: rs.clone(), eta: a.eta.clone(), angles: vec![angles], conventions: a.conventions.list() };
        points.extend(grid.points());
    }
    let records = evaluate_all(&points, policy);
    let mut table = Table::new(header(&["s", "r", "eta"]));
    let mut failures = 0;
    for rec in &records {
        let p = &rec.point;
        let (vals, ok) = record_values(rec);
        failures += usize::from(!ok);
        let mut row: Vec<Value> = vec![p.s_star.value().into(), p.r.value().into(), p.eta.into()];
        row.extend(vals);
        table.push(row);
    }
    Ok((table, failures))
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Distance between two optima up to a global rotation and the
/// `alpha <-> beta` exchange, both of which leave the violation unchanged.
pub fn angle_shift(a: AngleTriple, b: AngleTriple) -> f64 {
    let d = |x: f64, y: f64, u: f64, v: f64| wrap(x - y - (u - v)).abs();
    let same = d(a.alpha, a.gamma, b.alpha, b.gamma).max(d(a.beta, a.gamma, b.beta, b.gamma));
    let swapped = d(a.alpha, a.gamma, b.beta, b.gamma).max(d(a.beta, a.gamma, b.alpha, b.gamma));
    same.min(swapped)
}

pub fn optimize(a: &OptimizeArgs) -> Result<(Table, usize), CliError> {
    check_spins(&a.s)?;
    check_etas(&a.eta)?;
    let r = squeeze(&[a.r])?[0];
    let policy = policy_for(&a.policy)?;
    let jobs: Vec<(HalfInt, f64)> = a.s.iter().flat_map(|&s| a.eta.iter().map(move |&e| (s, e))).collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(s, eta)| {
            let ideal = optimize_ideal(s).angles;
            let found = LossConfig::equal(eta).and_then(|loss| optimize_angles(s, r, loss, &policy(s)));
            (ideal, found)
        })
        .collect();
    let mut table = Table::new(vec![
        "s",
        "r",
        "eta",
        "alpha",
        "beta",
        "gamma",
        "lhs",
        "rhs",
        "violation",
        "normalized_violation",
        "sector_probability",
        "converged",
        "s_cutoff_used",
        "ideal_alpha",
        "ideal_beta",
        "ideal_gamma",
        "angle_shift",
        "error",
    ]);
    let mut failures = 0;
    for (&(s, eta), (ideal, found)) in jobs.iter().zip(results) {
        let mut row: Vec<Value> = vec![s.value().into(), r.value().into(), eta.into()];
        match found {
            Ok((ang, rec)) => row.extend([
                ang.alpha.into(),
                ang.beta.into(),
                ang.gamma.into(),
                rec.lhs.into(),
                rec.rhs.into(),
                rec.violation.into(),
                rec.normalized_violation.into(),
                rec.sector_probability.into(),
                rec.converged.into(),
                rec.s_cutoff_used.value().into(),
                ideal.alpha.into(),
                ideal.beta.into(),
                ideal.gamma.into(),
                angle_shift(ang, ideal).into(),
                "".into(),
            ]),
            Err(e) => {
                failures += 1;
                row.extend((0..5).map(|_| Value::F(f64::NAN)));
                row.push(f64::NAN.into());
                row.push(f64::NAN.into());
                row.push(f64::NAN.into());
                row.push(false.into());
                row.push(f64::NAN.into());
                row.extend([ideal.alpha.into(), ideal.beta.into(), ideal.gamma.into(), f64::NAN.into()]);
                row.push(e.to_string().into());
            }
        }
        table.push(row);
    }
    Ok((table, failures))
}

pub fn fock_weights(a: &FockWeightsArgs) -> Result<(Table, usize), CliError> {
    let r = squeeze(&[a.r])?[0];
    if !(a.tail >= 0.0) {
        return Err(usage("--tail must be >= 0"));
    }
    let w = fock_weight_distribution(r, a.n_max);
    let x = r.photon_ratio();
    let mut table = Table::new(vec!["n", "probability"]);
    for (n, &p) in w.probabilities.iter().enumerate() {
        table.push(vec![n.into(), p.into()]);
        if x.powi(n as i32 + 1) <= a.tail {
            break;
        }
    }
    Ok((table, 0))
}
