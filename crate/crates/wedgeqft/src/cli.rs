//! Command-line driver: runs verification suites from a config file and
//! writes deterministic reports.
//!
//! Exit codes: 0 all selected suites pass, 1 a suite failed, 2 configuration
//! error, 3 numerical non-convergence. Diagnostics go to stderr as JSON.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{parse_seed, RunConfig};
use crate::fields::TestFunction2D;
use crate::fock_space::{verify_representation_laws, verify_zf_algebra, FockSpace, RapidityGrid};
use crate::nuclearity::{
    default_bracket, find_s_min, free_bose_bound, ising_fermi_bound, nuclearity_curve, partition_bound,
    NystromOptions,
};
use crate::scattering::recover_smatrix;
use crate::scattering_function::{linspace, verify_relations, ScatteringFunction};
use crate::wedge_locality::{
    contour_order_study, grid_doubling_study, smooth_probe, verify_contour_identity, verify_operator_commutator,
    ContourOptions,
};
use crate::{Error, Result, VERSION};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "wedgeqft", version, about = "Verification suites and nuclearity bounds for factorizing S-matrix models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Model and suite configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for report files; without it the report goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// KEY=VAL, repeatable; keys as in the [tolerances] section.
    #[arg(long = "tol-override", global = true)]
    pub tol_override: Vec<String>,

    /// Seed for randomized trials (decimal or 0x-hex).
    #[arg(long, global = true)]
    pub seed: Option<String>,

    /// Run independent suites concurrently.
    #[arg(long, global = true)]
    pub parallel: bool,

    /// Print the CSV column schema and exit.
    #[arg(long)]
    pub schema: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    VerifyScattering,
    VerifyAlgebra,
    VerifyLocality,
    Smatrix,
    NuclearityCurve {
        /// Smallest splitting distance, in units of 1/m.
        #[arg(long)]
        s_min: Option<f64>,
        #[arg(long)]
        s_max: Option<f64>,
        /// Number of geometrically spaced points.
        #[arg(long)]
        steps: Option<usize>,
    },
    FindSmin,
    FreeBose,
    IsingFermi,
    Partition {
        /// Single inverse temperature, in units of r.
        #[arg(long)]
        beta: Option<f64>,
        /// Double-cone radius, in units of 1/m.
        #[arg(long)]
        r: Option<f64>,
    },
    All,
}

impl Command {
    /// Subcommand by its command-line name, with default arguments.
    pub fn from_name(name: &str) -> Option<Command> {
        Some(match name {
            "verify-scattering" => Command::VerifyScattering,
            "verify-algebra" => Command::VerifyAlgebra,
            "verify-locality" => Command::VerifyLocality,
            "smatrix" => Command::Smatrix,
            "nuclearity-curve" => Command::NuclearityCurve {
                s_min: None,
                s_max: None,
                steps: None,
            },
            "find-smin" => Command::FindSmin,
            "free-bose" => Command::FreeBose,
            "ising-fermi" => Command::IsingFermi,
            "partition" => Command::Partition { beta: None, r: None },
            "all" => Command::All,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyScattering => "verify-scattering",
            Command::VerifyAlgebra => "verify-algebra",
            Command::VerifyLocality => "verify-locality",
            Command::Smatrix => "smatrix",
            Command::NuclearityCurve { .. } => "nuclearity-curve",
            Command::FindSmin => "find-smin",
            Command::FreeBose => "free-bose",
            Command::IsingFermi => "ising-fermi",
            Command::Partition { .. } => "partition",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The suite does not apply to this model.
    Skipped,
    NonConvergence,
    Error,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub status: Status,
    pub max_residual: Option<f64>,
    pub tol: Option<f64>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<Value>,
    #[serde(skip)]
    pub table: Table,
}

impl SuiteResult {
    fn judged(suite: &str, pass: bool, max_residual: Option<f64>, tol: Option<f64>, details: Value, table: Table) -> Self {
        SuiteResult {
            suite: suite.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            max_residual,
            tol,
            details,
            diagnostic: None,
            table,
        }
    }

    fn skipped(suite: &str, reason: &str) -> Self {
        SuiteResult {
            suite: suite.into(),
            status: Status::Skipped,
            max_residual: None,
            tol: None,
            details: json!({ "reason": reason }),
            diagnostic: None,
            table: Table::default(),
        }
    }

    fn failed(suite: &str, e: &Error) -> Self {
        SuiteResult {
            suite: suite.into(),
            status: if matches!(e, Error::NonConvergence(_)) {
                Status::NonConvergence
            } else {
                Status::Error
            },
            max_residual: None,
            tol: None,
            details: Value::Null,
            diagnostic: Some(diagnostic(e)),
            table: Table::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub pass: bool,
    pub config: RunConfig,
    pub suites: Vec<SuiteResult>,
}

impl SuiteReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else if self.suites.iter().any(|s| matches!(s.status, Status::Fail | Status::Error)) {
            EXIT_FAIL
        } else {
            EXIT_NON_CONVERGENCE
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

pub fn diagnostic(e: &Error) -> Value {
    let mut d = json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::Config { line, .. } = e {
        d["line"] = json!(line);
    }
    d
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("suite details serialize")
}

fn kappa_for(cfg: &RunConfig, s: &ScatteringFunction) -> f64 {
    cfg.nuclearity.kappa.unwrap_or(0.5 * s.kappa())
}

fn nystrom(cfg: &RunConfig) -> NystromOptions {
    NystromOptions {
        half_width: cfg.nuclearity.half_width,
        nodes: cfg.nuclearity.nodes,
        refine: cfg.nuclearity.refine,
        rel_tol: cfg.tolerances.trace_change,
        max_doublings: cfg.nuclearity.max_doublings,
    }
}

/// One sub-seed per suite so that suites are independent of execution order.
fn suite_rng(seed: u64, suite: &str) -> ChaCha8Rng {
    let salt = suite.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

pub fn suite_scattering(cfg: &RunConfig, s: &ScatteringFunction) -> Result<SuiteResult> {
    let w = cfg.relations.window;
    let r = verify_relations(s, &linspace(-w, w, cfg.relations.samples), cfg.tolerances.relations)?;
    let mut t = Table::new(&["relation", "residual", "tol"]);
    for (k, v) in [
        ("conj_inverse", r.conj_inverse),
        ("reflection", r.reflection),
        ("shifted_inverse", r.shifted_inverse),
        ("modulus", r.modulus),
        ("crossing", r.crossing),
    ] {
        t.push(vec![k.into(), num(v), num(r.tol)]);
    }
    Ok(SuiteResult::judged("verify-scattering", r.pass, Some(r.max_residual()), Some(r.tol), to_value(&r), t))
}

pub fn suite_algebra(cfg: &RunConfig, s: &ScatteringFunction) -> Result<SuiteResult> {
    let a = &cfg.algebra;
    let mut rng = suite_rng(cfg.seed, "verify-algebra");
    let fs = FockSpace::new(s.clone(), RapidityGrid::shared(a.zf_half_width, a.representation_count)?);
    let rep = verify_representation_laws(&fs, a.representation_n_max, a.representation_trials, cfg.tolerances.representation, &mut rng)?;
    let fs = FockSpace::new(s.clone(), RapidityGrid::shared(a.zf_half_width, a.zf_count)?);
    let zf = verify_zf_algebra(&fs, a.zf_n_max, a.zf_trials, cfg.tolerances.zf, &mut rng)?;
    let mut t = Table::new(&["check", "residual", "tol"]);
    for (k, v, tol) in [
        ("involution", rep.involution, rep.tol),
        ("braid", rep.braid, rep.tol),
        ("far_commutation", rep.far_commutation, rep.tol),
        ("unitarity", rep.unitarity, rep.tol),
        ("idempotence", rep.idempotence, rep.tol),
        ("self_adjoint", rep.self_adjoint, rep.tol),
        ("symmetry", rep.symmetry, rep.tol),
        ("zf_annihilators", zf.annihilators, zf.tol),
        ("zf_mixed", zf.mixed, zf.tol),
    ] {
        t.push(vec![k.into(), num(v), num(tol)]);
    }
    let pass = rep.pass && zf.pass;
    Ok(SuiteResult::judged(
        "verify-algebra",
        pass,
        Some(rep.max_residual.max(zf.max_residual)),
        Some(rep.tol.max(zf.tol)),
        json!({ "representation": rep, "zf": zf }),
        t,
    ))
}

/// Overlapping supports used as the negative control of the locality suite.
/// f is not time-symmetric, so the free commutator function does not vanish
/// by parity.
fn overlapping_pair() -> Result<(TestFunction2D, TestFunction2D)> {
    Ok((
        TestFunction2D::bump([0.0, 0.5, -0.25, 0.25], 64)?,
        TestFunction2D::bump([-0.25, 0.25, -0.5, 0.5], 64)?,
    ))
}

pub fn suite_locality(cfg: &RunConfig, s: &ScatteringFunction) -> Result<SuiteResult> {
    if !s.is_bounded_class() {
        return Ok(SuiteResult::skipped("verify-locality", "wedge locality needs a = 0"));
    }
    let l = &cfg.locality;
    let tol = &cfg.tolerances;
    let (f, g) = (cfg.f.build()?, cfg.g.build()?);
    let mut rng = suite_rng(cfg.seed, "verify-locality");
    let mut t = Table::new(&["check", "parameter", "residual", "tol"]);
    let mut contour = Vec::new();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for &n in &l.n_values {
        let spectators: Vec<Vec<f64>> = (0..l.samples)
            .map(|_| (0..n).map(|_| rng.gen_range(-l.spectator_range..l.spectator_range)).collect())
            .collect();
        let r = verify_contour_identity(s, &f, &g, &spectators, tol.contour, &ContourOptions::default())?;
        t.push(vec!["contour".into(), n.to_string(), num(r.max_relative.max(r.max_shift_relative)), num(tol.contour)]);
        pass &= r.pass;
        worst = worst.max(r.max_relative).max(r.max_shift_relative);
        contour.push(r);
    }
    let study_spectators: Vec<f64> = (0..2).map(|_| rng.gen_range(-l.spectator_range..l.spectator_range)).collect();
    let order = contour_order_study(s, &f, &g, &study_spectators, 8.0, l.study_panels, &l.study_orders, tol.order_floor)?;
    for (o, r) in order.steps.iter().zip(&order.residuals) {
        t.push(vec!["order_study".into(), o.to_string(), num(*r), num(tol.order_floor)]);
    }
    pass &= order.pass;

    let fs = FockSpace::new(s.clone(), RapidityGrid::shared(l.operator_half_width, l.operator_count)?);
    let probe = smooth_probe(&fs, l.probe_n)?;
    let op = verify_operator_commutator(&fs, &f, &g, &probe, tol.commutator, false)?;
    t.push(vec!["commutator".into(), l.operator_count.to_string(), num(op.residual), num(tol.commutator)]);
    pass &= op.pass;
    worst = worst.max(op.residual);

    let doubling = grid_doubling_study(
        s,
        &f,
        &g,
        l.operator_half_width,
        &l.doubling_counts,
        l.doubling_probe_n,
        tol.doubling_floor,
    )?;
    for (c, r) in doubling.steps.iter().zip(&doubling.residuals) {
        t.push(vec!["grid_doubling".into(), c.to_string(), num(*r), num(tol.doubling_floor)]);
    }
    pass &= doubling.pass;

    let (fo, go) = overlapping_pair()?;
    let opts = ContourOptions {
        skip_support_check: true,
        shift_check: false,
        ..ContourOptions::default()
    };
    let control = verify_contour_identity(s, &fo, &go, &[vec![0.3]], tol.contour, &opts)?;
    t.push(vec!["negative_control".into(), "overlap".into(), num(control.max_relative), num(tol.negative_control)]);
    let control_ok = control.max_relative > tol.negative_control;
    pass &= control_ok;

    Ok(SuiteResult::judged(
        "verify-locality",
        pass,
        Some(worst),
        Some(tol.contour.max(tol.commutator)),
        json!({
            "contour": contour,
            "order_study": order,
            "commutator": op,
            "grid_doubling": doubling,
            "negative_control": {
                "contour_relative": control.max_relative,
                "threshold": tol.negative_control,
                "pass": control_ok,
            },
        }),
        t,
    ))
}

pub fn suite_smatrix(cfg: &RunConfig, s: &ScatteringFunction) -> Result<SuiteResult> {
    let fs = FockSpace::new(s.clone(), RapidityGrid::shared(cfg.grid.half_width, cfg.grid.count)?);
    let tol = cfg.tolerances.smatrix;
    let mut t = Table::new(&["n", "trials", "max_residual", "tol"]);
    let mut reports = Vec::new();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for &n in &cfg.smatrix.n_values {
        let seed = suite_rng(cfg.seed, "smatrix").gen::<u64>() ^ n as u64;
        let r = recover_smatrix(&fs, n, cfg.smatrix.trials, tol, seed)?;
        t.push(vec![n.to_string(), r.trials.to_string(), num(r.max_residual), num(tol)]);
        pass &= r.pass;
        worst = worst.max(r.max_residual);
        reports.push(r);
    }
    Ok(SuiteResult::judged("smatrix", pass, Some(worst), Some(tol), json!({ "grid": fs.grid().header(), "reports": reports }), t))
}

fn geometric_points(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps).map(|k| lo * (hi / lo).powf(k as f64 / (steps - 1) as f64)).collect(),
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn suite_curve(cfg: &RunConfig, s: &ScatteringFunction, range: Option<(f64, f64, usize)>) -> Result<SuiteResult> {
    if !s.is_bounded_class() {
        return Ok(SuiteResult::skipped("nuclearity-curve", "σ needs a = 0"));
    }
    let m = s.mass();
    let units: Vec<f64> = match range {
        Some((lo, hi, steps)) => geometric_points(lo, hi, steps),
        None => cfg.nuclearity.s_values.clone(),
    };
    let s_values: Vec<f64> = units.iter().map(|u| u / m).collect();
    let kappa = kappa_for(cfg, s);
    let curve = nuclearity_curve(s, kappa, &s_values, &nystrom(cfg))?;
    let mut t = Table::new(&["s", "sigma", "trace_norm", "trace_relative_change", "distal_bound", "minus_log_bound", "factorial_comparison"]);
    for p in &curve.points {
        t.push(vec![
            num(p.s),
            num(p.sigma),
            num(p.trace_norm),
            p.trace_relative_change.map_or(String::new(), num),
            num(p.distal.value),
            p.minus.as_ref().map_or(String::new(), |b| num(b.log_value)),
            p.factorial_comparison.map_or(String::new(), num),
        ]);
    }
    let sigmas: Vec<f64> = curve.points.iter().map(|p| p.sigma).collect();
    let traces: Vec<f64> = curve.points.iter().map(|p| p.trace_norm).collect();
    let minus: Vec<f64> = curve.points.iter().filter_map(|p| p.minus.as_ref().map(|b| b.log_value)).collect();
    let monotone = strictly_decreasing(&sigmas)
        && strictly_decreasing(&traces)
        && minus.iter().all(|v| v.is_finite())
        && strictly_decreasing(&minus);
    let mut r = SuiteResult::judged("nuclearity-curve", monotone, None, None, to_value(&curve), t);
    if monotone && curve.points.iter().any(|p| !p.trace_converged) {
        r.status = Status::NonConvergence;
    }
    Ok(r)
}

pub fn suite_smin(cfg: &RunConfig, s: &ScatteringFunction) -> Result<SuiteResult> {
    if !s.is_bounded_class() {
        return Ok(SuiteResult::skipped("find-smin", "σ needs a = 0"));
    }
    let m = s.mass();
    let kappa = kappa_for(cfg, s);
    let r = find_s_min(s, kappa, default_bracket(m), cfg.nuclearity.smin_tol / m, &nystrom(cfg))?;
    let mut t = Table::new(&["kappa", "s_min", "s_min_times_mass", "iterations"]);
    t.push(vec![num(kappa), num(r.s_min), num(r.s_min * m), r.iterations.to_string()]);
    let pass = r.s_min > 0.0 && r.s_min.is_finite();
    Ok(SuiteResult::judged("find-smin", pass, None, None, json!({ "kappa": kappa, "result": r }), t))
}

pub fn suite_bose(cfg: &RunConfig, s: &ScatteringFunction) -> Result<SuiteResult> {
    let m = s.mass();
    let opts = nystrom(cfg);
    let mut t = Table::new(&["s", "largest_phi", "largest_pi", "trace_phi", "trace_pi", "log_bound"]);
    let mut bounds = Vec::new();
    for &u in &cfg.nuclearity.bose_s {
        let b = free_bose_bound(u / m, m, &opts)?;
        t.push(vec![
            num(b.s),
            num(b.largest_phi),
            num(b.largest_pi),
            num(b.trace_phi.value),
            num(b.trace_pi.value),
            num(b.log_value),
        ]);
        bounds.push(b);
    }
    let logs: Vec<f64> = bounds.iter().filter(|b| b.log_value.is_finite()).map(|b| b.log_value).collect();
    // once the surrogate is finite at some s it must stay finite and shrink beyond it
    let first_finite = bounds.iter().position(|b| b.log_value.is_finite());
    let pass = first_finite.is_some_and(|k| bounds[k..].iter().all(|b| b.log_value.is_finite())) && strictly_decreasing(&logs);
    let mut r = SuiteResult::judged("free-bose", pass, None, None, json!({ "bounds": bounds }), t);
    if pass && bounds.iter().any(|b| !b.trace_phi.converged || !b.trace_pi.converged) {
        r.status = Status::NonConvergence;
    }
    Ok(r)
}

pub fn suite_fermi(cfg: &RunConfig, s: &ScatteringFunction) -> Result<SuiteResult> {
    let m = s.mass();
    let opts = nystrom(cfg);
    let mut t = Table::new(&["s", "trace_phi", "trace_pi", "log_fermi_bound", "log_determinant"]);
    let mut bounds = Vec::new();
    for &u in &cfg.nuclearity.fermi_s {
        let b = ising_fermi_bound(u / m, m, &opts)?;
        t.push(vec![num(b.s), num(b.trace_phi), num(b.trace_pi), num(b.log_value), num(b.log_determinant)]);
        bounds.push(b);
    }
    let pass = bounds.iter().all(|b| b.value.is_finite() && b.log_value < b.log_determinant);
    let mut r = SuiteResult::judged("ising-fermi", pass, None, None, json!({ "bounds": bounds }), t);
    if pass && bounds.iter().any(|b| !b.converged) {
        r.status = Status::NonConvergence;
    }
    Ok(r)
}

/// Least-squares slope of y against x.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn suite_partition(cfg: &RunConfig, s: &ScatteringFunction, beta: Option<f64>, r: Option<f64>) -> Result<SuiteResult> {
    if !s.is_bounded_class() || s.value_at_zero() != -1.0 {
        return Ok(SuiteResult::skipped("partition", "the partition bound needs a = 0 and S2(0) = -1"));
    }
    let m = s.mass();
    let radius = r.map(|x| x / m).or(cfg.nuclearity.partition_r).unwrap_or(1.0 / m);
    let betas: Vec<f64> = match beta {
        Some(b) => vec![b * radius],
        None => cfg.nuclearity.partition_beta.iter().map(|b| b * radius).collect(),
    };
    let kappa = kappa_for(cfg, s);
    let opts = nystrom(cfg);
    let mut t = Table::new(&["beta", "r", "mu", "s_eff", "log_bound", "heuristic"]);
    let mut bounds = Vec::new();
    for &b in &betas {
        let p = partition_bound(s, b, radius, kappa, cfg.nuclearity.improved, &opts)?;
        t.push(vec![num(p.beta), num(p.r), num(p.mu), num(p.s_eff), num(p.log_value), "true".into()]);
        bounds.push(p);
    }
    let inv: Vec<f64> = bounds.iter().map(|p| 1.0 / p.beta).collect();
    let logs: Vec<f64> = bounds.iter().map(|p| p.log_value).collect();
    let mut order: Vec<usize> = (0..bounds.len()).collect();
    order.sort_by(|&a, &b| inv[a].total_cmp(&inv[b]));
    let increasing = order.windows(2).all(|w| logs[w[1]] > logs[w[0]]);
    let fitted = if bounds.len() >= 2 { slope(&inv, &logs) } else { f64::NAN };
    let pass = logs.iter().all(|v| v.is_finite()) && (bounds.len() < 2 || (increasing && fitted > 0.0));
    Ok(SuiteResult::judged(
        "partition",
        pass,
        None,
        None,
        json!({ "kappa": kappa, "slope_log_bound_vs_inverse_beta": fitted, "heuristic": true, "bounds": bounds }),
        t,
    ))
}

type SuiteFn<'a> = Box<dyn Fn() -> Result<SuiteResult> + Send + Sync + 'a>;

fn plan<'a>(cmd: &'a Command, cfg: &'a RunConfig, s: &'a ScatteringFunction) -> Vec<(&'static str, SuiteFn<'a>)> {
    let mut v: Vec<(&'static str, SuiteFn<'a>)> = Vec::new();
    let all = matches!(cmd, Command::All);
    if all || matches!(cmd, Command::VerifyScattering) {
        v.push(("verify-scattering", Box::new(move || suite_scattering(cfg, s))));
    }
    if all || matches!(cmd, Command::VerifyAlgebra) {
        v.push(("verify-algebra", Box::new(move || suite_algebra(cfg, s))));
    }
    if all || matches!(cmd, Command::VerifyLocality) {
        v.push(("verify-locality", Box::new(move || suite_locality(cfg, s))));
    }
    if all || matches!(cmd, Command::Smatrix) {
        v.push(("smatrix", Box::new(move || suite_smatrix(cfg, s))));
    }
    match cmd {
        Command::NuclearityCurve { s_min, s_max, steps } => {
            let range = match (s_min, s_max) {
                (Some(lo), Some(hi)) => Some((*lo, *hi, steps.unwrap_or(5))),
                (Some(lo), None) => Some((*lo, *lo, 1)),
                _ => None,
            };
            v.push(("nuclearity-curve", Box::new(move || suite_curve(cfg, s, range))));
        }
        Command::All => v.push(("nuclearity-curve", Box::new(move || suite_curve(cfg, s, None)))),
        _ => {}
    }
    if all || matches!(cmd, Command::FindSmin) {
        v.push(("find-smin", Box::new(move || suite_smin(cfg, s))));
    }
    if all || matches!(cmd, Command::FreeBose) {
        v.push(("free-bose", Box::new(move || suite_bose(cfg, s))));
    }
    if all || matches!(cmd, Command::IsingFermi) {
        v.push(("ising-fermi", Box::new(move || suite_fermi(cfg, s))));
    }
    match cmd {
        Command::Partition { beta, r } => {
            v.push(("partition", Box::new(move || suite_partition(cfg, s, *beta, *r))));
        }
        Command::All => v.push(("partition", Box::new(move || suite_partition(cfg, s, None, None)))),
        _ => {}
    }
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub suite: String,
    pub seconds: f64,
}

/// Runs the suites of `cmd`; timings are returned separately so the report
/// itself stays reproducible.
pub fn run_suites(cmd: &Command, cfg: &RunConfig, parallel: bool) -> Result<(SuiteReport, Vec<Timing>)> {
    let s = cfg.model.build().map_err(|e| Error::Config { line: 0, message: e.to_string() })?;
    let jobs = plan(cmd, cfg, &s);
    let timed = |(name, job): &(&'static str, SuiteFn)| {
        let t0 = Instant::now();
        let r = job().unwrap_or_else(|e| SuiteResult::failed(name, &e));
        (r, Timing { suite: name.to_string(), seconds: t0.elapsed().as_secs_f64() })
    };
    let results: Vec<(SuiteResult, Timing)> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs.iter().map(|j| scope.spawn(move || timed(j))).collect();
            handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
        })
    } else {
        jobs.iter().map(timed).collect()
    };
    let (suites, timings): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let pass = suites.iter().all(|r| matches!(r.status, Status::Pass | Status::Skipped));
    Ok((
        SuiteReport {
            tool: "wedgeqft",
            version: VERSION,
            command: cmd.name().into(),
            seed: cfg.seed,
            pass,
            config: cfg.clone(),
            suites,
        },
        timings,
    ))
}

pub fn schema() -> String {
    let tables: [(&str, &[&str]); 9] = [
        ("verify-scattering", &["relation", "residual", "tol"]),
        ("verify-algebra", &["check", "residual", "tol"]),
        ("verify-locality", &["check", "parameter", "residual", "tol"]),
        ("smatrix", &["n", "trials", "max_residual", "tol"]),
        (
            "nuclearity-curve",
            &["s", "sigma", "trace_norm", "trace_relative_change", "distal_bound", "minus_log_bound", "factorial_comparison"],
        ),
        ("find-smin", &["kappa", "s_min", "s_min_times_mass", "iterations"]),
        ("free-bose", &["s", "largest_phi", "largest_pi", "trace_phi", "trace_pi", "log_bound"]),
        ("ising-fermi", &["s", "trace_phi", "trace_pi", "log_fermi_bound", "log_determinant"]),
        ("partition", &["beta", "r", "mu", "s_eff", "log_bound", "heuristic"]),
    ];
    let mut s = String::from("file,columns\nsummary.csv,suite|status|max_residual|tol\n");
    for (name, cols) in tables {
        let _ = writeln!(s, "{name}.csv,{}", cols.join("|"));
    }
    s
}

fn summary_csv(report: &SuiteReport) -> String {
    let mut s = String::from("suite,status,max_residual,tol\n");
    for r in &report.suites {
        let status = serde_json::to_value(r.status).expect("status serializes");
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.suite,
            status.as_str().unwrap_or_default(),
            r.max_residual.map_or(String::new(), num),
            r.tol.map_or(String::new(), num)
        );
    }
    s
}

pub fn write_report(report: &SuiteReport, timings: &[Timing], dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        written.push(p);
        Ok(())
    };
    match format {
        Format::Json => put("report.json", report.to_json())?,
        Format::Csv => {
            put("summary.csv", summary_csv(report))?;
            for r in &report.suites {
                if !r.table.header.is_empty() {
                    put(&format!("{}.csv", r.suite), r.table.to_csv())?;
                }
            }
        }
    }
    put("timings.json", serde_json::to_string_pretty(timings).expect("timings serialize") + "\n")?;
    Ok(written)
}

fn fail(e: &Error) -> i32 {
    eprintln!("{}", diagnostic(e));
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        Error::NonConvergence(_) => EXIT_NON_CONVERGENCE,
        _ => EXIT_FAIL,
    }
}

/// Parses arguments, runs, writes output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if cli.schema {
        print!("{}", schema());
        return EXIT_PASS;
    }
    let Some(cmd) = cli.command.clone() else {
        return fail(&Error::Config { line: 0, message: "no subcommand given".into() });
    };
    let Some(path) = cli.config.as_deref() else {
        return fail(&Error::Config { line: 0, message: "--config is required".into() });
    };
    let mut cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    for o in &cli.tol_override {
        if let Err(e) = cfg.apply_override(o) {
            return fail(&e);
        }
    }
    if let Some(seed) = &cli.seed {
        match parse_seed(seed) {
            Ok(s) => cfg.seed = s,
            Err(m) => return fail(&Error::Config { line: 0, message: m }),
        }
    }
    let (report, timings) = match run_suites(&cmd, &cfg, cli.parallel) {
        Ok(x) => x,
        Err(e) => return fail(&e),
    };
    for r in &report.suites {
        if let Some(d) = &r.diagnostic {
            eprintln!("{}", json!({ "suite": r.suite, "diagnostic": d }));
        }
    }
    match &cli.out {
        Some(dir) => {
            if let Err(e) = write_report(&report, &timings, dir, cli.format) {
                return fail(&e);
            }
            for r in &report.suites {
                let status = serde_json::to_value(r.status).expect("status serializes");
                println!("{:<18} {}", r.suite, status.as_str().unwrap_or_default());
            }
        }
        None => match cli.format {
            Format::Json => print!("{}", report.to_json()),
            Format::Csv => print!("{}", summary_csv(&report)),
        },
    }
    report.exit_code()
}
