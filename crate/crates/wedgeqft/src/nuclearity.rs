//! Modular nuclearity estimates: Nyström trace norms of the damped Cauchy
//! kernels, the Hardy constants σ and the bound series built from them.
//!
//! Every kernel has the form
//!
//! T(x, y) = e^{−a cosh x} Σ_j c_j / (x − s_j y + i b_j),   s_j = ±1,
//!
//! and is not square integrable in y alone uniformly in x, so the singular
//! values are taken from the Gram operator TT*. Its kernel follows from a
//! residue computation in y and is smooth in (x, x′); it is discretized on a
//! composite Gauss–Legendre grid and diagonalized.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::quadrature::gauss_legendre;
use crate::scattering_function::ScatteringFunction;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyTerm {
    pub c: C64,
    pub s: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    General { a: f64, b: f64 },
    Modular { s: f64, kappa: f64, mass: f64 },
    BosePhi { s: f64, mass: f64 },
    BosePi { s: f64, mass: f64 },
    /// T_modular with the damping replaced by an arbitrary `a`.
    Damped { a: f64, kappa: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelOperator {
    pub kind: KernelKind,
    pub damping: f64,
    pub terms: Vec<CauchyTerm>,
}

impl KernelOperator {
    /// e^{−a cosh x}/(x − y + ib)
    pub fn general(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || b == 0.0 || !b.is_finite() {
            return Err(Error::Domain(format!("T_general needs a > 0 and b ≠ 0, got a={a}, b={b}")));
        }
        Ok(KernelOperator {
            kind: KernelKind::General { a, b },
            damping: a,
            terms: vec![CauchyTerm { c: C64::new(1.0, 0.0), s: 1.0, b }],
        })
    }

    /// e^{−(ms/2) cosh θ}/(iπ(θ′ − θ − iκ/2))
    pub fn modular(s: f64, kappa: f64, mass: f64) -> Result<Self> {
        if !(s > 0.0 && mass > 0.0) || !(kappa > 0.0) {
            return Err(Error::Domain(format!(
                "T_modular needs s, m, κ > 0, got s={s}, m={mass}, κ={kappa}"
            )));
        }
        let mut k = Self::damped(0.5 * mass * s, kappa)?;
        k.kind = KernelKind::Modular { s, kappa, mass };
        Ok(k)
    }

    pub fn damped(a: f64, kappa: f64) -> Result<Self> {
        if !(a > 0.0) || !(kappa > 0.0) {
            return Err(Error::Domain(format!("damping and κ must be positive, got a={a}, κ={kappa}")));
        }
        Ok(KernelOperator {
            kind: KernelKind::Damped { a, kappa },
            damping: a,
            // 1/(iπ(y − x − iκ/2)) = (i/π)/(x − y + iκ/2)
            terms: vec![CauchyTerm { c: C64::new(0.0, 1.0 / PI), s: 1.0, b: 0.5 * kappa }],
        })
    }

    /// (1/2πi)(e^{−sm cosh θ}/(−θ′ − θ − iπ/2) − e^{−sm cosh θ}/(θ′ − θ + iπ/2))
    pub fn bose_phi(s: f64, mass: f64) -> Result<Self> {
        let inv = C64::new(0.0, -1.0 / (2.0 * PI));
        Self::bose(s, mass, -inv, KernelKind::BosePhi { s, mass }, inv)
    }

    /// (1/2πi)(e^{−sm cosh θ}/(θ′ + θ + iπ/2) − e^{−sm cosh θ}/(θ′ − θ + iπ/2))
    pub fn bose_pi(s: f64, mass: f64) -> Result<Self> {
        let inv = C64::new(0.0, -1.0 / (2.0 * PI));
        Self::bose(s, mass, inv, KernelKind::BosePi { s, mass }, inv)
    }

    fn bose(s: f64, mass: f64, c_reflected: C64, kind: KernelKind, c_direct: C64) -> Result<Self> {
        if !(s > 0.0 && mass > 0.0) {
            return Err(Error::Domain(format!("need s, m > 0, got s={s}, m={mass}")));
        }
        Ok(KernelOperator {
            kind,
            damping: s * mass,
            terms: vec![
                CauchyTerm { c: c_reflected, s: -1.0, b: FRAC_PI_2 },
                CauchyTerm { c: c_direct, s: 1.0, b: -FRAC_PI_2 },
            ],
        })
    }

    /// Same kernel with every b_j negated.
    pub fn mirrored(&self) -> Self {
        let mut k = self.clone();
        for t in &mut k.terms {
            t.b = -t.b;
        }
        k
    }

    pub fn value(&self, x: f64, y: f64) -> C64 {
        let d = (-self.damping * x.cosh()).exp();
        self.terms
            .iter()
            .map(|t| t.c / C64::new(x - t.s * y, t.b))
            .sum::<C64>()
            * d
    }

    /// (TT*)(x, x′) with the y integral done by residues.
    pub fn gram(&self, x: f64, xp: f64) -> C64 {
        let d = (-self.damping * (x.cosh() + xp.cosh())).exp();
        if d == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let mut acc = C64::new(0.0, 0.0);
        for tj in &self.terms {
            // x − s_j y + i b_j = −s_j (y − p1)
            let p1 = C64::new(x, tj.b) * tj.s;
            for tk in &self.terms {
                let p2 = C64::new(xp, -tk.b) * tk.s;
                let j = cauchy_pair(p1, p2);
                acc += tj.c * tk.c.conj() * (tj.s * tk.s) * j;
            }
        }
        acc * d
    }

    /// Half-width beyond which e^{−a(cosh x − 1)} < e^{−25}.
    pub fn effective_half_width(&self, cap: f64) -> f64 {
        (1.0 + 25.0 / self.damping).acosh().min(cap)
    }
}

/// ∫ dy / ((y − p1)(y − p2)) over the real line.
fn cauchy_pair(p1: C64, p2: C64) -> C64 {
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    match (p1.im > 0.0, p2.im > 0.0) {
        (true, false) => two_pi_i / (p1 - p2),
        (false, true) => two_pi_i / (p2 - p1),
        _ => C64::new(0.0, 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NystromOptions {
    /// Upper limit of the window half-width L.
    pub half_width: f64,
    /// Node count M.
    pub nodes: usize,
    pub refine: bool,
    pub rel_tol: f64,
    pub max_doublings: usize,
}

impl Default for NystromOptions {
    fn default() -> Self {
        NystromOptions {
            half_width: 12.0,
            nodes: 400,
            refine: true,
            rel_tol: 1e-3,
            max_doublings: 3,
        }
    }
}

impl NystromOptions {
    pub fn single(half_width: f64, nodes: usize) -> Self {
        NystromOptions {
            half_width,
            nodes,
            refine: false,
            ..Self::default()
        }
    }
}

const PANEL_ORDER: usize = 16;

/// Singular values of `k` from the M-node discretization of TT* on
/// [−L_eff, L_eff], L_eff = min(L, effective window), in decreasing order.
pub fn singular_values(k: &KernelOperator, half_width: f64, nodes: usize) -> Result<Vec<f64>> {
    if !(k.damping > 0.0) {
        return Err(Error::Domain("trace norms need positive damping".into()));
    }
    if !(half_width > 0.0) || nodes < PANEL_ORDER {
        return Err(Error::Domain(format!(
            "Nyström grid needs L > 0 and M ≥ {PANEL_ORDER}, got L={half_width}, M={nodes}"
        )));
    }
    let l = k.effective_half_width(half_width);
    let panels = nodes.div_ceil(PANEL_ORDER);
    let rule = gauss_legendre(PANEL_ORDER);
    let h = 2.0 * l / panels as f64;
    let mut xs = Vec::with_capacity(panels * PANEL_ORDER);
    let mut ws = Vec::with_capacity(panels * PANEL_ORDER);
    for p in 0..panels {
        let mid = -l + (p as f64 + 0.5) * h;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            xs.push(mid + 0.5 * h * t);
            ws.push((0.5 * h * w).sqrt());
        }
    }
    let n = xs.len();
    let mut g = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = k.gram(xs[i], xs[j]) * (ws[i] * ws[j]);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    let eig = g.symmetric_eigenvalues();
    let top = eig.iter().cloned().fold(0.0, f64::max);
    // eigenvalues below the round-off level of the diagonalization are noise
    let floor = top * f64::EPSILON * n as f64;
    let mut sv: Vec<f64> = eig.iter().filter(|&&l| l > floor).map(|l| l.sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementStep {
    pub half_width: f64,
    pub nodes: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceNormEstimate {
    pub value: f64,
    pub half_width: f64,
    pub nodes: usize,
    /// |last − previous| / last under (2L, 2M); absent without refinement.
    pub relative_change: Option<f64>,
    pub converged: bool,
    pub steps: Vec<RefinementStep>,
    /// Spectrum of the final discretization.
    pub singular_values: Vec<f64>,
}

impl TraceNormEstimate {
    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

/// Σ singular values; with `refine`, (L, M) doubles until the relative
/// change drops below `rel_tol`. Missing the budget is flagged, not an error.
pub fn trace_norm_estimate(k: &KernelOperator, opts: &NystromOptions) -> Result<TraceNormEstimate> {
    let mut l = opts.half_width;
    let mut m = opts.nodes;
    let mut sv = singular_values(k, l, m)?;
    let mut value: f64 = sv.iter().sum();
    let mut steps = vec![RefinementStep { half_width: l, nodes: m, value }];
    if !opts.refine {
        return Ok(TraceNormEstimate {
            value,
            half_width: l,
            nodes: m,
            relative_change: None,
            converged: true,
            steps,
            singular_values: sv,
        });
    }
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_doublings.max(1) {
        l *= 2.0;
        m *= 2;
        sv = singular_values(k, l, m)?;
        let next: f64 = sv.iter().sum();
        change = if next == 0.0 { (next - value).abs() } else { ((next - value) / next).abs() };
        value = next;
        steps.push(RefinementStep { half_width: l, nodes: m, value });
        if change < opts.rel_tol {
            break;
        }
    }
    Ok(TraceNormEstimate {
        value,
        half_width: l,
        nodes: m,
        relative_change: Some(change),
        converged: change < opts.rel_tol,
        steps,
        singular_values: sv,
    })
}

/// Closed-form trace-norm bound for e^{−a cosh x}/(x − y + ib); b < 0 is
/// handled through |b|.
pub fn analytic_trace_bound(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || b == 0.0 || !b.is_finite() {
        return Err(Error::Domain(format!("bound needs a > 0 and b ≠ 0, got a={a}, b={b}")));
    }
    let b = b.abs();
    let b2 = b * b;
    Ok(2f64.powf(0.25)
        * PI.powf(0.75)
        * (-a).exp()
        / a.powf(0.25)
        * ((PI / 2.0).sqrt() + 0.25 / a).sqrt()
        * ((b2 * b2 + 4.0 * b2 + 24.0) / (b2 * b2 * b)).sqrt())
}

fn check_hardy(s_fn: &ScatteringFunction, s: f64, kappa: f64) -> Result<f64> {
    if !s_fn.is_bounded_class() {
        return Err(Error::Model("σ needs a = 0 (bounded scattering function)".into()));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("splitting distance must be positive, got {s}")));
    }
    s_fn.strip_sup_norm(kappa)
}

/// σ(s, κ) = 2√2 e^{−ms cos κ} ‖S₂‖_κ / √((ms/2) cos κ (κ(S₂) − κ)).
pub fn sigma(s_fn: &ScatteringFunction, s: f64, kappa: f64) -> Result<f64> {
    let norm = check_hardy(s_fn, s, kappa)?;
    Ok(sigma_with_norm(s_fn.mass() * s, kappa, s_fn.kappa(), norm))
}

fn sigma_with_norm(ms: f64, kappa: f64, kappa_s: f64, norm: f64) -> f64 {
    let c = kappa.cos();
    2.0 * 2f64.sqrt() * (-ms * c).exp() * norm / (0.5 * ms * c * (kappa_s - kappa)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesBound {
    /// Ratio x of the series.
    pub x: f64,
    pub log_value: f64,
    /// e^{log_value}; +∞ for a divergent series or on overflow.
    pub value: f64,
    pub finite: bool,
    pub terms: usize,
}

impl SeriesBound {
    fn from_log(x: f64, log_value: f64, terms: usize) -> Self {
        SeriesBound {
            x,
            log_value,
            value: log_value.exp(),
            finite: log_value.is_finite(),
            terms,
        }
    }
}

/// Σ xⁿ (geometric).
pub fn geometric_series(x: f64) -> SeriesBound {
    if x < 1.0 {
        SeriesBound::from_log(x, -(1.0 - x).ln(), 0)
    } else {
        SeriesBound::from_log(x, f64::INFINITY, 0)
    }
}

/// Σ_{n≥0} xⁿ/√n!, summed in log space to a relative tail below 1e−12.
pub fn sqrt_factorial_series(x: f64) -> Result<SeriesBound> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("series ratio must be finite and ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(SeriesBound::from_log(0.0, 0.0, 1));
    }
    let lx = x.ln();
    // terms peak near n ≈ x², so sum relative to a running maximum
    let mut log_term = 0.0;
    let mut log_max = 0.0;
    let mut acc = 1.0;
    let mut n = 0usize;
    const LIMIT: usize = 500_000_000;
    loop {
        n += 1;
        log_term += lx - 0.5 * (n as f64).ln();
        if log_term > log_max {
            acc *= (log_max - log_term).exp();
            log_max = log_term;
        }
        acc += (log_term - log_max).exp();
        let r = x / ((n + 1) as f64).sqrt();
        if r < 0.5 {
            // geometric majorant of the remaining terms
            let tail = (log_term - log_max).exp() * r / (1.0 - r);
            if tail < 1e-12 * acc {
                break;
            }
        }
        if n >= LIMIT {
            return Err(Error::NonConvergence(format!("series at x={x} needs more than {LIMIT} terms")));
        }
    }
    Ok(SeriesBound::from_log(x, log_max + acc.ln(), n + 1))
}

/// Inputs shared by the distal and S₀⁻ bounds at one splitting distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularPoint {
    pub s: f64,
    pub sigma: f64,
    pub strip_norm: f64,
    pub trace: TraceNormEstimate,
}

pub fn modular_point(s_fn: &ScatteringFunction, s: f64, kappa: f64, opts: &NystromOptions) -> Result<ModularPoint> {
    let strip_norm = check_hardy(s_fn, s, kappa)?;
    let sigma = sigma_with_norm(s_fn.mass() * s, kappa, s_fn.kappa(), strip_norm);
    let trace = trace_norm_estimate(&KernelOperator::modular(s, kappa, s_fn.mass())?, opts)?;
    Ok(ModularPoint { s, sigma, strip_norm, trace })
}

/// Geometric series in x = σ(s, κ)·‖T_{s,κ}‖₁.
pub fn xi_bound_distal(s_fn: &ScatteringFunction, s: f64, kappa: f64, opts: &NystromOptions) -> Result<SeriesBound> {
    let p = modular_point(s_fn, s, kappa, opts)?;
    Ok(geometric_series(p.sigma * p.trace.value))
}

fn require_minus(s_fn: &ScatteringFunction) -> Result<()> {
    if s_fn.value_at_zero() != -1.0 {
        return Err(Error::Model("the all-distance bound needs S₂(0) = −1".into()));
    }
    Ok(())
}

/// Σ xⁿ/√n! with x = σ(s, κ)·‖S₂‖_κ^{1/2}·‖T_{s,κ}‖₁.
pub fn xi_bound_minus(s_fn: &ScatteringFunction, s: f64, kappa: f64, opts: &NystromOptions) -> Result<SeriesBound> {
    require_minus(s_fn)?;
    let p = modular_point(s_fn, s, kappa, opts)?;
    sqrt_factorial_series(p.sigma * p.strip_norm.sqrt() * p.trace.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SminResult {
    pub s_min: f64,
    pub bracket: (f64, f64),
    pub tol: f64,
    pub iterations: usize,
    /// Objective σ·‖T‖₁ − 1 at the bracket ends.
    pub objective_ends: (f64, f64),
}

pub fn default_bracket(mass: f64) -> (f64, f64) {
    (1e-3 / mass, 50.0 / mass)
}

/// σ(s, κ)·‖T_{s,κ}‖₁ − 1
pub fn smin_objective(s_fn: &ScatteringFunction, s: f64, kappa: f64, opts: &NystromOptions) -> Result<f64> {
    let p = modular_point(s_fn, s, kappa, opts)?;
    Ok(p.sigma * p.trace.value - 1.0)
}

/// Root of the decreasing objective by bisection.
pub fn find_s_min(
    s_fn: &ScatteringFunction,
    kappa: f64,
    bracket: (f64, f64),
    tol: f64,
    opts: &NystromOptions,
) -> Result<SminResult> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) || !(tol > 0.0) {
        return Err(Error::Domain(format!("invalid bracket ({lo}, {hi}) or tolerance {tol}")));
    }
    let f_lo = smin_objective(s_fn, lo, kappa, opts)?;
    let f_hi = smin_objective(s_fn, hi, kappa, opts)?;
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::Domain(format!(
            "no sign change on ({lo}, {hi}): objective {f_lo:e} and {f_hi:e}"
        )));
    }
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if smin_objective(s_fn, mid, kappa, opts)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NonConvergence("bisection did not reach the tolerance".into()));
        }
    }
    Ok(SminResult {
        s_min: 0.5 * (lo + hi),
        bracket,
        tol,
        iterations,
        objective_ends: (f_lo, f_hi),
    })
}

/// log ∏(1 − t_i)^{−2}; +∞ once some t_i ≥ 1.
pub fn log_determinant_bound(singular_values: &[f64]) -> f64 {
    if singular_values.iter().any(|&t| t >= 1.0) {
        return f64::INFINITY;
    }
    -2.0 * singular_values.iter().map(|&t| (-t).ln_1p()).sum::<f64>()
}

fn bose_pair(s: f64, mass: f64, opts: &NystromOptions) -> Result<(TraceNormEstimate, TraceNormEstimate)> {
    let phi = KernelOperator::bose_phi(s, mass)?;
    let pi = KernelOperator::bose_pi(s, mass)?;
    std::thread::scope(|scope| {
        let h = scope.spawn(|| trace_norm_estimate(&pi, opts));
        let a = trace_norm_estimate(&phi, opts)?;
        let b = h.join().map_err(|_| Error::NonConvergence("trace-norm worker panicked".into()))??;
        Ok((a, b))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoseBound {
    pub s: f64,
    pub mass: f64,
    pub largest_phi: f64,
    pub largest_pi: f64,
    pub trace_phi: TraceNormEstimate,
    pub trace_pi: TraceNormEstimate,
    pub log_value: f64,
    pub value: f64,
    /// Built from the unprojected kernels, so never smaller than the
    /// projected determinant.
    pub conservative_surrogate: bool,
}

/// ∏(1 − t_i)^{−2} over the singular values of T_φ(s) and T_π(s).
pub fn free_bose_bound(s: f64, mass: f64, opts: &NystromOptions) -> Result<BoseBound> {
    let (phi, pi) = bose_pair(s, mass, opts)?;
    let log_value = log_determinant_bound(&phi.singular_values) + log_determinant_bound(&pi.singular_values);
    Ok(BoseBound {
        s,
        mass,
        largest_phi: phi.largest(),
        largest_pi: pi.largest(),
        log_value,
        value: log_value.exp(),
        trace_phi: phi,
        trace_pi: pi,
        conservative_surrogate: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermiBound {
    pub s: f64,
    pub mass: f64,
    pub trace_phi: f64,
    pub trace_pi: f64,
    /// 2(‖T_φ‖₁ + ‖T_π‖₁)
    pub log_value: f64,
    pub value: f64,
    /// log ∏(1 − t_i)^{−2} on the same spectrum.
    pub log_determinant: f64,
    pub converged: bool,
}

/// exp(2‖T_φ(s)‖₁ + 2‖T_π(s)‖₁)
pub fn ising_fermi_bound(s: f64, mass: f64, opts: &NystromOptions) -> Result<FermiBound> {
    let (phi, pi) = bose_pair(s, mass, opts)?;
    let log_value = 2.0 * (phi.value + pi.value);
    Ok(FermiBound {
        s,
        mass,
        trace_phi: phi.value,
        trace_pi: pi.value,
        log_value,
        value: log_value.exp(),
        log_determinant: log_determinant_bound(&phi.singular_values) + log_determinant_bound(&pi.singular_values),
        converged: phi.converged && pi.converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionBound {
    pub beta: f64,
    pub r: f64,
    pub mu: f64,
    /// r·sin(2πμ), the splitting distance whose damping is used.
    pub s_eff: f64,
    pub factor: f64,
    pub series: SeriesBound,
    pub log_value: f64,
    pub value: f64,
    pub heuristic: bool,
}

/// (2 or 1)·Σ xⁿ/√n! with the damping e^{−(rm/2) sin(2πμ) cosh θ},
/// μ = arctan(β/2r)/2π. The damping substitution is an extrapolation.
pub fn partition_bound(
    s_fn: &ScatteringFunction,
    beta: f64,
    r: f64,
    kappa: f64,
    improved: bool,
    opts: &NystromOptions,
) -> Result<PartitionBound> {
    require_minus(s_fn)?;
    if !(beta > 0.0 && r > 0.0) {
        return Err(Error::Domain(format!("need β, r > 0, got β={beta}, r={r}")));
    }
    let mu = (beta / (2.0 * r)).atan() / (2.0 * PI);
    let s_eff = r * (2.0 * PI * mu).sin();
    if !(s_eff > 0.0) {
        return Err(Error::Domain(format!("effective damping is not positive at μ={mu}")));
    }
    let series = xi_bound_minus(s_fn, s_eff, kappa, opts)?;
    let factor: f64 = if improved { 1.0 } else { 2.0 };
    let log_value = factor.ln() + series.log_value;
    Ok(PartitionBound {
        beta,
        r,
        mu,
        s_eff,
        factor,
        log_value,
        value: factor * series.value,
        series,
        heuristic: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub s: f64,
    pub sigma: f64,
    pub trace_norm: f64,
    pub trace_relative_change: Option<f64>,
    pub trace_converged: bool,
    pub distal: SeriesBound,
    /// Σ xⁿ/√n!, for S₂(0) = −1 only.
    pub minus: Option<SeriesBound>,
    /// Σ xⁿ/n! on the same x, a comparison curve only.
    pub factorial_comparison: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuclearityCurve {
    pub kappa: f64,
    pub kappa_s: f64,
    pub strip_norm: f64,
    /// σ(s, κ) uses the splitting distance s directly (the Hardy-bound
    /// constant quoted for 2s with s/2 substituted).
    pub sigma_convention: String,
    pub points: Vec<CurvePoint>,
}

pub fn nuclearity_curve(
    s_fn: &ScatteringFunction,
    kappa: f64,
    s_values: &[f64],
    opts: &NystromOptions,
) -> Result<NuclearityCurve> {
    let minus = s_fn.value_at_zero() == -1.0;
    let mut points = Vec::with_capacity(s_values.len());
    let mut strip_norm = f64::NAN;
    for &s in s_values {
        let p = modular_point(s_fn, s, kappa, opts)?;
        strip_norm = p.strip_norm;
        let x = p.sigma * p.trace.value;
        let (minus_bound, comparison) = if minus {
            let xm = x * p.strip_norm.sqrt();
            (Some(sqrt_factorial_series(xm)?), Some(xm.exp()))
        } else {
            (None, None)
        };
        points.push(CurvePoint {
            s,
            sigma: p.sigma,
            trace_norm: p.trace.value,
            trace_relative_change: p.trace.relative_change,
            trace_converged: p.trace.converged,
            distal: geometric_series(x),
            minus: minus_bound,
            factorial_comparison: comparison,
        });
    }
    Ok(NuclearityCurve {
        kappa,
        kappa_s: s_fn.kappa(),
        strip_norm,
        sigma_convention: "sigma(s,kappa) = 2*sqrt(2)*exp(-m*s*cos(kappa))*norm/sqrt((m*s/2)*cos(kappa)*(kappa_S-kappa))"
            .into(),
        points,
    })
}

#[cfg(test)]
mod tests;
