//! Relative wedge-locality checks: the commutator functions B_n and C_n,
//! the contour identity B_n + C_n = 0 and the commutator [φ′(f), φ(g)] on
//! truncated Fock vectors.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fields::{field_phi, field_phi_prime, TestFunction2D};
use crate::fock_space::{FockSpace, FockVector, RapidityGrid, WaveFunction1};
use crate::quadrature::{adaptive_gk, composite_gl};
use crate::scattering_function::{ScatteringFunction, Sign};
use crate::{Error, Result, C64};

/// Floor for relative residuals, avoiding 0/0 for vanishing integrals.
pub const RELATIVE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    Adaptive { abs_tol: f64, rel_tol: f64, max_segments: usize },
    Composite { panels: usize, order: usize },
}

/// Quadrature on [−window, window] for θ-integrals along a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineQuadrature {
    pub window: f64,
    pub rule: Rule,
    /// Accepted tail estimate relative to the integral.
    pub tail_tol: f64,
}

impl Default for LineQuadrature {
    fn default() -> Self {
        LineQuadrature {
            window: 8.0,
            rule: Rule::Adaptive {
                abs_tol: 1e-16,
                rel_tol: 1e-11,
                max_segments: 4000,
            },
            tail_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineIntegral {
    pub value: C64,
    pub error_estimate: f64,
    pub tail_estimate: f64,
    pub evaluations: usize,
}

/// Envelope maximum of |F| on [lo, hi] from a few samples.
fn envelope<F: FnMut(f64) -> Result<C64>>(f: &mut F, lo: f64, hi: f64) -> Result<f64> {
    let mut m = 0.0f64;
    for k in 0..=8 {
        m = m.max(f(lo + (hi - lo) * k as f64 / 8.0)?.norm());
    }
    Ok(m)
}

/// Tail beyond ±W extrapolated from the envelope decay over the last two
/// unit intervals, assuming at least exponential decay.
fn tail_estimate<F: FnMut(f64) -> Result<C64>>(f: &mut F, w: f64) -> Result<f64> {
    let mut total = 0.0;
    for side in [1.0, -1.0] {
        let outer = envelope(&mut |t| f(side * t), w - 1.0, w)?;
        if outer == 0.0 {
            continue;
        }
        let inner = envelope(&mut |t| f(side * t), w - 2.0, w - 1.0)?;
        let r = outer / inner;
        if !(r < 1.0) {
            return Ok(f64::INFINITY);
        }
        total += outer * r / (1.0 - r);
    }
    Ok(total)
}

/// ∫ F(θ) dθ over the real line.
pub fn integrate_line<F: FnMut(f64) -> Result<C64>>(quad: &LineQuadrature, mut f: F) -> Result<LineIntegral> {
    if !(quad.window > 2.0) {
        return Err(Error::Domain(format!("quadrature window must exceed 2, got {}", quad.window)));
    }
    let w = quad.window;
    let mut failure = None;
    let mut guarded = |t: f64| match f(t) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            C64::new(0.0, 0.0)
        }
    };
    let (value, error_estimate, evaluations) = match quad.rule {
        Rule::Adaptive { abs_tol, rel_tol, max_segments } => {
            let r = adaptive_gk(-w, w, abs_tol, rel_tol, max_segments, &mut guarded);
            (r.value, r.error, r.evaluations)
        }
        Rule::Composite { panels, order } => {
            if panels == 0 || order == 0 {
                return Err(Error::Domain("composite rule needs panels and order > 0".into()));
            }
            (composite_gl(-w, w, panels, order, &mut guarded), f64::NAN, panels * order)
        }
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let tail = tail_estimate(&mut f, w)?;
    if tail > quad.tail_tol * value.norm().max(RELATIVE_FLOOR) {
        return Err(Error::NonConvergence(format!(
            "tail beyond |theta| = {w} estimated at {tail:.3e} against integral {:.3e}",
            value.norm()
        )));
    }
    Ok(LineIntegral {
        value,
        error_estimate,
        tail_estimate: tail,
        evaluations,
    })
}

fn product_s(s: &ScatteringFunction, theta: f64, spectators: &[f64], reversed: bool) -> C64 {
    spectators
        .iter()
        .map(|&t| if reversed { s.at(t - theta) } else { s.at(theta - t) })
        .product()
}

/// B_n(θ⃗) = ∫ dθ ψ₁(θ)ψ₂(θ) ∏_j S₂(θ − θ_j).
pub fn eval_b<P>(s: &ScatteringFunction, product: P, spectators: &[f64], quad: &LineQuadrature) -> Result<LineIntegral>
where
    P: Fn(f64) -> Result<C64>,
{
    integrate_line(quad, |t| Ok(product(t)? * product_s(s, t, spectators, false)))
}

/// C_n(θ⃗) = −∫ dθ ψ₁(θ)ψ₂(θ) ∏_j S₂(θ_j − θ).
pub fn eval_c<P>(s: &ScatteringFunction, product: P, spectators: &[f64], quad: &LineQuadrature) -> Result<LineIntegral>
where
    P: Fn(f64) -> Result<C64>,
{
    let mut r = integrate_line(quad, |t| Ok(product(t)? * product_s(s, t, spectators, true)))?;
    r.value = -r.value;
    Ok(r)
}

/// Memoized products f⁻g⁺ and f⁺g⁻ of mass-shell restrictions.
pub struct MassShellPair<'a> {
    f: &'a TestFunction2D,
    g: &'a TestFunction2D,
    mass: f64,
    cache: RefCell<HashMap<u64, (C64, C64)>>,
}

impl<'a> MassShellPair<'a> {
    pub fn new(f: &'a TestFunction2D, g: &'a TestFunction2D, mass: f64) -> Self {
        MassShellPair {
            f,
            g,
            mass,
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn both(&self, theta: f64) -> Result<(C64, C64)> {
        if let Some(v) = self.cache.borrow().get(&theta.to_bits()) {
            return Ok(*v);
        }
        let z = C64::new(theta, 0.0);
        let fm = self.f.mass_shell(Sign::Minus, z, self.mass)?;
        let fp = self.f.mass_shell(Sign::Plus, z, self.mass)?;
        let gm = self.g.mass_shell(Sign::Minus, z, self.mass)?;
        let gp = self.g.mass_shell(Sign::Plus, z, self.mass)?;
        let v = (fm * gp, fp * gm);
        self.cache.borrow_mut().insert(theta.to_bits(), v);
        Ok(v)
    }

    /// f⁻(θ)g⁺(θ)
    pub fn minus_plus(&self, theta: f64) -> Result<C64> {
        Ok(self.both(theta)?.0)
    }

    /// f⁺(θ)g⁻(θ)
    pub fn plus_minus(&self, theta: f64) -> Result<C64> {
        Ok(self.both(theta)?.1)
    }

    /// f⁻(θ+iπ)g⁺(θ+iπ), evaluated at the complex rapidity.
    pub fn shifted(&self, theta: f64) -> Result<C64> {
        let z = C64::new(theta, PI);
        Ok(self.f.mass_shell(Sign::Minus, z, self.mass)? * self.g.mass_shell(Sign::Plus, z, self.mass)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourOptions {
    pub quadrature: LineQuadrature,
    /// Skip the wedge-support precondition (negative controls only).
    pub skip_support_check: bool,
    /// Also integrate along Im θ = π.
    pub shift_check: bool,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions {
            quadrature: LineQuadrature::default(),
            skip_support_check: false,
            shift_check: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSample {
    pub spectators: Vec<f64>,
    pub b: C64,
    pub c: C64,
    pub abs_sum: f64,
    pub relative: f64,
    /// |B_shifted − B| / max(|B|, floor), when computed.
    pub shift_relative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourReport {
    pub n: usize,
    pub samples: Vec<ContourSample>,
    pub max_relative: f64,
    pub max_shift_relative: f64,
    pub tol: f64,
    pub pass: bool,
}

fn check_wedges(f: &TestFunction2D, g: &TestFunction2D) -> Result<()> {
    if !f.in_right_wedge() {
        return Err(Error::Support(format!("f must be supported in W_R, box {:?}", f.support_box())));
    }
    if !g.in_left_wedge() {
        return Err(Error::Support(format!("g must be supported in W_L, box {:?}", g.support_box())));
    }
    Ok(())
}

/// Relative residual |B + C| / max(|B|, |C|, floor) of B_n^{f⁻,g⁺} + C_n^{f⁺,g⁻}
/// at each spectator tuple, for f in W_R and g in W_L.
pub fn verify_contour_identity(
    s: &ScatteringFunction,
    f: &TestFunction2D,
    g: &TestFunction2D,
    spectators: &[Vec<f64>],
    tol: f64,
    opts: &ContourOptions,
) -> Result<ContourReport> {
    if !opts.skip_support_check {
        check_wedges(f, g)?;
    }
    if !s.is_bounded_class() {
        return Err(Error::Model("contour identity needs a = 0 so that S2 is bounded on the strip".into()));
    }
    let n = spectators.first().map_or(0, Vec::len);
    if spectators.iter().any(|t| t.len() != n) {
        return Err(Error::Shape("all spectator tuples must have the same length".into()));
    }
    let pair = MassShellPair::new(f, g, s.mass());
    let quad = &opts.quadrature;
    let mut samples = Vec::with_capacity(spectators.len());
    for thetas in spectators {
        let b = eval_b(s, |t| pair.minus_plus(t), thetas, quad)?.value;
        let c = eval_c(s, |t| pair.plus_minus(t), thetas, quad)?.value;
        let scale = b.norm().max(c.norm()).max(RELATIVE_FLOOR);
        let shift_relative = if opts.shift_check {
            let shifted = integrate_line(quad, |t| {
                let mut v = pair.shifted(t)?;
                for &tj in thetas {
                    v *= s.evaluate(C64::new(t - tj, PI))?;
                }
                Ok(v)
            })?
            .value;
            Some((shifted - b).norm() / b.norm().max(RELATIVE_FLOOR))
        } else {
            None
        };
        samples.push(ContourSample {
            spectators: thetas.clone(),
            b,
            c,
            abs_sum: (b + c).norm(),
            relative: (b + c).norm() / scale,
            shift_relative,
        });
    }
    let max_relative = samples.iter().map(|x| x.relative).fold(0.0, f64::max);
    let max_shift_relative = samples.iter().filter_map(|x| x.shift_relative).fold(0.0, f64::max);
    Ok(ContourReport {
        n,
        pass: max_relative <= tol && max_shift_relative <= tol,
        samples,
        max_relative,
        max_shift_relative,
        tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    /// Quadrature order per panel, or grid node count.
    pub steps: Vec<usize>,
    pub residuals: Vec<f64>,
    /// Required reduction factor between consecutive steps.
    pub factor: f64,
    /// Residuals below this count as converged.
    pub floor: f64,
    pub pass: bool,
}

impl RefinementStudy {
    fn judge(steps: Vec<usize>, residuals: Vec<f64>, factor: f64, floor: f64) -> Self {
        let pass = residuals
            .windows(2)
            .all(|w| w[0] <= floor || w[1] <= floor || w[1] * factor <= w[0]);
        RefinementStudy {
            steps,
            residuals,
            factor,
            floor,
            pass,
        }
    }
}

/// Composite Gauss–Legendre at doubling orders; the contour residual
/// should drop by at least 10× per doubling until it reaches the floor.
pub fn contour_order_study(
    s: &ScatteringFunction,
    f: &TestFunction2D,
    g: &TestFunction2D,
    spectators: &[f64],
    window: f64,
    panels: usize,
    orders: &[usize],
    floor: f64,
) -> Result<RefinementStudy> {
    check_wedges(f, g)?;
    let pair = MassShellPair::new(f, g, s.mass());
    let mut residuals = Vec::with_capacity(orders.len());
    for &order in orders {
        let quad = LineQuadrature {
            window,
            rule: Rule::Composite { panels, order },
            tail_tol: f64::INFINITY,
        };
        let b = eval_b(s, |t| pair.minus_plus(t), spectators, &quad)?.value;
        let c = eval_c(s, |t| pair.plus_minus(t), spectators, &quad)?.value;
        residuals.push((b + c).norm() / b.norm().max(c.norm()).max(RELATIVE_FLOOR));
    }
    Ok(RefinementStudy::judge(orders.to_vec(), residuals, 10.0, floor))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorReport {
    /// ‖[φ′(f), φ(g)]Φ‖ / ‖Φ‖
    pub residual: f64,
    /// Weighted norm of the commutator in each particle number.
    pub per_particle: Vec<f64>,
    pub tol: f64,
    pub pass: bool,
}

/// ‖φ′(f)φ(g)Φ − φ(g)φ′(f)Φ‖ / ‖Φ‖.
pub fn verify_operator_commutator(
    fs: &FockSpace,
    f: &TestFunction2D,
    g: &TestFunction2D,
    phi: &FockVector,
    tol: f64,
    skip_support_check: bool,
) -> Result<OperatorReport> {
    if !skip_support_check {
        check_wedges(f, g)?;
    }
    let norm = phi.norm();
    if norm == 0.0 {
        return Err(Error::Domain("commutator residual needs a nonzero vector".into()));
    }
    let a = field_phi_prime(fs, f, &field_phi(fs, g, phi)?)?;
    let b = field_phi(fs, g, &field_phi_prime(fs, f, phi)?)?;
    let d = a.sub(&b)?;
    let w = fs.grid().weights();
    let per_particle: Vec<f64> = d.components().iter().map(|t| t.norm_sqr(w).sqrt()).collect();
    let residual = d.norm() / norm;
    Ok(OperatorReport {
        residual,
        per_particle,
        tol,
        pass: residual <= tol,
    })
}

/// Grid-independent probe Ω + z†(ψ)Ω + … + (z†(ψ))^k Ω / k! with
/// ψ(θ) = e^{−θ²/2}, sampled on the space's grid.
pub fn smooth_probe(fs: &FockSpace, n_max: usize) -> Result<FockVector> {
    let psi = fs.grid().sample(|t| C64::new((-0.5 * t * t).exp(), 0.0));
    let mut term = fs.vacuum();
    let mut total = term.clone();
    for k in 1..=n_max {
        term = fs.create(&psi, &term)?.scale(C64::new(1.0 / k as f64, 0.0));
        total = total.add(&term)?;
    }
    Ok(total)
}

/// Commutator residual on the smooth probe for each node count; each
/// doubling of the grid density should at least halve it until the floor.
pub fn grid_doubling_study(
    model: &ScatteringFunction,
    f: &TestFunction2D,
    g: &TestFunction2D,
    half_width: f64,
    counts: &[usize],
    probe_n: usize,
    floor: f64,
) -> Result<RefinementStudy> {
    let mut residuals = Vec::with_capacity(counts.len());
    for &count in counts {
        let fs = FockSpace::new(model.clone(), RapidityGrid::shared(half_width, count)?);
        let phi = smooth_probe(&fs, probe_n)?;
        residuals.push(verify_operator_commutator(&fs, f, g, &phi, f64::INFINITY, false)?.residual);
    }
    Ok(RefinementStudy::judge(counts.to_vec(), residuals, 2.0, floor))
}

/// Trapezoid sum Σ_k w_k ψ₁(θ_k)ψ₂(θ_k) ∏_j S₂(θ_k − θ_j) on the grid.
pub fn grid_b(s: &ScatteringFunction, psi1: &WaveFunction1, psi2: &WaveFunction1, spectators: &[f64]) -> C64 {
    let grid = &psi1.grid;
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .enumerate()
        .map(|(k, (&t, &w))| psi1.values[k] * psi2.values[k] * product_s(s, t, spectators, false) * w)
        .sum()
}
