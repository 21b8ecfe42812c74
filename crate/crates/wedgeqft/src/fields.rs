//! Test functions with evaluable mass-shell restrictions and the fields
//! φ, φ′ and the time-zero pair acting on Fock vectors.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fock_space::{lorentz, FockSpace, FockVector, PoincareElement, RapidityGrid, Tensor, WaveFunction1};
use crate::quadrature::gauss_legendre;
use crate::scattering_function::Sign;
use crate::{Error, Result, C64};

/// Largest |Im(p(ζ)·x)| over the support accepted by bump quadrature.
pub const DEFAULT_EXPONENT_CAP: f64 = 700.0;
/// Default Gauss–Legendre order per bump axis.
pub const DEFAULT_BUMP_ORDER: usize = 64;

/// `A · exp(−½ (x−c)ᵀ M (x−c) + i q·x)` with M symmetric positive definite
/// (Euclidean dot product in the exponent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub center: [f64; 2],
    pub metric: [[f64; 2]; 2],
    pub q: [f64; 2],
    pub amplitude: C64,
}

/// `A · b((x₀−c₀)/h₀) · b((x₁−c₁)/h₁)` with `b(u) = exp(−α/(1−u²))` on |u| < 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 2],
    pub half_widths: [f64; 2],
    pub profile: f64,
    pub amplitude: C64,
    pub order: usize,
    pub exponent_cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction2D {
    Gaussian(Gaussian),
    CompactBump(Bump),
}

fn bump_profile(alpha: f64, u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-alpha / (1.0 - u * u)).exp()
    }
}

/// ∫_{-1}^{1} b(u) e^{iκu} du by Gauss–Legendre with enough nodes to resolve
/// the oscillation.
fn bump_transform_unit(alpha: f64, kappa: C64, order: usize) -> C64 {
    let extra = (0.75 * kappa.re.abs()).ceil() as usize;
    let n = (order + extra).div_ceil(16) * 16;
    let rule = gauss_legendre(n);
    let mut acc = C64::new(0.0, 0.0);
    for (u, w) in rule.nodes.iter().zip(&rule.weights) {
        let b = bump_profile(alpha, *u);
        if b > 0.0 {
            acc += (C64::i() * kappa * *u).exp() * (b * w);
        }
    }
    acc
}

impl Bump {
    /// Bump filling the box [a₀,b₀]×[a₁,b₁].
    pub fn from_box(bx: [f64; 4], order: usize) -> Result<Self> {
        let [a0, b0, a1, b1] = bx;
        if !(b0 > a0 && b1 > a1) {
            return Err(Error::Domain(format!("degenerate support box {bx:?}")));
        }
        if order == 0 {
            return Err(Error::Domain("bump quadrature order must be positive".into()));
        }
        Ok(Bump {
            center: [0.5 * (a0 + b0), 0.5 * (a1 + b1)],
            half_widths: [0.5 * (b0 - a0), 0.5 * (b1 - a1)],
            profile: 1.0,
            amplitude: C64::new(1.0, 0.0),
            order,
            exponent_cap: DEFAULT_EXPONENT_CAP,
        })
    }

    pub fn support_box(&self) -> [f64; 4] {
        [
            self.center[0] - self.half_widths[0],
            self.center[0] + self.half_widths[0],
            self.center[1] - self.half_widths[1],
            self.center[1] + self.half_widths[1],
        ]
    }

    /// ∫ b((x−c)/h) e^{iκx} dx along one axis.
    fn axis_transform(&self, axis: usize, kappa: C64) -> C64 {
        let h = self.half_widths[axis];
        let c = self.center[axis];
        (C64::i() * kappa * c).exp() * bump_transform_unit(self.profile, kappa * h, self.order) * h
    }
}

impl TestFunction2D {
    /// Isotropic gaussian with width σ.
    pub fn gaussian(center: [f64; 2], sigma: f64, q: [f64; 2], amplitude: C64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("gaussian width must be positive, got {sigma}")));
        }
        let s = 1.0 / (sigma * sigma);
        Ok(TestFunction2D::Gaussian(Gaussian {
            center,
            metric: [[s, 0.0], [0.0, s]],
            q,
            amplitude,
        }))
    }

    pub fn bump(bx: [f64; 4], order: usize) -> Result<Self> {
        Ok(TestFunction2D::CompactBump(Bump::from_box(bx, order)?))
    }

    pub fn with_amplitude(mut self, a: C64) -> Self {
        match &mut self {
            TestFunction2D::Gaussian(g) => g.amplitude = a,
            TestFunction2D::CompactBump(b) => b.amplitude = a,
        }
        self
    }

    /// Pointwise value f(x).
    pub fn value(&self, x: [f64; 2]) -> C64 {
        match self {
            TestFunction2D::Gaussian(g) => {
                let d = [x[0] - g.center[0], x[1] - g.center[1]];
                let m = g.metric;
                let quad = d[0] * (m[0][0] * d[0] + m[0][1] * d[1]) + d[1] * (m[1][0] * d[0] + m[1][1] * d[1]);
                g.amplitude * C64::new(-0.5 * quad, g.q[0] * x[0] + g.q[1] * x[1]).exp()
            }
            TestFunction2D::CompactBump(b) => {
                let u0 = (x[0] - b.center[0]) / b.half_widths[0];
                let u1 = (x[1] - b.center[1]) / b.half_widths[1];
                b.amplitude * bump_profile(b.profile, u0) * bump_profile(b.profile, u1)
            }
        }
    }

    /// f^±(ζ) = (1/2π) ∫ d²x f(±x) e^{i p(ζ)·x}, p(ζ) = m(cosh ζ, sinh ζ).
    pub fn mass_shell(&self, sign: Sign, zeta: C64, mass: f64) -> Result<C64> {
        let s = sign.value();
        // p·x = k·x (Euclidean) with k = (p₀, −p₁)
        let k = [zeta.cosh() * (mass * s), zeta.sinh() * (-mass * s)];
        match self {
            TestFunction2D::Gaussian(g) => {
                let kap = [k[0] + g.q[0], k[1] + g.q[1]];
                let m = g.metric;
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
                let quad = kap[0] * (kap[0] * inv[0][0] + kap[1] * inv[0][1])
                    + kap[1] * (kap[0] * inv[1][0] + kap[1] * inv[1][1]);
                let phase = C64::i() * (kap[0] * g.center[0] + kap[1] * g.center[1]);
                Ok(g.amplitude / det.sqrt() * (phase - 0.5 * quad).exp())
            }
            TestFunction2D::CompactBump(b) => {
                let bx = b.support_box();
                let reach = k[0].im.abs() * bx[0].abs().max(bx[1].abs())
                    + k[1].im.abs() * bx[2].abs().max(bx[3].abs());
                if reach > b.exponent_cap {
                    return Err(Error::Overflow(format!(
                        "|Im p(zeta).x| reaches {reach:.1} > {} at zeta = {zeta}",
                        b.exponent_cap
                    )));
                }
                let f0 = b.axis_transform(0, k[0]);
                let f1 = b.axis_transform(1, k[1]);
                Ok(b.amplitude * f0 * f1 / (2.0 * PI))
            }
        }
    }

    /// f^± sampled on the grid nodes.
    pub fn sample(&self, sign: Sign, grid: &Arc<RapidityGrid>, mass: f64) -> Result<WaveFunction1> {
        let values = grid
            .nodes()
            .iter()
            .map(|&t| self.mass_shell(sign, C64::new(t, 0.0), mass))
            .collect::<Result<_>>()?;
        WaveFunction1::new(grid.clone(), values)
    }

    /// f_{(x,λ)}(y) = f(Λ(λ)⁻¹(y − x)). Exact for gaussians; bumps only admit
    /// translations.
    pub fn transformed(&self, g: &PoincareElement) -> Result<Self> {
        match self {
            TestFunction2D::Gaussian(gs) => {
                let li = |v: [f64; 2]| lorentz(-g.lambda, v);
                // M' = Λ⁻ᵀ M Λ⁻¹ with Λ⁻¹ = Λ(−λ) symmetric
                let col0 = li([1.0, 0.0]);
                let col1 = li([0.0, 1.0]);
                let m = gs.metric;
                let mv = |v: [f64; 2]| [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
                let mc0 = li(mv(col0));
                let mc1 = li(mv(col1));
                let metric = [[mc0[0], mc1[0]], [mc0[1], mc1[1]]];
                let lc = lorentz(g.lambda, gs.center);
                let center = [lc[0] + g.x[0], lc[1] + g.x[1]];
                let q = li(gs.q);
                let amplitude = gs.amplitude * C64::from_polar(1.0, -(q[0] * g.x[0] + q[1] * g.x[1]));
                Ok(TestFunction2D::Gaussian(Gaussian { center, metric, q, amplitude }))
            }
            TestFunction2D::CompactBump(b) => {
                if g.lambda != 0.0 {
                    return Err(Error::Domain("compact bumps support translations only".into()));
                }
                let mut out = b.clone();
                out.center = [b.center[0] + g.x[0], b.center[1] + g.x[1]];
                Ok(TestFunction2D::CompactBump(out))
            }
        }
    }

    /// f*(x) = conj f(−x).
    pub fn star(&self) -> Self {
        match self {
            TestFunction2D::Gaussian(g) => TestFunction2D::Gaussian(Gaussian {
                center: [-g.center[0], -g.center[1]],
                metric: g.metric,
                q: g.q,
                amplitude: g.amplitude.conj(),
            }),
            TestFunction2D::CompactBump(b) => {
                let mut out = b.clone();
                out.center = [-b.center[0], -b.center[1]];
                out.amplitude = b.amplitude.conj();
                TestFunction2D::CompactBump(out)
            }
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        match self {
            TestFunction2D::Gaussian(g) => TestFunction2D::Gaussian(Gaussian {
                center: g.center,
                metric: g.metric,
                q: [-g.q[0], -g.q[1]],
                amplitude: g.amplitude.conj(),
            }),
            TestFunction2D::CompactBump(b) => {
                let mut out = b.clone();
                out.amplitude = b.amplitude.conj();
                TestFunction2D::CompactBump(out)
            }
        }
    }

    /// f_T(x₀, x₁) = conj f(−x₀, x₁).
    pub fn time_reflected(&self) -> Self {
        match self {
            TestFunction2D::Gaussian(g) => TestFunction2D::Gaussian(Gaussian {
                center: [-g.center[0], g.center[1]],
                metric: [[g.metric[0][0], -g.metric[0][1]], [-g.metric[1][0], g.metric[1][1]]],
                q: [g.q[0], -g.q[1]],
                amplitude: g.amplitude.conj(),
            }),
            TestFunction2D::CompactBump(b) => {
                let mut out = b.clone();
                out.center = [-b.center[0], b.center[1]];
                out.amplitude = b.amplitude.conj();
                TestFunction2D::CompactBump(out)
            }
        }
    }

    pub fn support_box(&self) -> Option<[f64; 4]> {
        match self {
            TestFunction2D::Gaussian(_) => None,
            TestFunction2D::CompactBump(b) => Some(b.support_box()),
        }
    }

    /// Support inside W_R = {x₁ > |x₀|}, decided by the box corners.
    pub fn in_right_wedge(&self) -> bool {
        self.support_box()
            .is_some_and(|[a0, b0, a1, _]| a1 > a0.abs().max(b0.abs()))
    }

    /// Support inside W_L = {x₁ < −|x₀|}, decided by the box corners.
    pub fn in_left_wedge(&self) -> bool {
        self.support_box()
            .is_some_and(|[a0, b0, _, b1]| b1 < -a0.abs().max(b0.abs()))
    }
}

/// φ(f) = z†(f⁺) + z(f⁻).
pub fn field_phi(fs: &FockSpace, f: &TestFunction2D, phi: &FockVector) -> Result<FockVector> {
    let m = fs.model().mass();
    let fp = f.sample(Sign::Plus, fs.grid(), m)?;
    let fm = f.sample(Sign::Minus, fs.grid(), m)?;
    fs.create(&fp, phi)?.add(&fs.annihilate(&fm, phi)?)
}

/// φ′(f) = J φ(f*) J.
pub fn field_phi_prime(fs: &FockSpace, f: &TestFunction2D, phi: &FockVector) -> Result<FockVector> {
    let inner = field_phi(fs, &f.star(), &fs.reflect_j(phi)?)?;
    fs.reflect_j(&inner)
}

/// ⟨Ω, φ(f)φ(g)Ω⟩ computed through the operators.
pub fn two_point(fs: &FockSpace, f: &TestFunction2D, g: &TestFunction2D) -> Result<C64> {
    let omega = fs.vacuum();
    omega.inner(&field_phi(fs, f, &field_phi(fs, g, &omega)?)?)
}

/// One-dimensional test function for the time-zero fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction1D {
    /// `A · exp(−(x−c)²/(2σ²) + i k x)`
    Gaussian { center: f64, sigma: f64, k: f64, amplitude: C64 },
    /// `A · b((x−c)/h)`
    Bump { center: f64, half_width: f64, amplitude: C64, order: usize },
}

impl TestFunction1D {
    pub fn value(&self, x: f64) -> C64 {
        match *self {
            TestFunction1D::Gaussian { center, sigma, k, amplitude } => {
                let d = (x - center) / sigma;
                amplitude * C64::new(-0.5 * d * d, k * x).exp()
            }
            TestFunction1D::Bump { center, half_width, amplitude, .. } => {
                amplitude * bump_profile(1.0, (x - center) / half_width)
            }
        }
    }

    /// Unitary Fourier transform f̃(p) = (2π)^{−1/2} ∫ f(x) e^{−ipx} dx.
    pub fn fourier(&self, p: f64) -> C64 {
        match *self {
            TestFunction1D::Gaussian { center, sigma, k, amplitude } => {
                let d = k - p;
                amplitude * sigma * C64::new(-0.5 * sigma * sigma * d * d, d * center).exp()
            }
            TestFunction1D::Bump { center, half_width, amplitude, order } => {
                let kap = C64::new(-p * half_width, 0.0);
                amplitude
                    * half_width
                    * C64::from_polar(1.0, -p * center)
                    * bump_transform_unit(1.0, kap, order)
                    / (2.0 * PI).sqrt()
            }
        }
    }

    /// f̂(θ) = f̃(m sinh θ).
    pub fn hat(&self, theta: f64, mass: f64) -> C64 {
        self.fourier(mass * theta.sinh())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeZeroField {
    Varphi,
    Pi,
}

/// varphi(f) = z†(f̂) + z(f̂₋) and π(f) = i(z†(ωf̂) − z(ωf̂₋)), with
/// f̂₋(θ) = f̂(−θ) and ω(θ) = m cosh θ.
pub fn timezero_field(fs: &FockSpace, f: &TestFunction1D, which: TimeZeroField, phi: &FockVector) -> Result<FockVector> {
    let m = fs.model().mass();
    let grid = fs.grid();
    let omega = |t: f64| match which {
        TimeZeroField::Varphi => 1.0,
        TimeZeroField::Pi => m * t.cosh(),
    };
    let plus = grid.sample(|t| f.hat(t, m) * omega(t));
    let minus = grid.sample(|t| f.hat(-t, m) * omega(t));
    let c = fs.create(&plus, phi)?;
    let a = fs.annihilate(&minus, phi)?;
    match which {
        TimeZeroField::Varphi => c.add(&a),
        TimeZeroField::Pi => Ok(c.sub(&a)?.scale(C64::i())),
    }
}

/// The two-particle part of [φ(f), φ(g)]Ω, computed through the operators
/// and from the closed form
/// 2^{−1/2}(f⁺(θ₁)g⁺(θ₂) − g⁺(θ₁)f⁺(θ₂))(1 − S₂(θ₂ − θ₁)).
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub operator: Tensor,
    pub closed_form: Tensor,
    pub max_difference: f64,
}

pub fn nonlocality_witness(fs: &FockSpace, f: &TestFunction2D, g: &TestFunction2D) -> Result<Witness> {
    let omega = fs.vacuum();
    let fg = field_phi(fs, f, &field_phi(fs, g, &omega)?)?;
    let gf = field_phi(fs, g, &field_phi(fs, f, &omega)?)?;
    let comm = fg.sub(&gf)?;
    let operator = fs.symmetrize(&comm.components()[2])?;
    let m = fs.model().mass();
    let fp = f.sample(Sign::Plus, fs.grid(), m)?;
    let gp = g.sample(Sign::Plus, fs.grid(), m)?;
    let dim = fs.dim();
    let mut closed_form = Tensor::zeros(2, dim)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..dim {
        for b in 0..dim {
            let anti = fp.values[a] * gp.values[b] - gp.values[a] * fp.values[b];
            closed_form.set(&[a, b], anti * (C64::new(1.0, 0.0) - fs.s(b, a)) * r);
        }
    }
    let max_difference = operator.max_abs_diff(&closed_form)?;
    Ok(Witness {
        operator,
        closed_form,
        max_difference,
    })
}

#[cfg(test)]
mod tests;
