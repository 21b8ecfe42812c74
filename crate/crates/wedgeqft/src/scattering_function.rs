//! Scattering functions S₂ given by a sign, an exponential parameter and a
//! finite list of zeros in the physical strip.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Default floor on |sinh β_k + sinh ζ| below which evaluation reports a pole.
pub const DEFAULT_POLE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_f64(x: f64) -> Result<Sign> {
        if x == 1.0 {
            Ok(Sign::Plus)
        } else if x == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::Model(format!("sign must be +1 or -1, got {x}")))
        }
    }
}

/// An analytic scattering function
/// `S₂(ζ) = ε · exp(i a sinh ζ) · ∏_k (sinh β_k − sinh ζ)/(sinh β_k + sinh ζ)`.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringFunction {
    epsilon: Sign,
    a: f64,
    zeros: Vec<C64>,
    sinh_zeros: Vec<C64>,
    mass: f64,
    pole_floor: f64,
    validated: bool,
}

/// Parameters for the sup-norm search on the lower strip boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripNormOptions {
    pub window: f64,
    pub samples: usize,
    pub refine_iterations: usize,
}

impl Default for StripNormOptions {
    fn default() -> Self {
        StripNormOptions {
            window: 30.0,
            samples: 10_000,
            refine_iterations: 100,
        }
    }
}

/// κ paired with the numerically determined ‖S₂‖_κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripNormCache {
    pub kappa: f64,
    pub sup_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub samples: usize,
    pub tol: f64,
    /// max |conj S(θ) − 1/S(θ)|
    pub conj_inverse: f64,
    /// max |S(−θ) − 1/S(θ)|
    pub reflection: f64,
    /// max |S(θ+iπ) − 1/S(θ)|
    pub shifted_inverse: f64,
    /// max ||S(θ)| − 1|
    pub modulus: f64,
    /// max |S(θ+iπ) − S(−θ)|
    pub crossing: f64,
    pub pass: bool,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.conj_inverse,
            self.reflection,
            self.shifted_inverse,
            self.modulus,
            self.crossing,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn check_zero(beta: C64) -> Result<()> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::Model(format!("zero {beta} is not finite")));
    }
    if beta.im <= 0.0 {
        return Err(Error::Model(format!(
            "zero {beta} has Im <= 0; zeros must satisfy 0 < Im b <= pi/2"
        )));
    }
    if beta.im > FRAC_PI_2 * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::Model(format!(
            "zero {beta} has Im > pi/2; zeros must satisfy 0 < Im b <= pi/2"
        )));
    }
    Ok(())
}

fn mirror(beta: C64) -> C64 {
    C64::new(-beta.re, beta.im)
}

fn same_zero(x: C64, y: C64) -> bool {
    (x - y).norm() <= 1e-12 * (1.0 + x.norm())
}

impl ScatteringFunction {
    /// Validated constructor.
    ///
    /// With `auto_mirror`, every zero with nonzero real part that lacks its
    /// partner `−conj(β)` gets the partner appended. Without it such zeros are
    /// rejected.
    pub fn build(epsilon: Sign, a: f64, zeros: &[C64], mass: f64, auto_mirror: bool) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Model(format!("a must be a finite number >= 0, got {a}")));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Model(format!("mass must be positive, got {mass}")));
        }
        for &b in zeros {
            check_zero(b)?;
        }
        let mut list: Vec<C64> = zeros.to_vec();
        let mut paired = vec![false; list.len()];
        let mut missing = Vec::new();
        for i in 0..list.len() {
            if list[i].re == 0.0 || paired[i] {
                continue;
            }
            let want = mirror(list[i]);
            let partner = (0..list.len()).find(|&j| j != i && !paired[j] && same_zero(list[j], want));
            match partner {
                Some(j) => {
                    paired[i] = true;
                    paired[j] = true;
                }
                None if auto_mirror => {
                    paired[i] = true;
                    missing.push(want);
                }
                None => {
                    return Err(Error::Model(format!(
                        "zero {} has no mirror partner {} and auto_mirror is off",
                        list[i], want
                    )))
                }
            }
        }
        list.extend(missing);
        Ok(Self::assemble(epsilon, a, list, mass, true))
    }

    /// Builds without the mirror-pairing check; zeros must still lie in the
    /// strip so that real rapidities stay pole-free. Intended for negative
    /// controls.
    pub fn unvalidated(epsilon: Sign, a: f64, zeros: &[C64], mass: f64) -> Result<Self> {
        if !(a >= 0.0) || !(mass > 0.0) {
            return Err(Error::Model("a must be >= 0 and mass > 0".into()));
        }
        for &b in zeros {
            check_zero(b)?;
        }
        Ok(Self::assemble(epsilon, a, zeros.to_vec(), mass, false))
    }

    fn assemble(epsilon: Sign, a: f64, zeros: Vec<C64>, mass: f64, validated: bool) -> Self {
        let sinh_zeros = zeros.iter().map(|b| b.sinh()).collect();
        ScatteringFunction {
            epsilon,
            a,
            zeros,
            sinh_zeros,
            mass,
            pole_floor: DEFAULT_POLE_FLOOR,
            validated,
        }
    }

    /// S₂ ≡ 1.
    pub fn free(mass: f64) -> Self {
        Self::assemble(Sign::Plus, 0.0, Vec::new(), mass, true)
    }

    /// S₂ ≡ −1.
    pub fn ising(mass: f64) -> Self {
        Self::assemble(Sign::Minus, 0.0, Vec::new(), mass, true)
    }

    /// Sinh-Gordon model with coupling `b` in (0, 1): ε = −1 and one zero on
    /// the imaginary axis where sinh β = i sin(πB).
    pub fn sinh_gordon(b: f64, mass: f64) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Model(format!("Sinh-Gordon coupling must lie in (0, 1), got {b}")));
        }
        let im = (PI * b).sin().asin();
        Self::build(Sign::Minus, 0.0, &[C64::new(0.0, im)], mass, true)
    }

    pub fn with_pole_floor(mut self, floor: f64) -> Self {
        self.pole_floor = floor;
        self
    }

    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn pole_floor(&self) -> f64 {
        self.pole_floor
    }

    /// False only for models built through [`ScatteringFunction::unvalidated`].
    pub fn is_validated(&self) -> bool {
        self.validated
    }

    /// Copy of the model with a different mass.
    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Model(format!("mass must be positive, got {mass}")));
        }
        let mut out = self.clone();
        out.mass = mass;
        Ok(out)
    }

    /// Evaluates S₂ at a complex rapidity.
    pub fn evaluate(&self, zeta: C64) -> Result<C64> {
        let sz = zeta.sinh();
        let mut value = C64::new(self.epsilon.value(), 0.0);
        if self.a != 0.0 {
            value *= (C64::i() * self.a * sz).exp();
        }
        for sb in &self.sinh_zeros {
            let den = sb + sz;
            if den.norm() < self.pole_floor {
                return Err(Error::Pole {
                    re: zeta.re,
                    im: zeta.im,
                    distance: den.norm(),
                    floor: self.pole_floor,
                });
            }
            value *= (sb - sz) / den;
        }
        Ok(value)
    }

    /// S₂ at a real rapidity. Real rapidities are never poles because every
    /// zero has 0 < Im β ≤ π/2.
    pub fn at(&self, theta: f64) -> C64 {
        let sz = theta.sinh();
        let mut value = C64::new(self.epsilon.value(), 0.0);
        if self.a != 0.0 {
            value *= C64::from_polar(1.0, self.a * sz);
        }
        for sb in &self.sinh_zeros {
            value *= (sb - sz) / (sb + sz);
        }
        value
    }

    /// S₂(0), which is ±1 for every admissible model.
    pub fn value_at_zero(&self) -> f64 {
        self.at(0.0).re.signum()
    }

    /// κ(S₂): smallest imaginary part of a zero, capped at π/2.
    pub fn kappa(&self) -> f64 {
        self.zeros.iter().map(|b| b.im).fold(FRAC_PI_2, f64::min)
    }

    /// True when a = 0, the requirement for the bounded strip norms used by
    /// the nuclearity estimates.
    pub fn is_bounded_class(&self) -> bool {
        self.a == 0.0
    }

    pub fn strip_sup_norm(&self, kappa: f64) -> Result<f64> {
        self.strip_sup_norm_with(kappa, StripNormOptions::default())
    }

    /// sup |S₂| on the strip −κ ≤ Im ζ ≤ π + κ, found on the line Im ζ = −κ.
    ///
    /// Dense sampling on `[-window, window]` followed by golden-section
    /// refinement around the best local maxima; |S₂| tends to 1 outside the
    /// window. Returns +∞ when a > 0, since then |S₂| is unbounded there.
    pub fn strip_sup_norm_with(&self, kappa: f64, opts: StripNormOptions) -> Result<f64> {
        let k = self.kappa();
        if !(kappa > 0.0 && kappa < k) {
            return Err(Error::Domain(format!("kappa must lie in (0, {k}), got {kappa}")));
        }
        if self.a > 0.0 {
            return Ok(f64::INFINITY);
        }
        if self.zeros.is_empty() {
            return Ok(1.0);
        }
        let g = |t: f64| -> Result<f64> { Ok(self.evaluate(C64::new(t, -kappa))?.norm()) };
        let n = opts.samples.max(3);
        let h = 2.0 * opts.window / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| -opts.window + i as f64 * h).collect();
        let vals: Vec<f64> = xs.iter().map(|&t| g(t)).collect::<Result<_>>()?;
        let mut peaks: Vec<usize> = (0..n)
            .filter(|&i| {
                let left = if i == 0 { f64::NEG_INFINITY } else { vals[i - 1] };
                let right = if i + 1 == n { f64::NEG_INFINITY } else { vals[i + 1] };
                vals[i] >= left && vals[i] >= right
            })
            .collect();
        peaks.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
        peaks.truncate(4);
        let mut best = vals.iter().copied().fold(1.0, f64::max);
        for i in peaks {
            let lo = xs[i.saturating_sub(1)];
            let hi = xs[(i + 1).min(n - 1)];
            best = best.max(golden_max(&g, lo, hi, opts.refine_iterations)?);
        }
        Ok(best)
    }

    pub fn strip_norm_cache(&self, kappa: f64) -> Result<StripNormCache> {
        Ok(StripNormCache {
            kappa,
            sup_norm: self.strip_sup_norm(kappa)?,
        })
    }

    /// Phase shift δ(ζ) with S₂(ζ) = S₂(0) e^{2iδ(ζ)} and δ(0) = 0.
    ///
    /// The branch is tracked along 0 → Re ζ → ζ by summing principal
    /// logarithms of successive ratios; the step adapts to |S₂′/S₂|.
    pub fn phase_shift(&self, zeta: C64) -> Result<C64> {
        let k = self.kappa();
        if zeta.im.abs() >= k {
            return Err(Error::Domain(format!(
                "phase shift needs |Im zeta| < kappa = {k}, got {zeta}"
            )));
        }
        let mut log_ratio = C64::new(0.0, 0.0);
        let mut here = C64::new(0.0, 0.0);
        let mut s_here = self.evaluate(here)?;
        let legs = [(C64::new(zeta.re, 0.0), zeta.re.abs()), (zeta, zeta.im.abs())];
        for (target, length) in legs {
            if length == 0.0 {
                continue;
            }
            let dir = (target - here) / length;
            let mut travelled = 0.0;
            while travelled < length {
                let eps = 1e-6;
                let dlog = ((self.evaluate(here + dir * eps)? - self.evaluate(here - dir * eps)?)
                    / (2.0 * eps * s_here))
                    .norm();
                let mut step = (0.1 / dlog.max(1e-3)).min(length - travelled).min(0.25);
                loop {
                    let next = if travelled + step >= length { target } else { here + dir * step };
                    let s_next = self.evaluate(next)?;
                    let inc = (s_next / s_here).ln();
                    if inc.im.abs() < 0.5 || step < 1e-12 {
                        log_ratio += inc;
                        here = next;
                        s_here = s_next;
                        travelled += step;
                        break;
                    }
                    step *= 0.5;
                }
            }
            here = target;
        }
        Ok(-0.5 * C64::i() * log_ratio)
    }

    /// Y-phase `∏_{k<l} (sign · e^{iδ(ζ_k − ζ_l)})`; equal to 1 for n ≤ 1.
    pub fn y_phase(&self, sign: Sign, zetas: &[C64]) -> Result<C64> {
        let mut out = C64::new(1.0, 0.0);
        for k in 0..zetas.len() {
            for l in k + 1..zetas.len() {
                let d = self.phase_shift(zetas[k] - zetas[l])?;
                out *= sign.value() * (C64::i() * d).exp();
            }
        }
        Ok(out)
    }
}

fn golden_max<F: Fn(f64) -> Result<f64>>(g: &F, mut lo: f64, mut hi: f64, iters: usize) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = g(x1)?;
    let mut f2 = g(x2)?;
    let mut best = f1.max(f2).max(g(lo)?).max(g(hi)?);
    for _ in 0..iters {
        if hi - lo < 1e-14 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1)?;
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}

/// Max residuals of the unitarity, hermitian-analyticity and crossing
/// relations over real sample points.
pub fn verify_relations(s: &ScatteringFunction, thetas: &[f64], tol: f64) -> Result<RelationReport> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut r = RelationReport {
        samples: thetas.len(),
        tol,
        conj_inverse: 0.0,
        reflection: 0.0,
        shifted_inverse: 0.0,
        modulus: 0.0,
        crossing: 0.0,
        pass: false,
    };
    for &t in thetas {
        let v = s.evaluate(C64::new(t, 0.0))?;
        let inv = v.inv();
        let minus = s.evaluate(C64::new(-t, 0.0))?;
        let shifted = s.evaluate(C64::new(t, PI))?;
        r.conj_inverse = r.conj_inverse.max((v.conj() - inv).norm());
        r.reflection = r.reflection.max((minus - inv).norm());
        r.shifted_inverse = r.shifted_inverse.max((shifted - inv).norm());
        r.modulus = r.modulus.max((v.norm() - 1.0).abs());
        r.crossing = r.crossing.max((shifted - minus).norm());
    }
    r.pass = r.max_residual() <= tol;
    Ok(r)
}

/// Evenly spaced sample points on [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
