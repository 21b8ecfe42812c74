//! Discretized S₂-symmetric Fock space.
//!
//! Tensors live on a [`RapidityGrid`]; the delta distribution is δ_ij / w_i,
//! so the Zamolodchikov–Faddeev relations close exactly at grid level.

mod grid;
mod laws;
mod tensor;
mod vector;

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use grid::{GridHeader, RapidityGrid, WaveFunction1};
pub use laws::{verify_representation_laws, verify_zf_algebra, AlgebraReport, RepresentationReport};
pub use tensor::{
    compose, factorial, flatten, inverse, inversions, is_permutation, permutations, transposition, unflatten,
    Tensor, MAX_ENTRIES,
};
pub use vector::FockVector;

use crate::scattering_function::ScatteringFunction;
use crate::{Error, Result, C64};

/// Largest particle number any vector may carry.
pub const HARD_CAP: usize = 6;
/// Default truncation for vectors built from configuration.
pub const DEFAULT_N_MAX: usize = 4;
/// Default relative amplitude that may be pushed off the grid by a boost.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-12;

/// Minkowski product p·x = p₀x₀ − p₁x₁.
pub fn minkowski(p: [f64; 2], x: [f64; 2]) -> f64 {
    p[0] * x[0] - p[1] * x[1]
}

/// On-shell momentum p(θ) = m(cosh θ, sinh θ).
pub fn momentum(mass: f64, theta: f64) -> [f64; 2] {
    [mass * theta.cosh(), mass * theta.sinh()]
}

/// Boost matrix acting on (x₀, x₁).
pub fn lorentz(lambda: f64, x: [f64; 2]) -> [f64; 2] {
    let (c, s) = (lambda.cosh(), lambda.sinh());
    [c * x[0] + s * x[1], s * x[0] + c * x[1]]
}

/// Element (x, λ) of the proper orthochronous Poincaré group in 1+1 dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareElement {
    pub x: [f64; 2],
    pub lambda: f64,
}

impl PoincareElement {
    pub fn identity() -> Self {
        PoincareElement { x: [0.0, 0.0], lambda: 0.0 }
    }

    pub fn translation(x: [f64; 2]) -> Self {
        PoincareElement { x, lambda: 0.0 }
    }

    pub fn boost(lambda: f64) -> Self {
        PoincareElement { x: [0.0, 0.0], lambda }
    }

    /// Group product: (x, λ)(x′, λ′) = (x + Λ(λ)x′, λ + λ′).
    pub fn compose(&self, other: &PoincareElement) -> Self {
        let y = lorentz(self.lambda, other.x);
        PoincareElement {
            x: [self.x[0] + y[0], self.x[1] + y[1]],
            lambda: self.lambda + other.lambda,
        }
    }
}

/// Residuals of the two exchange relations for one (ψ, φ, Φ) triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZfReport {
    pub annihilators: f64,
    pub mixed: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Fock space over a grid for a fixed scattering function.
#[derive(Debug, Clone)]
pub struct FockSpace {
    model: ScatteringFunction,
    grid: Arc<RapidityGrid>,
    s_diff: Vec<C64>,
    n_cap: usize,
    symmetrize_cap: usize,
    support_tol: f64,
}

impl FockSpace {
    pub fn new(model: ScatteringFunction, grid: Arc<RapidityGrid>) -> Self {
        let n = grid.len();
        let h = grid.spacing();
        let s_diff = (0..2 * n - 1).map(|d| model.at((d as f64 - (n - 1) as f64) * h)).collect();
        FockSpace {
            model,
            grid,
            s_diff,
            n_cap: HARD_CAP,
            symmetrize_cap: HARD_CAP,
            support_tol: DEFAULT_SUPPORT_TOL,
        }
    }

    /// Lowers the particle-number cap and the symmetrization cap.
    pub fn with_caps(mut self, n_cap: usize, symmetrize_cap: usize) -> Result<Self> {
        if n_cap > HARD_CAP || symmetrize_cap > HARD_CAP {
            return Err(Error::Cap(format!("caps may not exceed {HARD_CAP}")));
        }
        self.n_cap = n_cap;
        self.symmetrize_cap = symmetrize_cap;
        Ok(self)
    }

    pub fn with_support_tol(mut self, tol: f64) -> Self {
        self.support_tol = tol;
        self
    }

    pub fn model(&self) -> &ScatteringFunction {
        &self.model
    }

    pub fn grid(&self) -> &Arc<RapidityGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn n_cap(&self) -> usize {
        self.n_cap
    }

    /// S₂(θ_i − θ_j).
    #[inline]
    pub fn s(&self, i: usize, j: usize) -> C64 {
        self.s_diff[i + self.dim() - 1 - j]
    }

    fn check_vector(&self, phi: &FockVector) -> Result<()> {
        if **phi.grid() != *self.grid {
            return Err(Error::Shape("Fock vector grid differs from the space grid".into()));
        }
        Ok(())
    }

    fn check_wave(&self, psi: &WaveFunction1) -> Result<()> {
        if *psi.grid != *self.grid {
            return Err(Error::Shape("wave function grid differs from the space grid".into()));
        }
        Ok(())
    }

    pub fn vacuum(&self) -> FockVector {
        FockVector::vacuum(self.grid.clone())
    }

    /// D_n(π)ψ(θ) = S^π(θ) ψ(θ_{π(1)}, …, θ_{π(n)}) with
    /// S^π = ∏_{l<k, π(l)>π(k)} S₂(θ_{π(l)} − θ_{π(k)}).
    pub fn apply_dn(&self, perm: &[usize], psi: &Tensor) -> Result<Tensor> {
        let n = psi.rank();
        if perm.len() != n {
            return Err(Error::Shape(format!("permutation of {} acting on rank {n}", perm.len())));
        }
        if !is_permutation(perm) {
            return Err(Error::Shape(format!("{perm:?} is not a permutation")));
        }
        let dim = self.dim();
        let inv = inversions(perm);
        let mut out = Tensor::zeros(n, dim)?;
        let mut idx = vec![0usize; n];
        let mut src = vec![0usize; n];
        for (t, slot) in out.data_mut().iter_mut().enumerate() {
            unflatten(t, dim, &mut idx);
            for l in 0..n {
                src[l] = idx[perm[l]];
            }
            let mut f = C64::new(1.0, 0.0);
            for &(l, k) in &inv {
                f *= self.s(src[l], src[k]);
            }
            *slot = f * psi.data()[flatten(&src, dim)];
        }
        Ok(out)
    }

    /// P_n = (1/n!) Σ_π D_n(π), evaluated by scattering each nonzero entry.
    pub fn symmetrize(&self, psi: &Tensor) -> Result<Tensor> {
        let n = psi.rank();
        if n > self.symmetrize_cap {
            return Err(Error::Cap(format!(
                "symmetrization of rank {n} exceeds the cap {}",
                self.symmetrize_cap
            )));
        }
        let dim = self.dim();
        let perms: Vec<(Vec<usize>, Vec<(usize, usize)>)> = permutations(n)
            .into_iter()
            .map(|p| {
                let inv = inversions(&p);
                (inverse(&p), inv)
            })
            .collect();
        let norm = 1.0 / factorial(n);
        let mut out = Tensor::zeros(n, dim)?;
        let mut jd = vec![0usize; n];
        let mut target = vec![0usize; n];
        for (j, &v) in psi.data().iter().enumerate() {
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            unflatten(j, dim, &mut jd);
            for (pinv, inv) in &perms {
                let mut f = v * norm;
                for &(l, k) in inv {
                    f *= self.s(jd[l], jd[k]);
                }
                for m in 0..n {
                    target[m] = jd[pinv[m]];
                }
                out.data_mut()[flatten(&target, dim)] += f;
            }
        }
        Ok(out)
    }

    pub fn symmetrize_vector(&self, phi: &FockVector) -> Result<FockVector> {
        self.check_vector(phi)?;
        let comps = phi.components().iter().map(|t| self.symmetrize(t)).collect::<Result<_>>()?;
        FockVector::from_components(self.grid.clone(), comps)
    }

    /// Largest violation of Ψ(..θ_{k+1}, θ_k..) = S₂(θ_k − θ_{k+1}) Ψ(..θ_k, θ_{k+1}..).
    pub fn symmetry_defect(&self, psi: &Tensor) -> f64 {
        let n = psi.rank();
        let dim = self.dim();
        let mut idx = vec![0usize; n];
        let mut sw = vec![0usize; n];
        let mut worst: f64 = 0.0;
        for (t, &v) in psi.data().iter().enumerate() {
            unflatten(t, dim, &mut idx);
            for k in 0..n.saturating_sub(1) {
                sw.copy_from_slice(&idx);
                sw.swap(k, k + 1);
                let w = psi.data()[flatten(&sw, dim)];
                worst = worst.max((w - self.s(idx[k], idx[k + 1]) * v).norm());
            }
        }
        worst
    }

    /// z(ψ): (zΦ)_n(i..) = √(n+1) Σ_j w_j ψ_j Φ_{n+1}(j, i..).
    pub fn annihilate(&self, psi: &WaveFunction1, phi: &FockVector) -> Result<FockVector> {
        self.check_wave(psi)?;
        self.check_vector(phi)?;
        let dim = self.dim();
        let w = self.grid.weights();
        let top = phi.n_max();
        if top == 0 {
            return FockVector::zero(self.grid.clone(), 0);
        }
        let mut comps = Vec::with_capacity(top);
        for n in 0..top {
            let src = &phi.components()[n + 1];
            let mut out = Tensor::zeros(n, dim)?;
            let block = out.len();
            let c = ((n + 1) as f64).sqrt();
            for j in 0..dim {
                let a = psi.values[j] * w[j] * c;
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let s = &src.data()[j * block..(j + 1) * block];
                for (o, x) in out.data_mut().iter_mut().zip(s) {
                    *o += a * x;
                }
            }
            comps.push(out);
        }
        FockVector::from_components(self.grid.clone(), comps)
    }

    /// z†(ψ): (z†Φ)_n(θ) = n^{−1/2} Σ_k ∏_{j<k} S₂(θ_k − θ_j) ψ(θ_k) Φ_{n−1}(θ without θ_k).
    pub fn create(&self, psi: &WaveFunction1, phi: &FockVector) -> Result<FockVector> {
        self.check_wave(psi)?;
        self.check_vector(phi)?;
        let top = phi.n_max() + 1;
        if top > self.n_cap {
            return Err(Error::Cap(format!("creation would reach n = {top} above the cap {}", self.n_cap)));
        }
        let dim = self.dim();
        let mut comps = vec![Tensor::scalar(C64::new(0.0, 0.0), dim)];
        let mut digits = vec![0usize; top];
        let mut fac = vec![C64::new(0.0, 0.0); dim];
        for n in 1..=top {
            let src = &phi.components()[n - 1];
            let mut out = Tensor::zeros(n, dim)?;
            let c = 1.0 / (n as f64).sqrt();
            let r = &mut digits[..n - 1];
            for (j, &v) in src.data().iter().enumerate() {
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                unflatten(j, dim, r);
                for (a, f) in fac.iter_mut().enumerate() {
                    *f = psi.values[a] * v * c;
                }
                for k in 0..n {
                    let hi = flatten(&r[..k], dim);
                    let lo = flatten(&r[k..], dim);
                    let stride = dim.pow((n - 1 - k) as u32);
                    for a in 0..dim {
                        if fac[a] != C64::new(0.0, 0.0) {
                            out.data_mut()[(hi * dim + a) * stride + lo] += fac[a];
                        }
                    }
                    if k < n - 1 {
                        for (a, f) in fac.iter_mut().enumerate() {
                            *f *= self.s(a, r[k]);
                        }
                    }
                }
            }
            comps.push(out);
        }
        FockVector::from_components(self.grid.clone(), comps)
    }

    /// z†(ψ) through the projector: (z†Φ)_n = √n P_n(ψ ⊗ Φ_{n−1}).
    pub fn create_projected(&self, psi: &WaveFunction1, phi: &FockVector) -> Result<FockVector> {
        self.check_wave(psi)?;
        self.check_vector(phi)?;
        let top = phi.n_max() + 1;
        if top > self.n_cap {
            return Err(Error::Cap(format!("creation would reach n = {top} above the cap {}", self.n_cap)));
        }
        let dim = self.dim();
        let mut comps = vec![Tensor::scalar(C64::new(0.0, 0.0), dim)];
        for n in 1..=top {
            let src = &phi.components()[n - 1];
            let mut prod = Tensor::zeros(n, dim)?;
            let block = src.len();
            for a in 0..dim {
                for (o, x) in prod.data_mut()[a * block..(a + 1) * block].iter_mut().zip(src.data()) {
                    *o = psi.values[a] * x;
                }
            }
            comps.push(self.symmetrize(&prod)?.scale(C64::new((n as f64).sqrt(), 0.0)));
        }
        FockVector::from_components(self.grid.clone(), comps)
    }

    /// (z×z)(F): (Φ ↦)_n(rest) = √((n+1)(n+2)) Σ_{a,b} w_a w_b F(θ_a, θ_b) Φ_{n+2}(θ_b, θ_a, rest).
    pub fn annihilate_pair(&self, kernel: &Tensor, phi: &FockVector) -> Result<FockVector> {
        self.check_vector(phi)?;
        let dim = self.dim();
        if kernel.rank() != 2 || kernel.dim() != dim {
            return Err(Error::Shape("two-slot kernel must be a rank-2 tensor on the grid".into()));
        }
        let w = self.grid.weights();
        let top = phi.n_max();
        if top < 2 {
            return FockVector::zero(self.grid.clone(), 0);
        }
        let mut comps = Vec::new();
        for n in 0..=top - 2 {
            let src = &phi.components()[n + 2];
            let mut out = Tensor::zeros(n, dim)?;
            let block = out.len();
            let c = (((n + 1) * (n + 2)) as f64).sqrt();
            for a in 0..dim {
                for b in 0..dim {
                    let f = kernel.data()[a * dim + b] * w[a] * w[b] * c;
                    if f == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let off = (b * dim + a) * block;
                    for (o, x) in out.data_mut().iter_mut().zip(&src.data()[off..off + block]) {
                        *o += f * x;
                    }
                }
            }
            comps.push(out);
        }
        FockVector::from_components(self.grid.clone(), comps)
    }

    /// (z†×z)(F), the linear extension of φ⊗ψ ↦ z†(φ)z(ψ):
    /// (Φ ↦)_n(θ) = Σ_k ∏_{j<k} S₂(θ_k − θ_j) Σ_b w_b F(θ_k, θ_b) Φ_n(θ_b, θ without θ_k).
    pub fn create_annihilate_pair(&self, kernel: &Tensor, phi: &FockVector) -> Result<FockVector> {
        self.check_vector(phi)?;
        let dim = self.dim();
        if kernel.rank() != 2 || kernel.dim() != dim {
            return Err(Error::Shape("two-slot kernel must be a rank-2 tensor on the grid".into()));
        }
        let w = self.grid.weights();
        let mut comps = vec![Tensor::scalar(C64::new(0.0, 0.0), dim)];
        for n in 1..=phi.n_max() {
            let src = &phi.components()[n];
            let mut out = Tensor::zeros(n, dim)?;
            let block = dim.pow((n - 1) as u32);
            let mut idx = vec![0usize; n];
            let mut rest = vec![0usize; n - 1];
            for t in 0..out.len() {
                unflatten(t, dim, &mut idx);
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    let prefix: C64 = idx[..k].iter().map(|&j| self.s(idx[k], j)).product();
                    let mut m = 0;
                    for (j, &i) in idx.iter().enumerate() {
                        if j != k {
                            rest[m] = i;
                            m += 1;
                        }
                    }
                    let r = flatten(&rest, dim);
                    let mut inner = C64::new(0.0, 0.0);
                    for b in 0..dim {
                        inner += kernel.data()[idx[k] * dim + b] * w[b] * src.data()[b * block + r];
                    }
                    acc += prefix * inner;
                }
                out.data_mut()[t] = acc;
            }
            comps.push(out);
        }
        FockVector::from_components(self.grid.clone(), comps)
    }

    /// Residuals of
    /// z(ψ)z(φ) = (z×z)(S₂*(φ⊗ψ)) and z(ψ)z†(φ) = (z†×z)(S₂(φ⊗ψ)) + ⟨ψ̄, φ⟩
    /// applied to Φ, measured in the weighted norm.
    pub fn check_zf_relations(
        &self,
        psi: &WaveFunction1,
        phi: &WaveFunction1,
        vector: &FockVector,
        tol: f64,
    ) -> Result<ZfReport> {
        if vector.n_max() < 2 {
            return Err(Error::Domain("exchange relations need n_max >= 2".into()));
        }
        let dim = self.dim();
        let mut swapped = Tensor::zeros(2, dim)?;
        let mut straight = Tensor::zeros(2, dim)?;
        for a in 0..dim {
            for b in 0..dim {
                let pf = phi.values[a] * psi.values[b];
                swapped.set(&[a, b], self.s(b, a) * pf);
                straight.set(&[a, b], self.s(a, b) * pf);
            }
        }
        let lhs1 = self.annihilate(psi, &self.annihilate(phi, vector)?)?;
        let rhs1 = self.annihilate_pair(&swapped, vector)?;
        let r1 = lhs1.sub(&rhs1)?.norm();
        let lhs2 = self.annihilate(psi, &self.create(phi, vector)?)?;
        let contraction = psi.pairing(phi);
        let rhs2 = self
            .create_annihilate_pair(&straight, vector)?
            .add(&vector.scale(contraction))?;
        let r2 = lhs2.sub(&rhs2)?.norm();
        Ok(ZfReport {
            annihilators: r1,
            mixed: r2,
            tol,
            pass: r1 <= tol && r2 <= tol,
        })
    }

    fn boost_shift(&self, lambda: f64) -> Result<isize> {
        let s = lambda / self.grid.spacing();
        let r = s.round();
        if (s - r).abs() > 1e-9 * (1.0 + s.abs()) {
            return Err(Error::Domain(format!(
                "boost {lambda} is not an integer multiple of the grid spacing {}",
                self.grid.spacing()
            )));
        }
        Ok(r as isize)
    }

    /// (U(x,λ)Ψ)_n(θ) = e^{i Σ_k p(θ_k)·x} Ψ_n(θ_1 − λ, …, θ_n − λ) with λ an
    /// integer number of nodes; amplitude shifted off the grid is dropped and
    /// must stay below the support tolerance.
    pub fn poincare_apply(&self, g: &PoincareElement, phi: &FockVector) -> Result<FockVector> {
        self.check_vector(phi)?;
        let shift = self.boost_shift(g.lambda)?;
        let dim = self.dim();
        let m = self.model.mass();
        let phase: Vec<C64> = self
            .grid
            .nodes()
            .iter()
            .map(|&t| C64::from_polar(1.0, minkowski(momentum(m, t), g.x)))
            .collect();
        let w = self.grid.weights();
        let mut comps = Vec::with_capacity(phi.n_max() + 1);
        let mut dropped = 0.0;
        let mut idx = Vec::new();
        for (n, src) in phi.components().iter().enumerate() {
            let mut out = Tensor::zeros(n, dim)?;
            idx.resize(n, 0usize);
            for (j, &v) in src.data().iter().enumerate() {
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                unflatten(j, dim, &mut idx);
                let mut inside = true;
                let mut f = v;
                let mut wt = 1.0;
                for slot in idx.iter_mut() {
                    wt *= w[*slot];
                    let t = *slot as isize + shift;
                    if t < 0 || t >= dim as isize {
                        inside = false;
                        continue;
                    }
                    *slot = t as usize;
                    f *= phase[*slot];
                }
                if inside {
                    out.data_mut()[flatten(&idx, dim)] = f;
                } else {
                    dropped += v.norm_sqr() * wt;
                }
            }
            comps.push(out);
        }
        let total = phi.norm_sqr();
        if dropped > 0.0 && dropped.sqrt() > self.support_tol * total.sqrt().max(f64::MIN_POSITIVE) {
            return Err(Error::Support(format!(
                "boost by {shift} nodes pushes amplitude {:.3e} off the grid",
                dropped.sqrt()
            )));
        }
        FockVector::from_components(self.grid.clone(), comps)
    }

    /// (JΨ)_n(θ_1, …, θ_n) = conj Ψ_n(θ_n, …, θ_1).
    pub fn reflect_j(&self, phi: &FockVector) -> Result<FockVector> {
        self.check_vector(phi)?;
        self.map_indices(phi, |idx| idx.reverse())
    }

    /// (ΓΨ)_n(θ_1, …, θ_n) = conj Ψ_n(−θ_1, …, −θ_n).
    pub fn reflect_gamma(&self, phi: &FockVector) -> Result<FockVector> {
        self.check_vector(phi)?;
        let last = self.dim() - 1;
        self.map_indices(phi, |idx| idx.iter_mut().for_each(|i| *i = last - *i))
    }

    fn map_indices<F: Fn(&mut [usize])>(&self, phi: &FockVector, f: F) -> Result<FockVector> {
        let dim = self.dim();
        let mut comps = Vec::with_capacity(phi.n_max() + 1);
        for (n, src) in phi.components().iter().enumerate() {
            let mut out = Tensor::zeros(n, dim)?;
            let mut idx = vec![0usize; n];
            for (t, slot) in out.data_mut().iter_mut().enumerate() {
                unflatten(t, dim, &mut idx);
                f(&mut idx);
                *slot = src.data()[flatten(&idx, dim)].conj();
            }
            comps.push(out);
        }
        FockVector::from_components(self.grid.clone(), comps)
    }

    /// Δ^{it} = U(0, −2πt).
    pub fn modular_boost(&self, t: f64, phi: &FockVector) -> Result<FockVector> {
        self.poincare_apply(&PoincareElement::boost(-2.0 * PI * t), phi)
    }

    /// Random S₂-symmetric vector with every slot supported on nodes lo..=hi.
    pub fn random_symmetric<R: Rng>(&self, rng: &mut R, n_max: usize, lo: usize, hi: usize) -> Result<FockVector> {
        let dim = self.dim();
        let mut comps = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let raw = Tensor::random(rng, n, dim, lo, hi)?;
            comps.push(self.symmetrize(&raw)?);
        }
        FockVector::from_components(self.grid.clone(), comps)
    }

    /// Random one-particle function supported on nodes lo..=hi.
    pub fn random_wave<R: Rng>(&self, rng: &mut R, lo: usize, hi: usize) -> WaveFunction1 {
        let g = self.grid.clone();
        let values = (0..g.len())
            .map(|i| {
                if i >= lo && i <= hi {
                    C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        WaveFunction1 { grid: g, values }
    }
}
