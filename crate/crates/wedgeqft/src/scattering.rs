//! Scattering states built from ordered wave packets, the Møller
//! multipliers and the factorizing S-matrix they produce.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fock_space::{factorial, flatten, inversions, unflatten, FockSpace, FockVector, Tensor, WaveFunction1};
use crate::scattering_function::ScatteringFunction;
use crate::{Error, Result, C64};

/// Wave functions with strictly ordered supports ψ₁ ≺ ψ₂ ≺ … and at least
/// one empty node between neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedWavePacket {
    waves: Vec<WaveFunction1>,
}

impl OrderedWavePacket {
    pub fn new(waves: Vec<WaveFunction1>) -> Result<Self> {
        let mut last: Option<usize> = None;
        for (k, w) in waves.iter().enumerate() {
            if *w.grid != *waves[0].grid {
                return Err(Error::Shape("packet entries live on different grids".into()));
            }
            let (lo, hi) = w
                .support()
                .ok_or_else(|| Error::Domain(format!("packet entry {k} vanishes identically")))?;
            if let Some(prev) = last {
                if lo < prev + 2 {
                    return Err(Error::Domain(format!(
                        "packet entry {k} starts at node {lo}, not separated from the previous support ending at {prev}"
                    )));
                }
            }
            last = Some(hi);
        }
        Ok(OrderedWavePacket { waves })
    }

    /// Sorts the entries by support before validating.
    pub fn from_unordered(mut waves: Vec<WaveFunction1>) -> Result<Self> {
        waves.sort_by_key(|w| w.support().map_or(usize::MAX, |s| s.0));
        Self::new(waves)
    }

    /// Random packet of `n` entries supported on consecutive blocks of the grid.
    pub fn random<R: Rng>(fs: &FockSpace, rng: &mut R, n: usize) -> Result<Self> {
        let dim = fs.dim();
        if n == 0 || dim + 1 < 2 * n {
            return Err(Error::Domain(format!("cannot place {n} separated supports on {dim} nodes")));
        }
        let block = (dim + 1) / n;
        let waves = (0..n)
            .map(|k| {
                let lo = k * block;
                let hi = (lo + block - 2).min(dim - 1);
                fs.random_wave(rng, lo, hi)
            })
            .collect();
        Self::new(waves)
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    pub fn waves(&self) -> &[WaveFunction1] {
        &self.waves
    }

    /// ψ₁ ⊗ … ⊗ ψ_n
    pub fn tensor(&self) -> Result<Tensor> {
        let vals: Vec<&[C64]> = self.waves.iter().map(|w| w.values.as_slice()).collect();
        let dim = self.waves.first().map_or(0, |w| w.values.len());
        Tensor::product(&vals, dim)
    }

    pub fn reversed(&self) -> Vec<WaveFunction1> {
        self.waves.iter().rev().cloned().collect()
    }
}

fn check_packet(fs: &FockSpace, packet: &OrderedWavePacket) -> Result<()> {
    if packet.waves.first().is_some_and(|w| *w.grid != **fs.grid()) {
        return Err(Error::Shape("packet grid differs from the space grid".into()));
    }
    Ok(())
}

fn creation_chain<'a, I: Iterator<Item = &'a WaveFunction1>>(fs: &FockSpace, order: I) -> Result<FockVector> {
    let mut v = fs.vacuum();
    for w in order {
        v = fs.create(w, &v)?;
    }
    Ok(v)
}

/// z†(ψ₁)…z†(ψ_n)Ω
pub fn out_state(fs: &FockSpace, packet: &OrderedWavePacket) -> Result<FockVector> {
    check_packet(fs, packet)?;
    // the rightmost creator acts first
    creation_chain(fs, packet.waves.iter().rev())
}

/// z†(ψ_n)…z†(ψ₁)Ω
pub fn in_state(fs: &FockSpace, packet: &OrderedWavePacket) -> Result<FockVector> {
    check_packet(fs, packet)?;
    creation_chain(fs, packet.waves.iter())
}

fn projected(fs: &FockSpace, t: Tensor) -> Result<FockVector> {
    let n = t.rank();
    let dim = fs.dim();
    let mut comps: Vec<Tensor> = (0..n).map(|k| Tensor::zeros(k, dim)).collect::<Result<_>>()?;
    comps.push(fs.symmetrize(&t)?.scale(C64::new(factorial(n).sqrt(), 0.0)));
    FockVector::from_components(fs.grid().clone(), comps)
}

/// √n! P_n(ψ₁ ⊗ … ⊗ ψ_n)
pub fn out_state_projected(fs: &FockSpace, packet: &OrderedWavePacket) -> Result<FockVector> {
    check_packet(fs, packet)?;
    projected(fs, packet.tensor()?)
}

/// √n! P_n(ψ_n ⊗ … ⊗ ψ₁)
pub fn in_state_projected(fs: &FockSpace, packet: &OrderedWavePacket) -> Result<FockVector> {
    check_packet(fs, packet)?;
    let rev = packet.reversed();
    let vals: Vec<&[C64]> = rev.iter().map(|w| w.values.as_slice()).collect();
    projected(fs, Tensor::product(&vals, fs.dim())?)
}

/// ∏_{k<l} S₂(|θ_k − θ_l|)
pub fn smatrix_factor(s: &ScatteringFunction, thetas: &[f64]) -> C64 {
    let mut f = C64::new(1.0, 0.0);
    for k in 0..thetas.len() {
        for l in k + 1..thetas.len() {
            f *= s.at((thetas[k] - thetas[l]).abs());
        }
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    In,
    Out,
}

/// Stable ascending sort order of the rapidities.
fn ascending(thetas: &[f64]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..thetas.len()).collect();
    p.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
    p
}

/// S^π(θ) = ∏_{l<k, π(l)>π(k)} S₂(θ_{π(l)} − θ_{π(k)}).
fn s_pi(s: &ScatteringFunction, perm: &[usize], thetas: &[f64]) -> C64 {
    inversions(perm)
        .iter()
        .map(|&(l, k)| s.at(thetas[perm[l]] - thetas[perm[k]]))
        .product()
}

/// Out: 1/S^π with π the stable ascending sort. In: S^π with π the reversal
/// of that sort.
pub fn moller_multiplier(s: &ScatteringFunction, direction: Direction, thetas: &[f64]) -> C64 {
    let mut p = ascending(thetas);
    match direction {
        Direction::Out => s_pi(s, &p, thetas).inv(),
        Direction::In => {
            p.reverse();
            s_pi(s, &p, thetas)
        }
    }
}

/// Ŝ on H_n: nodewise multiplication by the S-matrix factor.
pub fn apply_smatrix(fs: &FockSpace, psi: &Tensor) -> Result<Tensor> {
    let s = fs.model();
    let nodes = fs.grid().nodes();
    let n = psi.rank();
    let mut out = psi.clone();
    let mut idx = vec![0usize; n];
    let mut th = vec![0.0; n];
    for (t, v) in out.data_mut().iter_mut().enumerate() {
        if *v == C64::new(0.0, 0.0) {
            continue;
        }
        unflatten(t, fs.dim(), &mut idx);
        for (x, &i) in th.iter_mut().zip(&idx) {
            *x = nodes[i];
        }
        *v *= smatrix_factor(s, &th);
    }
    Ok(out)
}

/// (θ_a, θ_b) ↦ V_out*(θ)V_in(θ) on all node pairs, for an ordered pair.
pub fn two_particle_smatrix(fs: &FockSpace, psi1: &WaveFunction1, psi2: &WaveFunction1) -> Result<Tensor> {
    OrderedWavePacket::new(vec![psi1.clone(), psi2.clone()])?;
    let dim = fs.dim();
    let nodes = fs.grid().nodes();
    let s = fs.model();
    let mut out = Tensor::zeros(2, dim)?;
    for a in 0..dim {
        for b in 0..dim {
            let th = [nodes[a], nodes[b]];
            let v = moller_multiplier(s, Direction::Out, &th) * moller_multiplier(s, Direction::In, &th);
            out.data_mut()[flatten(&[a, b], dim)] = v;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResidual {
    /// |moller_out · moller_in − smatrix_factor| at random rapidities
    pub multiplier: f64,
    /// |⟨out, in⟩ − ⟨Φ⁺, ŜΦ⁺⟩| / ‖Φ⁺‖²
    pub state: f64,
    /// max difference between the creation chain and √n! P_n(⊗ψ)
    pub construction: f64,
    /// ⟨out, in⟩ / ‖Φ⁺‖²
    pub overlap_ratio: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmatrixReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub per_trial: Vec<TrialResidual>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Bosonic √n! P_n^+(ψ₁ ⊗ … ⊗ ψ_n) on the same grid.
pub fn bosonic_state(fs: &FockSpace, packet: &OrderedWavePacket) -> Result<Tensor> {
    let free = FockSpace::new(ScatteringFunction::free(fs.model().mass()), fs.grid().clone());
    let n = packet.len();
    Ok(free.symmetrize(&packet.tensor()?)?.scale(C64::new(factorial(n).sqrt(), 0.0)))
}

pub fn recover_smatrix(fs: &FockSpace, n: usize, trials: usize, tol: f64, seed: u64) -> Result<SmatrixReport> {
    if n == 0 || n > fs.n_cap() {
        return Err(Error::Cap(format!("particle number {n} outside 1..={}", fs.n_cap())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = fs.model();
    let w = fs.grid().weights();
    let hw = fs.grid().half_width();
    let mut per_trial = Vec::with_capacity(trials);
    for _ in 0..trials {
        let th: Vec<f64> = (0..n).map(|_| rng.gen_range(-hw..hw)).collect();
        let ratio = moller_multiplier(s, Direction::Out, &th) * moller_multiplier(s, Direction::In, &th);
        let multiplier = (ratio - smatrix_factor(s, &th)).norm();

        let packet = OrderedWavePacket::random(fs, &mut rng, n)?;
        let out = out_state(fs, &packet)?;
        let inn = in_state(fs, &packet)?;
        let construction = out.max_abs_diff(&out_state_projected(fs, &packet)?)?;
        let plus = bosonic_state(fs, &packet)?;
        let norm2 = plus.norm_sqr(w);
        let lhs = out.inner(&inn)?;
        let rhs = plus.inner(&apply_smatrix(fs, &plus)?, w)?;
        per_trial.push(TrialResidual {
            multiplier,
            state: (lhs - rhs).norm() / norm2,
            construction,
            overlap_ratio: lhs / norm2,
        });
    }
    let max_residual = per_trial
        .iter()
        .map(|t| t.multiplier.max(t.state).max(t.construction))
        .fold(0.0, f64::max);
    Ok(SmatrixReport {
        n,
        trials,
        seed,
        per_trial,
        max_residual,
        tol,
        pass: max_residual <= tol,
    })
}

#[cfg(test)]
mod tests;
