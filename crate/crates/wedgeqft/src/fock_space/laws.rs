//! Randomized checks of the D_n representation, the projector P_n and the
//! exchange relations, reduced to residual maxima.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{permutations, transposition, FockSpace, Tensor};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub n_max: usize,
    pub trials: usize,
    /// D(τ_k)² = 1
    pub involution: f64,
    /// D(τ_k)D(τ_{k+1})D(τ_k) = D(τ_{k+1})D(τ_k)D(τ_{k+1})
    pub braid: f64,
    /// D(τ_k)D(τ_j) = D(τ_j)D(τ_k) for |k − j| ≥ 2
    pub far_commutation: f64,
    /// |‖D(π)ψ‖² − ‖ψ‖²| / ‖ψ‖²
    pub unitarity: f64,
    /// P² = P
    pub idempotence: f64,
    /// ⟨Pf, g⟩ = ⟨f, Pg⟩
    pub self_adjoint: f64,
    /// exchange defect of Pψ
    pub symmetry: f64,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

fn fold(acc: &mut f64, v: f64) {
    *acc = acc.max(v);
}

pub fn verify_representation_laws<R: Rng>(
    fs: &FockSpace,
    n_max: usize,
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Result<RepresentationReport> {
    if n_max > fs.n_cap() {
        return Err(Error::Cap(format!("n_max {n_max} exceeds the cap {}", fs.n_cap())));
    }
    let dim = fs.dim();
    let w = fs.grid().weights().to_vec();
    let (mut inv, mut braid, mut far, mut unit, mut idem, mut adj, mut sym) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..trials {
        for n in 0..=n_max {
            let t = Tensor::random(rng, n, dim, 0, dim - 1)?;
            let g = Tensor::random(rng, n, dim, 0, dim - 1)?;
            for k in 0..n.saturating_sub(1) {
                let tk = transposition(n, k);
                let once = fs.apply_dn(&tk, &t)?;
                fold(&mut inv, fs.apply_dn(&tk, &once)?.max_abs_diff(&t)?);
                if k + 2 < n {
                    let tl = transposition(n, k + 1);
                    let a = fs.apply_dn(&tk, &fs.apply_dn(&tl, &once)?)?;
                    let b = fs.apply_dn(&tl, &fs.apply_dn(&tk, &fs.apply_dn(&tl, &t)?)?)?;
                    fold(&mut braid, a.max_abs_diff(&b)?);
                }
                for j in k + 2..n - 1 {
                    let tj = transposition(n, j);
                    let a = fs.apply_dn(&tk, &fs.apply_dn(&tj, &t)?)?;
                    let b = fs.apply_dn(&tj, &once)?;
                    fold(&mut far, a.max_abs_diff(&b)?);
                }
            }
            let nt = t.norm_sqr(&w);
            for p in permutations(n) {
                let u = fs.apply_dn(&p, &t)?;
                fold(&mut unit, (u.norm_sqr(&w) - nt).abs() / nt);
            }
            let pt = fs.symmetrize(&t)?;
            fold(&mut idem, fs.symmetrize(&pt)?.max_abs_diff(&pt)?);
            let pg = fs.symmetrize(&g)?;
            fold(&mut adj, (pt.inner(&g, &w)? - t.inner(&pg, &w)?).norm());
            fold(&mut sym, fs.symmetry_defect(&pt));
        }
    }
    let max_residual = [inv, braid, far, unit, idem, adj, sym].into_iter().fold(0.0, f64::max);
    Ok(RepresentationReport {
        n_max,
        trials,
        involution: inv,
        braid,
        far_commutation: far,
        unitarity: unit,
        idempotence: idem,
        self_adjoint: adj,
        symmetry: sym,
        max_residual,
        tol,
        pass: max_residual <= tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub n_max: usize,
    pub trials: usize,
    pub annihilators: f64,
    pub mixed: f64,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Both exchange relations on random (ψ, φ, Φ) triples.
pub fn verify_zf_algebra<R: Rng>(
    fs: &FockSpace,
    n_max: usize,
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Result<AlgebraReport> {
    let hi = fs.dim() - 1;
    let (mut a, mut m) = (0.0, 0.0);
    for _ in 0..trials {
        let psi = fs.random_wave(rng, 0, hi);
        let phi = fs.random_wave(rng, 0, hi);
        let v = fs.random_symmetric(rng, n_max, 0, hi)?;
        let r = fs.check_zf_relations(&psi, &phi, &v, tol)?;
        fold(&mut a, r.annihilators);
        fold(&mut m, r.mixed);
    }
    let max_residual = f64::max(a, m);
    Ok(AlgebraReport {
        n_max,
        trials,
        annihilators: a,
        mixed: m,
        max_residual,
        tol,
        pass: max_residual <= tol,
    })
}
