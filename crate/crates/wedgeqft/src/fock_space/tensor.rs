use rand::Rng;

use crate::{Error, Result, C64};

/// Dense rank-n complex tensor on a grid of `dim` nodes, row-major with the
/// first rapidity slot most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    rank: usize,
    dim: usize,
    data: Vec<C64>,
}

/// Largest number of entries a single tensor may hold.
pub const MAX_ENTRIES: usize = 1 << 26;

fn checked_len(rank: usize, dim: usize) -> Result<usize> {
    let mut len: usize = 1;
    for _ in 0..rank {
        len = len
            .checked_mul(dim)
            .filter(|&l| l <= MAX_ENTRIES)
            .ok_or_else(|| Error::Cap(format!("rank {rank} tensor on {dim} nodes exceeds {MAX_ENTRIES} entries")))?;
    }
    Ok(len)
}

impl Tensor {
    pub fn zeros(rank: usize, dim: usize) -> Result<Self> {
        let len = checked_len(rank, dim)?;
        Ok(Tensor {
            rank,
            dim,
            data: vec![C64::new(0.0, 0.0); len],
        })
    }

    pub fn scalar(value: C64, dim: usize) -> Self {
        Tensor {
            rank: 0,
            dim,
            data: vec![value],
        }
    }

    pub fn from_data(rank: usize, dim: usize, data: Vec<C64>) -> Result<Self> {
        let len = checked_len(rank, dim)?;
        if data.len() != len {
            return Err(Error::Shape(format!(
                "rank {rank} tensor on {dim} nodes needs {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Tensor { rank, dim, data })
    }

    /// Tensor product of one-particle vectors.
    pub fn product(factors: &[&[C64]], dim: usize) -> Result<Self> {
        let mut t = Tensor::scalar(C64::new(1.0, 0.0), dim);
        for f in factors {
            if f.len() != dim {
                return Err(Error::Shape(format!("factor of length {} on {dim} nodes", f.len())));
            }
            let mut next = Tensor::zeros(t.rank + 1, dim)?;
            for (i, a) in t.data.iter().enumerate() {
                for (j, b) in f.iter().enumerate() {
                    next.data[i * dim + j] = a * b;
                }
            }
            t = next;
        }
        Ok(t)
    }

    /// Independent standard complex normal entries, nonzero only on nodes in
    /// `lo..=hi` for every slot.
    pub fn random<R: Rng>(rng: &mut R, rank: usize, dim: usize, lo: usize, hi: usize) -> Result<Self> {
        let mut t = Tensor::zeros(rank, dim)?;
        let mut idx = vec![0usize; rank];
        for k in 0..t.data.len() {
            unflatten(k, dim, &mut idx);
            if idx.iter().all(|&i| i >= lo && i <= hi) {
                t.data[k] = C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
            }
        }
        Ok(t)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        flatten(idx, self.dim)
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[flatten(idx, self.dim)]
    }

    pub fn set(&mut self, idx: &[usize], v: C64) {
        let k = flatten(idx, self.dim);
        self.data[k] = v;
    }

    fn check_same(&self, other: &Tensor) -> Result<()> {
        if self.rank != other.rank || self.dim != other.dim {
            return Err(Error::Shape(format!(
                "tensor shapes differ: rank {} dim {} vs rank {} dim {}",
                self.rank, self.dim, other.rank, other.dim
            )));
        }
        Ok(())
    }

    /// Product weights ∏_k w_{i_k} laid out like the data.
    pub fn weight_products(rank: usize, weights: &[f64]) -> Vec<f64> {
        let mut w = vec![1.0];
        for _ in 0..rank {
            let mut next = Vec::with_capacity(w.len() * weights.len());
            for a in &w {
                for b in weights {
                    next.push(a * b);
                }
            }
            w = next;
        }
        w
    }

    /// Weighted inner product, antilinear in `self`.
    pub fn inner(&self, other: &Tensor, weights: &[f64]) -> Result<C64> {
        self.check_same(other)?;
        let w = Self::weight_products(self.rank, weights);
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .zip(&w)
            .map(|((a, b), w)| a.conj() * b * *w)
            .sum())
    }

    pub fn norm_sqr(&self, weights: &[f64]) -> f64 {
        let w = Self::weight_products(self.rank, weights);
        self.data.iter().zip(&w).map(|(a, w)| a.norm_sqr() * w).sum()
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with<F: Fn(C64, C64) -> C64>(&self, other: &Tensor, f: F) -> Result<Tensor> {
        self.check_same(other)?;
        Ok(Tensor {
            rank: self.rank,
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn scale(&self, c: C64) -> Tensor {
        Tensor {
            rank: self.rank,
            dim: self.dim,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Entrywise maximum of |self − other|.
    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

pub fn flatten(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

pub fn unflatten(mut k: usize, dim: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = k % dim;
        k /= dim;
    }
}

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Adjacent transposition τ_k swapping slots k and k+1 (0-based).
pub fn transposition(n: usize, k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(k, k + 1);
    p
}

/// Composition (σ∘π)(i) = σ(π(i)).
pub fn compose(sigma: &[usize], pi: &[usize]) -> Vec<usize> {
    pi.iter().map(|&i| sigma[i]).collect()
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Pairs (l, k) with l < k and p(l) > p(k).
pub fn inversions(p: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for l in 0..p.len() {
        for k in l + 1..p.len() {
            if p[l] > p[k] {
                out.push((l, k));
            }
        }
    }
    out
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
