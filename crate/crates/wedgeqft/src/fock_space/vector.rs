use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::{GridHeader, RapidityGrid, WaveFunction1};
use super::tensor::Tensor;
use crate::{Error, Result, C64};

/// Particle-number-truncated vector: components Ψ_0 (a scalar) up to Ψ_{n_max}.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    grid: Arc<RapidityGrid>,
    components: Vec<Tensor>,
}

const FORMAT_TAG: &str = "wedgeqft-fock-vector";

#[derive(Serialize, Deserialize)]
struct FockVectorFile {
    format: String,
    version: u32,
    grid: GridHeader,
    n_max: usize,
    /// Per particle number, interleaved (re, im) pairs in row-major order.
    components: Vec<Vec<f64>>,
}

impl FockVector {
    /// Ω: Ψ_0 = 1, nothing else.
    pub fn vacuum(grid: Arc<RapidityGrid>) -> Self {
        let dim = grid.len();
        FockVector {
            grid,
            components: vec![Tensor::scalar(C64::new(1.0, 0.0), dim)],
        }
    }

    pub fn zero(grid: Arc<RapidityGrid>, n_max: usize) -> Result<Self> {
        let dim = grid.len();
        let components = (0..=n_max).map(|n| Tensor::zeros(n, dim)).collect::<Result<_>>()?;
        Ok(FockVector { grid, components })
    }

    pub fn from_components(grid: Arc<RapidityGrid>, components: Vec<Tensor>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Shape("a Fock vector needs at least the n = 0 component".into()));
        }
        for (n, t) in components.iter().enumerate() {
            if t.rank() != n || t.dim() != grid.len() {
                return Err(Error::Shape(format!(
                    "component {n} has rank {} on {} nodes, expected rank {n} on {}",
                    t.rank(),
                    t.dim(),
                    grid.len()
                )));
            }
        }
        Ok(FockVector { grid, components })
    }

    /// The one-particle vector ψ (Ψ_0 = 0).
    pub fn one_particle(psi: &WaveFunction1) -> Self {
        let dim = psi.grid.len();
        FockVector {
            grid: psi.grid.clone(),
            components: vec![
                Tensor::scalar(C64::new(0.0, 0.0), dim),
                Tensor::from_data(1, dim, psi.values.clone()).expect("length matches grid"),
            ],
        }
    }

    pub fn grid(&self) -> &Arc<RapidityGrid> {
        &self.grid
    }

    pub fn n_max(&self) -> usize {
        self.components.len() - 1
    }

    pub fn component(&self, n: usize) -> Option<&Tensor> {
        self.components.get(n)
    }

    pub fn components(&self) -> &[Tensor] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Tensor> {
        self.components
    }

    /// Same vector with zero components appended up to `n_max`.
    pub fn padded(&self, n_max: usize) -> Result<Self> {
        let mut out = self.clone();
        while out.components.len() <= n_max {
            let n = out.components.len();
            out.components.push(Tensor::zeros(n, self.grid.len())?);
        }
        Ok(out)
    }

    fn check_grid(&self, other: &FockVector) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape("Fock vectors live on different grids".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &FockVector) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &FockVector) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    fn combine<F: Fn(C64, C64) -> C64 + Copy>(&self, other: &FockVector, f: F) -> Result<Self> {
        self.check_grid(other)?;
        let n = self.n_max().max(other.n_max());
        let a = self.padded(n)?;
        let b = other.padded(n)?;
        let components = a
            .components
            .iter()
            .zip(&b.components)
            .map(|(x, y)| x.zip_with(y, f))
            .collect::<Result<_>>()?;
        Ok(FockVector {
            grid: self.grid.clone(),
            components,
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        FockVector {
            grid: self.grid.clone(),
            components: self.components.iter().map(|t| t.scale(c)).collect(),
        }
    }

    /// Σ_n ⟨Φ_n, Ψ_n⟩ with product trapezoid weights, antilinear in `self`.
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        self.check_grid(other)?;
        let w = self.grid.weights();
        let mut acc = C64::new(0.0, 0.0);
        for (a, b) in self.components.iter().zip(&other.components) {
            acc += a.inner(b, w)?;
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> f64 {
        let w = self.grid.weights();
        self.components.iter().map(|t| t.norm_sqr(w)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ‖(N + shift)^{1/2} Φ‖.
    pub fn number_norm(&self, shift: f64) -> f64 {
        let w = self.grid.weights();
        self.components
            .iter()
            .enumerate()
            .map(|(n, t)| (n as f64 + shift) * t.norm_sqr(w))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &FockVector) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.components.iter().map(|t| t.max_abs()).fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> String {
        let file = FockVectorFile {
            format: FORMAT_TAG.into(),
            version: 1,
            grid: self.grid.header(),
            n_max: self.n_max(),
            components: self
                .components
                .iter()
                .map(|t| t.data().iter().flat_map(|z| [z.re, z.im]).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FockVectorFile =
            serde_json::from_str(text).map_err(|e| Error::Io(format!("bad Fock vector JSON: {e}")))?;
        if file.format != FORMAT_TAG {
            return Err(Error::Io(format!("unexpected format tag {:?}", file.format)));
        }
        if file.components.len() != file.n_max + 1 {
            return Err(Error::Shape("component count does not match n_max".into()));
        }
        let grid = RapidityGrid::shared(file.grid.half_width, file.grid.count)?;
        let dim = grid.len();
        let components = file
            .components
            .into_iter()
            .enumerate()
            .map(|(n, flat)| {
                if flat.len() % 2 != 0 {
                    return Err(Error::Shape(format!("component {n} has an odd number of reals")));
                }
                let data = flat.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
                Tensor::from_data(n, dim, data)
            })
            .collect::<Result<_>>()?;
        Self::from_components(grid, components)
    }
}
