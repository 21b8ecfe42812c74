use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Symmetric uniform rapidity grid with trapezoid weights.
///
/// The node count is odd so that θ = 0 is a node and θ ↦ −θ is an index
/// mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct RapidityGrid {
    half_width: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub half_width: f64,
    pub count: usize,
}

impl RapidityGrid {
    pub fn new(half_width: f64, count: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Domain(format!("grid half width must be positive, got {half_width}")));
        }
        if count < 3 || count % 2 == 0 {
            return Err(Error::Domain(format!("grid node count must be odd and >= 3, got {count}")));
        }
        let spacing = 2.0 * half_width / (count - 1) as f64;
        let c = (count - 1) / 2;
        let nodes = (0..count).map(|i| (i as f64 - c as f64) * spacing).collect();
        let mut weights = vec![spacing; count];
        weights[0] *= 0.5;
        weights[count - 1] *= 0.5;
        Ok(RapidityGrid {
            half_width,
            nodes,
            weights,
            spacing,
        })
    }

    pub fn shared(half_width: f64, count: usize) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(half_width, count)?))
    }

    pub fn header(&self) -> GridHeader {
        GridHeader {
            half_width: self.half_width,
            count: self.len(),
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the node −θ_i.
    pub fn mirror_index(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    /// Samples a function at the nodes.
    pub fn sample<F: FnMut(f64) -> C64>(self: &Arc<Self>, f: F) -> WaveFunction1 {
        WaveFunction1 {
            grid: self.clone(),
            values: self.nodes.iter().copied().map(f).collect(),
        }
    }

    /// Weighted sum Σ w_i f(θ_i).
    pub fn integrate<F: FnMut(f64) -> C64>(&self, mut f: F) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| f(t) * w).sum()
    }
}

/// One-particle wave function sampled on a rapidity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction1 {
    pub grid: Arc<RapidityGrid>,
    pub values: Vec<C64>,
}

impl WaveFunction1 {
    pub fn new(grid: Arc<RapidityGrid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "wave function has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(WaveFunction1 { grid, values })
    }

    pub fn zeros(grid: Arc<RapidityGrid>) -> Self {
        let n = grid.len();
        WaveFunction1 {
            grid,
            values: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// ‖ψ‖² = Σ w_i |ψ_i|².
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().zip(self.grid.weights()).map(|(v, w)| v.norm_sqr() * w).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ⟨self, other⟩, antilinear in the first slot.
    pub fn inner(&self, other: &WaveFunction1) -> C64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.grid.weights())
            .map(|((a, b), w)| a.conj() * b * *w)
            .sum()
    }

    /// Σ w_i ψ_i φ_i, the bilinear pairing ⟨conj ψ, φ⟩.
    pub fn pairing(&self, other: &WaveFunction1) -> C64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.grid.weights())
            .map(|((a, b), w)| a * b * *w)
            .sum()
    }

    pub fn conj(&self) -> Self {
        WaveFunction1 {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn map<F: FnMut(usize, C64) -> C64>(&self, mut f: F) -> Self {
        WaveFunction1 {
            grid: self.grid.clone(),
            values: self.values.iter().enumerate().map(|(i, v)| f(i, *v)).collect(),
        }
    }

    /// First and last node carrying a nonzero amplitude.
    pub fn support(&self) -> Option<(usize, usize)> {
        let first = self.values.iter().position(|v| *v != C64::new(0.0, 0.0))?;
        let last = self.values.iter().rposition(|v| *v != C64::new(0.0, 0.0))?;
        Some((first, last))
    }
}
