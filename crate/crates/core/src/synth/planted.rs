use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::zig::{link_transform, zig_sample, RawParamTriple};

/// Ground-truth map from a feature vector to raw ZIG parameters:
/// `raw = bias + coefficients · x` for each of the three parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedLinearZig {
    pub bias: [f64; 3],
    /// One coefficient row per parameter (p, k, θ), each of feature width.
    pub coefficients: [Vec<f64>; 3],
}

/// A sampled regression corpus with the parameters that generated it.
#[derive(Debug, Clone)]
pub struct PlantedSample {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub truth: Vec<RawParamTriple>,
}

impl PlantedLinearZig {
    /// Coefficients drawn uniformly from ±`scale` around fixed biases.
    pub fn random(width: usize, scale: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut row = || (0..width).map(|_| rng.random_range(-scale..=scale)).collect::<Vec<_>>();
        Self { bias: [-0.5, 1.0, 0.5], coefficients: [row(), row(), row()] }
    }

    pub fn width(&self) -> usize {
        self.coefficients[0].len()
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.width();
        if self.coefficients.iter().any(|c| c.len() != w) {
            return Err(Error::invalid("planted coefficient rows differ in width"));
        }
        if self.bias.iter().chain(self.coefficients.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("planted coefficients must be finite"));
        }
        Ok(())
    }

    pub fn raw_params(&self, x: &[f64]) -> RawParamTriple {
        let dot = |i: usize| self.bias[i] + self.coefficients[i].iter().zip(x).map(|(c, v)| c * v).sum::<f64>();
        RawParamTriple::new(dot(0), dot(1), dot(2))
    }

    /// `n` rows of standard-normal features with labels drawn from the
    /// planted distribution.
    pub fn sample(&self, n: usize, seed: u64) -> Result<PlantedSample> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = self.width();
        let mut x = Matrix::with_cols(w);
        let mut y = Vec::with_capacity(n);
        let mut truth = Vec::with_capacity(n);
        for _ in 0..n {
            let row: Vec<f64> = (0..w).map(|_| rng.sample(StandardNormal)).collect();
            let raw = self.raw_params(&row);
            y.push(zig_sample(&link_transform(raw)?, &mut rng));
            truth.push(raw);
            x.push_row(&row)?;
        }
        Ok(PlantedSample { x, y, truth })
    }
}
