use serde::{Deserialize, Serialize};

use crate::duals::upper_quantile_index;
use crate::error::{Error, Result};
use crate::norm::Norm;

/// A real-valued loss on sample space.
pub trait Loss: Sync {
    fn value(&self, z: &[f64]) -> f64;
}

impl<F> Loss for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn value(&self, z: &[f64]) -> f64 {
        self(z)
    }
}

/// `ℓ(z) = ‖z‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormLoss(pub Norm);

impl Loss for NormLoss {
    fn value(&self, z: &[f64]) -> f64 {
        self.0.norm(z)
    }
}

/// `ℓ(z) = ‖z‖_1 · 1{‖z‖_1 <= x_α} / p`, whose mean is the lower-truncated
/// L1 functional used in the risk sweeps (`p ≈ α`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedL1Loss {
    pub threshold: f64,
    pub normalizer: f64,
}

impl TruncatedL1Loss {
    pub fn new(threshold: f64, normalizer: f64) -> Result<Self> {
        if !(normalizer > 0.0 && normalizer <= 1.0) {
            return Err(Error::InvalidInput(format!("normalizer {normalizer} outside (0, 1]")));
        }
        if !(threshold >= 0.0) {
            return Err(Error::InvalidInput(format!("threshold {threshold} must be >= 0")));
        }
        Ok(Self { threshold, normalizer })
    }

    /// Threshold at the empirical `α`-quantile of `‖x‖_1` over `samples`;
    /// the normalizer is the fraction of samples at or below it, so the mean
    /// loss over `samples` equals the empirical target.
    pub fn fit(samples: &[Vec<f64>], alpha_level: f64) -> Result<Self> {
        if !(alpha_level > 0.0 && alpha_level <= 1.0) {
            return Err(Error::InvalidInput(format!("alpha level {alpha_level} outside (0, 1]")));
        }
        if samples.is_empty() {
            return Err(Error::Empty("samples"));
        }
        let mut norms: Vec<f64> = samples.iter().map(|x| Norm::L1.norm(x)).collect();
        norms.sort_by(f64::total_cmp);
        let threshold = norms[upper_quantile_index(norms.len(), alpha_level)];
        let below = norms.partition_point(|v| *v <= threshold);
        Self::new(threshold, below as f64 / norms.len() as f64)
    }
}

impl Loss for TruncatedL1Loss {
    fn value(&self, z: &[f64]) -> f64 {
        let s = Norm::L1.norm(z);
        if s <= self.threshold {
            s / self.normalizer
        } else {
            0.0
        }
    }
}
