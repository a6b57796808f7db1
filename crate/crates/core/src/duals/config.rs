use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::Norm;
use crate::point_process::Truncation;

/// Budget, CVaR level, norm and Monte Carlo controls for a robust estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobustificationConfig {
    /// Wasserstein budget `δ >= 0`.
    pub delta: f64,
    /// CVaR level `α ∈ (0, 1)`.
    pub alpha_level: f64,
    pub norm: Norm,
    pub truncation: Truncation,
    pub mc_replications: usize,
    pub seed: u64,
}

impl Default for RobustificationConfig {
    fn default() -> Self {
        Self {
            delta: 0.0,
            alpha_level: 0.95,
            norm: Norm::L2,
            truncation: Truncation::default(),
            mc_replications: 10_000,
            seed: 0,
        }
    }
}

impl RobustificationConfig {
    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        if !(self.alpha_level > 0.0 && self.alpha_level < 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha level {} outside (0, 1)",
                self.alpha_level
            )));
        }
        if self.mc_replications == 0 {
            return Err(Error::InvalidInput("need at least one replication".into()));
        }
        if self.truncation.atoms == 0 {
            return Err(Error::InvalidInput("truncation needs at least one atom".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta >= 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("budget delta {delta} must be finite and >= 0")))
    }
}

/// Outcome of a one-dimensional dual solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolveResult {
    pub lambda_star: f64,
    /// Dual objective at `lambda_star`.
    pub objective: f64,
    /// The robust functional recovered from the objective.
    pub robust_value: f64,
    #[serde(skip)]
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub converged: bool,
}

impl DualSolveResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serialization cannot fail")
    }
}
