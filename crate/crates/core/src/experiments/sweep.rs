use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    run_dro_training, EvaluationPool, Loss, RobustificationMode, TrainConfig, TruncatedL1Loss,
};
use crate::duals::{upper_quantile_index, RobustificationConfig};
use crate::error::{Error, Result};
use crate::evt::{sample_max_stable, DependenceModel};
use crate::norm::Norm;
use crate::rng::derived;

/// Samples below the threshold needed before the target is trusted.
const MIN_SAMPLES_BELOW: usize = 10;
const TRUE_RISK_CHUNK: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetEstimate {
    pub value: f64,
    /// Empirical `α`-quantile `x_α` of `‖X‖_1`.
    pub threshold: f64,
    /// Number of samples with `‖X‖_1 <= x_α`.
    pub below: usize,
    pub flagged: bool,
}

/// `(1/α) E[‖X‖_1 · 1{‖X‖_1 <= x_α}]` with `x_α` the empirical
/// `α`-quantile of `‖X‖_1`.
///
/// The empirical version normalizes by the observed fraction of samples at
/// or below `x_α` rather than by `α`, which is the same for continuous data
/// but stays exact under ties: it is the mean of `‖X‖_1` over those samples.
pub fn cvar_l1_target(samples: &[Vec<f64>], alpha_level: f64) -> Result<TargetEstimate> {
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
    let value = norms[..below].iter().sum::<f64>() / below as f64;
    Ok(TargetEstimate { value, threshold, below, flagged: below < MIN_SAMPLES_BELOW })
}

/// Where the reference ("true") risk of a sweep comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TrueRiskSource {
    /// Monte Carlo under a known model.
    Model { model: DependenceModel, samples: usize, seed: u64 },
    /// Mean loss over held-out observations.
    Samples(Vec<Vec<f64>>),
    Value(f64),
}

impl TrueRiskSource {
    /// The default large-sample oracle: `10^6` draws.
    pub fn model(model: DependenceModel, seed: u64) -> Self {
        TrueRiskSource::Model { model, samples: 1_000_000, seed }
    }

    pub fn evaluate(&self, loss: &dyn Loss) -> Result<f64> {
        match self {
            TrueRiskSource::Value(v) => Ok(*v),
            TrueRiskSource::Samples(xs) => {
                if xs.is_empty() {
                    return Err(Error::Empty("held-out samples"));
                }
                Ok(xs.iter().map(|x| loss.value(x)).sum::<f64>() / xs.len() as f64)
            }
            TrueRiskSource::Model { model, samples, seed } => {
                if *samples == 0 {
                    return Err(Error::Empty("true-risk samples"));
                }
                let chunks = samples.div_ceil(TRUE_RISK_CHUNK);
                let sums: Vec<f64> = (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let n = TRUE_RISK_CHUNK.min(samples - c * TRUE_RISK_CHUNK);
                        let xs = sample_max_stable(&mut derived(*seed, &[c as u64]), model, n, model.dim())?;
                        Ok(xs.iter().map(|x| loss.value(x)).sum::<f64>())
                    })
                    .collect::<Result<_>>()?;
                Ok(sums.iter().sum::<f64>() / *samples as f64)
            }
        }
    }
}

/// `n` points geometrically spaced over `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
        return Err(Error::InvalidInput(format!("bad geometric grid [{lo}, {hi}] x {n}")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo * (ratio * i as f64).exp() })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub modes: Vec<RobustificationMode>,
    pub delta_grid: Vec<f64>,
    /// `alpha_level` sets the loss truncation; `delta` is ignored.
    pub robust: RobustificationConfig,
    pub train: TrainConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            modes: RobustificationMode::ALL.to_vec(),
            delta_grid: geometric_grid(1e-3, 10.0, 12).expect("valid default grid"),
            robust: RobustificationConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

/// One (δ, mode) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskSweepRecord {
    pub delta: f64,
    pub mode: RobustificationMode,
    pub robust_risk: f64,
    pub true_risk: f64,
    pub error: f64,
    pub seed: u64,
    pub replications: usize,
    #[serde(skip)]
    pub converged: bool,
}

/// Robust risk of the truncated-L1 loss for every `(δ, mode)`, against a
/// reference risk.
///
/// The loss threshold is the `alpha_level`-quantile of `‖X‖_1` in `data`.
/// Every mode whose adversary class is contained in a requested mode is
/// trained too, and a mode's risk is evaluated with the candidate samples of
/// all the classes it contains, so the ordering of the feasible sets carries
/// over to the estimates. Records are sorted by mode, then `δ`.
pub fn error_vs_delta_sweep(
    data: &[Vec<f64>],
    base_model: &DependenceModel,
    true_risk: &TrueRiskSource,
    config: &SweepConfig,
) -> Result<Vec<RiskSweepRecord>> {
    if config.delta_grid.is_empty() {
        return Err(Error::Empty("delta grid"));
    }
    if config.modes.is_empty() {
        return Err(Error::Empty("modes"));
    }
    config.robust.validate()?;
    config.train.validate()?;
    let loss = TruncatedL1Loss::fit(data, config.robust.alpha_level)?;
    let truth = true_risk.evaluate(&loss)?;
    let mut needed: Vec<RobustificationMode> =
        config.modes.iter().flat_map(|m| m.nested().iter().copied()).collect();
    needed.sort();
    needed.dedup();

    let per_delta: Vec<Vec<RiskSweepRecord>> = config
        .delta_grid
        .par_iter()
        .map(|&delta| {
            let robust = RobustificationConfig { delta, ..config.robust.clone() };
            let outcomes: BTreeMap<RobustificationMode, _> = needed
                .iter()
                .map(|&m| Ok((m, run_dro_training(base_model, &loss, m, &robust, &config.train)?)))
                .collect::<Result<_>>()?;
            config
                .modes
                .iter()
                .map(|&mode| {
                    let (risk, converged) = if config.train.iterations == 0 {
                        (outcomes[&mode].risk, outcomes[&mode].converged)
                    } else {
                        let pools: Vec<&EvaluationPool> =
                            mode.nested().iter().map(|m| &outcomes[m].evaluation).collect();
                        let (_, risk, ok) =
                            EvaluationPool::risk_with(&pools, &loss, robust.norm, delta)?;
                        (risk, ok)
                    };
                    Ok(RiskSweepRecord {
                        delta,
                        mode,
                        robust_risk: risk,
                        true_risk: truth,
                        error: (risk - truth).abs(),
                        seed: robust.seed,
                        replications: config.train.eval_batch_size,
                        converged,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut records: Vec<RiskSweepRecord> = per_delta.into_iter().flatten().collect();
    records.sort_by(|a, b| a.mode.cmp(&b.mode).then(a.delta.total_cmp(&b.delta)));
    Ok(records)
}
