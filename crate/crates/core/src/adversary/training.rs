use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{AdversaryFamily, BaseBatch, Noise, RobustificationMode};
use super::loss::Loss;
use super::matrix::LossPool;
use crate::duals::RobustificationConfig;
use crate::error::{Error, Result};
use crate::evt::DependenceModel;
use crate::norm::Norm;
use crate::rng::{derive_seed, derived};

const BATCH_STREAM: u64 = 0x6261_7463;
const NOISE_STREAM: u64 = 0x6e6f_6973;
const EVAL_STREAM: u64 = 0x6576_616c;

/// How the multiplier is updated after each ascent step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaUpdate {
    /// Minimize `λδ + R(λ)` exactly on the current batch.
    #[default]
    Exact,
    /// One projected descent step of size `lambda_step`.
    Gradient,
}

/// Optimizer settings for [`run_dro_training`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    /// Number of alternating max/min iterations `K`.
    pub iterations: usize,
    pub batch_size: usize,
    pub eval_batch_size: usize,
    pub components: usize,
    pub temperature: f64,
    pub theta_step: f64,
    pub theta_decay: f64,
    pub lambda_update: LambdaUpdate,
    pub lambda_step: f64,
    /// `ε` in the initial multiplier `1 / (δ + ε)`.
    pub lambda_epsilon: f64,
    pub fd_step: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 2000,
            batch_size: 256,
            eval_batch_size: 512,
            components: 8,
            temperature: 0.5,
            theta_step: 1e-2,
            theta_decay: 0.999,
            lambda_update: LambdaUpdate::Exact,
            lambda_step: 1e-2,
            lambda_epsilon: 1e-3,
            fd_step: 1e-4,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.batch_size == 0 || self.eval_batch_size == 0 || self.components == 0 {
            return Err(Error::InvalidInput("batch sizes and components must be positive".into()));
        }
        if !(positive(self.temperature)
            && positive(self.fd_step)
            && positive(self.lambda_epsilon)
            && self.theta_step >= 0.0
            && self.lambda_step >= 0.0
            && positive(self.theta_decay))
        {
            return Err(Error::InvalidInput("optimizer settings out of range".into()));
        }
        Ok(())
    }
}

/// Mutable state of the alternating scheme.
#[derive(Debug, Clone)]
pub struct TrainState {
    pub family: AdversaryFamily,
    pub lambda: f64,
    pub iteration: usize,
    /// Latest `λδ + R`.
    pub risk: f64,
    pub seed: u64,
}

/// One row of the training trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub lambda: f64,
    #[serde(rename = "R")]
    pub inner: f64,
    pub risk: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    pub accepted: bool,
    /// Set when the gradient was not finite and the step was skipped.
    pub flagged: bool,
    pub before: f64,
    pub after: f64,
    pub backtracks: usize,
}

/// Central differences `(f(θ + h e_i) - f(θ - h e_i)) / 2h`, evaluated in
/// parallel over coordinates.
pub fn central_difference_gradient(
    objective: &(dyn Fn(&[f64]) -> f64 + Sync),
    theta: &[f64],
    h: f64,
) -> Vec<f64> {
    (0..theta.len())
        .into_par_iter()
        .map(|i| {
            let mut t = theta.to_vec();
            t[i] = theta[i] + h;
            let up = objective(&t);
            t[i] = theta[i] - h;
            let down = objective(&t);
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// One ascent step along the finite-difference gradient, halving the step
/// until the objective does not drop.
pub fn ascent_step(
    theta: &mut [f64],
    objective: &(dyn Fn(&[f64]) -> f64 + Sync),
    step_size: f64,
    h: f64,
) -> StepReport {
    let before = objective(theta);
    let mut report = StepReport { before, after: before, ..StepReport::default() };
    if step_size == 0.0 || theta.is_empty() {
        return report;
    }
    let grad = central_difference_gradient(objective, theta, h);
    if !before.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        report.flagged = true;
        return report;
    }
    let tolerance = 1e-12 * (1.0 + before.abs());
    let mut step = step_size;
    let mut candidate = theta.to_vec();
    for attempt in 0..=8 {
        for ((c, t), g) in candidate.iter_mut().zip(theta.iter()).zip(&grad) {
            *c = t + step * g;
        }
        let after = objective(&candidate);
        if after.is_finite() && after >= before - tolerance {
            theta.copy_from_slice(&candidate);
            report.accepted = true;
            report.after = after;
            report.backtracks = attempt;
            return report;
        }
        step *= 0.5;
    }
    report.backtracks = 9;
    report
}

/// Candidates are the adversary samples plus the base points themselves, so
/// every column can stay put and `λδ + R(λ)` is bounded below.
fn adversary_pool(
    family: &AdversaryFamily,
    batch: &BaseBatch,
    noise: &Noise,
    loss: &dyn Loss,
    norm: Norm,
) -> Result<LossPool> {
    let mut candidates = family.samples(batch, noise);
    candidates.extend_from_slice(batch.samples());
    LossPool::new(&candidates, batch.samples(), loss, norm)
}

/// Ascent on `θ ↦ R_λ(θ)` with the batch and noise held fixed.
pub fn maximization_step(
    state: &mut TrainState,
    batch: &BaseBatch,
    noise: &Noise,
    loss: &dyn Loss,
    norm: Norm,
    step_size: f64,
    fd_step: f64,
) -> StepReport {
    let lambda = state.lambda;
    let family = state.family.clone();
    let objective = move |theta: &[f64]| -> f64 {
        match adversary_pool(&family.with_theta(theta), batch, noise, loss, norm) {
            Ok(pool) => pool.objective(lambda),
            Err(_) => f64::NAN,
        }
    };
    ascent_step(&mut state.family.theta, &objective, step_size, fd_step)
}

/// `max(0, λ - η (δ - c̄))` where `c̄ = -R'(λ)` is the mean winning cost.
pub fn lambda_descent_step(lambda: f64, delta: f64, mean_winning_cost: f64, step_size: f64) -> f64 {
    (lambda - step_size * (delta - mean_winning_cost)).max(0.0)
}

/// Projected descent on `λ ↦ λδ + R(λ)`; returns the new multiplier.
pub fn minimization_step(
    state: &mut TrainState,
    batch: &BaseBatch,
    noise: &Noise,
    loss: &dyn Loss,
    norm: Norm,
    delta: f64,
    step_size: f64,
) -> Result<f64> {
    let pool = adversary_pool(&state.family, batch, noise, loss, norm)?;
    state.lambda = lambda_descent_step(state.lambda, delta, pool.mean_winning_cost(state.lambda), step_size);
    Ok(state.lambda)
}

/// Base and adversary samples on the shared evaluation batch.
#[derive(Debug, Clone)]
pub struct EvaluationPool {
    pub base: Vec<Vec<f64>>,
    pub adversary: Vec<Vec<f64>>,
}

impl EvaluationPool {
    /// `(λ*, min_λ λδ + R(λ), converged)` with candidates drawn from every
    /// pool in `pools` plus the base points themselves.
    pub fn risk_with(
        pools: &[&EvaluationPool],
        loss: &dyn Loss,
        norm: Norm,
        delta: f64,
    ) -> Result<(f64, f64, bool)> {
        let first = pools.first().ok_or(Error::Empty("evaluation pools"))?;
        let mut candidates = first.base.clone();
        for p in pools {
            if p.base != first.base {
                return Err(Error::InvalidInput("evaluation pools use different base batches".into()));
            }
            candidates.extend_from_slice(&p.adversary);
        }
        Ok(LossPool::new(&candidates, &first.base, loss, norm)?.minimize(delta))
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub mode: RobustificationMode,
    /// Final adversarial risk `λ*δ + R(λ*)`.
    pub risk: f64,
    pub lambda_star: f64,
    /// Mean loss of the base evaluation samples.
    pub baseline_risk: f64,
    pub converged: bool,
    /// Number of ascent steps skipped for a non-finite gradient.
    pub flagged_steps: usize,
    pub family: AdversaryFamily,
    pub trace: Vec<TraceRow>,
    pub evaluation: EvaluationPool,
}

/// Alternate `K` ascent steps on the adversary with descent steps on `λ`.
///
/// Iteration `k` draws a fresh base batch and noise from streams derived
/// from `(seed, k)` that do not depend on the mode, so runs in different
/// modes see matched samples. The final risk minimizes `λδ + R(λ)` exactly
/// over an evaluation batch; with `K = 0` it is `λ_init δ` plus the mean base
/// loss (every point stays put).
pub fn run_dro_training(
    base_model: &DependenceModel,
    loss: &dyn Loss,
    mode: RobustificationMode,
    config: &RobustificationConfig,
    train: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    train.validate()?;
    let delta = config.delta;
    let dim = base_model.dim();
    let family = AdversaryFamily::new(base_model.clone(), mode, train.components, train.temperature)?;
    let lambda_init = 1.0 / (delta + train.lambda_epsilon);
    let mut state =
        TrainState { family, lambda: lambda_init, iteration: 0, risk: f64::NAN, seed: config.seed };
    let mut trace = Vec::with_capacity(train.iterations);
    let mut flagged_steps = 0;

    for k in 0..train.iterations {
        let tag = k as u64;
        let batch = BaseBatch::sample(
            derive_seed(config.seed, &[BATCH_STREAM, tag]),
            base_model,
            train.batch_size,
            config.truncation,
        )?;
        let noise = Noise::sample(
            &mut derived(config.seed, &[NOISE_STREAM, tag]),
            batch.len(),
            train.components,
            dim,
        );
        let step = train.theta_step * train.theta_decay.powi(k as i32);
        let report =
            maximization_step(&mut state, &batch, &noise, loss, config.norm, step, train.fd_step);
        if report.flagged {
            flagged_steps += 1;
        }
        let inner = match train.lambda_update {
            LambdaUpdate::Gradient => {
                minimization_step(&mut state, &batch, &noise, loss, config.norm, delta, train.lambda_step)?;
                adversary_pool(&state.family, &batch, &noise, loss, config.norm)?.objective(state.lambda)
            }
            LambdaUpdate::Exact => {
                let pool = adversary_pool(&state.family, &batch, &noise, loss, config.norm)?;
                let (lambda, _, _) = pool.minimize(delta);
                state.lambda = lambda;
                pool.objective(lambda)
            }
        };
        state.iteration = k + 1;
        state.risk = state.lambda * delta + inner;
        trace.push(TraceRow { k, lambda: state.lambda, inner, risk: state.risk });
    }

    let eval_batch = BaseBatch::sample(
        derive_seed(config.seed, &[EVAL_STREAM]),
        base_model,
        train.eval_batch_size,
        config.truncation,
    )?;
    let eval_noise =
        Noise::sample(&mut derived(config.seed, &[EVAL_STREAM, 1]), eval_batch.len(), train.components, dim);
    let evaluation = EvaluationPool {
        base: eval_batch.samples().to_vec(),
        adversary: state.family.samples(&eval_batch, &eval_noise),
    };
    let baseline_risk =
        evaluation.base.iter().map(|x| loss.value(x)).sum::<f64>() / evaluation.base.len() as f64;
    let (lambda_star, risk, converged) = if train.iterations == 0 {
        (lambda_init, lambda_init * delta + baseline_risk, true)
    } else {
        EvaluationPool::risk_with(&[&evaluation], loss, config.norm, delta)?
    };
    Ok(TrainOutcome {
        mode,
        risk,
        lambda_star,
        baseline_risk,
        converged,
        flagged_steps,
        family: state.family,
        trace,
        evaluation,
    })
}
