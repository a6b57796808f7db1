//! Iterative min–max estimation of adversarial risk for arbitrary losses.
//!
//! The adversary is a parametric transform of the base model's spectral
//! marks. Training alternates a finite-difference ascent step on the
//! adversary parameters with a projected descent step on the multiplier
//! `λ`; the reported risk is `min_λ λδ + R(λ)` on a held-out evaluation
//! batch whose candidate pool also contains the base points themselves.

mod family;
mod loss;
mod matrix;
mod training;

pub use family::{AdversaryFamily, BaseBatch, Noise, RobustificationMode};
pub use loss::{Loss, NormLoss, TruncatedL1Loss};
pub use matrix::{build_loss_matrix, inner_objective, LossMatrix, LossPool};
pub use training::{
    ascent_step, central_difference_gradient, lambda_descent_step, maximization_step,
    minimization_step, run_dro_training, EvaluationPool, LambdaUpdate, StepReport, TraceRow, TrainConfig,
    TrainOutcome, TrainState,
};
