//! One-dimensional dual programs for robustified extreme-value functionals.
//!
//! Each worst-case functional over a Wasserstein ball of point processes
//! reduces to a convex problem in the single multiplier `λ >= 0`:
//!
//! | functional | dual objective in `λ` |
//! |---|---|
//! | CDF at `1/x` | `1 - min_λ λδ + E[1 - λ min_n (a_n - V_x^(n))^+]^+` |
//! | `P(N(A) >= 1)` | `min_λ λδ + E(1 - λ min_n dist(X^(n), A))^+` |
//! | `E N(A)` | `min_λ λδ + E Σ_n (1 - λ dist(X^(n), A))^+` |
//! | CVaR | `δ/(1-α) + E[S | S > q_α]`, `S = Σ_n ‖X^(n)‖_∞` |
//!
//! The first three share the hinge structure handled by [`HingeProfile`].

mod cdf;
mod config;
mod cvar;
mod hinge;
mod lambda;
mod rare_set;

pub use cdf::{
    baseline_cdf, cdf_dual_objective, cdf_gaps, cdf_minimizer_value, robust_cdf,
};
pub use config::{DualSolveResult, RobustificationConfig};
pub use cvar::{
    baseline_cvar, cvar_inner_objective, cvar_inner_supremum, replication_statistic, robust_cvar,
    upper_quantile_index,
};
pub use hinge::HingeProfile;
pub use lambda::{minimize_lambda, BracketPolicy, LambdaMinimum};
pub use rare_set::{
    atom_distances, baseline_expected_count, baseline_rare_set_probability,
    expected_count_dual_objective, rare_set_dual_objective, robust_expected_count,
    robust_rare_set_probability, RareSet,
};
