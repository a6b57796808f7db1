//! Worst-case joint CDF.
//!
//! With `V_x^(n) = max_k y_k^(n) x_k`, the event `{V_x^(n) <= a^(n) ∀n}` is
//! `{M_k <= 1/x_k ∀k}` for the max-stable vector `M` built from the
//! configuration, so the functionals here concern the CDF evaluated at `1/x`.

use rayon::prelude::*;

use super::config::{check_delta, DualSolveResult};
use super::hinge::{solve, HingeProfile};
use crate::error::{Error, Result};
use crate::point_process::{v_statistic, PointConfiguration};

/// Per-replication gaps `g_r = min_n (a^(n) - V_x^(n))^+`.
pub fn cdf_gaps(configurations: &[PointConfiguration], x: &[f64]) -> Result<Vec<f64>> {
    if configurations.is_empty() {
        return Err(Error::Empty("configurations"));
    }
    configurations
        .par_iter()
        .map(|cfg| {
            let v = v_statistic(cfg, x)?;
            Ok(cfg
                .arrivals()
                .iter()
                .zip(&v)
                .map(|(a, v)| (a - v).max(0.0))
                .fold(f64::INFINITY, f64::min))
        })
        .collect()
}

/// `λδ + (1/R) Σ_r [1 - λ g_r]^+`.
pub fn cdf_dual_objective(
    lambda: f64,
    configurations: &[PointConfiguration],
    x: &[f64],
    delta: f64,
) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("lambda {lambda} must be >= 0")));
    }
    check_delta(delta)?;
    let gaps = cdf_gaps(configurations, x)?;
    Ok(HingeProfile::new(gaps, configurations.len()).objective(lambda, delta))
}

/// Empirical CDF at `1/x`: fraction of replications with every `V_x^(n) < a^(n)`.
pub fn baseline_cdf(configurations: &[PointConfiguration], x: &[f64]) -> Result<f64> {
    let gaps = cdf_gaps(configurations, x)?;
    Ok(gaps.iter().filter(|g| **g > 0.0).count() as f64 / gaps.len() as f64)
}

/// `1 - min_λ [λδ + E(1 - λ g)^+]`, the smallest CDF value at `1/x` over the
/// Wasserstein ball of radius `delta`.
pub fn robust_cdf(
    configurations: &[PointConfiguration],
    x: &[f64],
    delta: f64,
) -> Result<DualSolveResult> {
    let gaps = cdf_gaps(configurations, x)?;
    let mut result = solve(&HingeProfile::new(gaps, configurations.len()), delta)?;
    result.robust_value = (1.0 - result.objective).max(0.0);
    Ok(result)
}

/// Shifted-region representation `exp(-mean #{n : V_x^(n) > a^(n) - 1/λ*})`.
///
/// `lambda_star = 0` returns 0 (the region swallows everything in the
/// limit); `lambda_star = ∞` uses the unshifted region.
pub fn cdf_minimizer_value(
    configurations: &[PointConfiguration],
    x: &[f64],
    lambda_star: f64,
) -> Result<f64> {
    if !(lambda_star >= 0.0) {
        return Err(Error::Domain(format!("lambda {lambda_star} must be >= 0")));
    }
    if configurations.is_empty() {
        return Err(Error::Empty("configurations"));
    }
    if lambda_star == 0.0 {
        return Ok(0.0);
    }
    let shift = 1.0 / lambda_star;
    let counts: Vec<usize> = configurations
        .par_iter()
        .map(|cfg| {
            let v = v_statistic(cfg, x)?;
            Ok(cfg.arrivals().iter().zip(&v).filter(|(a, v)| **v > **a - shift).count())
        })
        .collect::<Result<_>>()?;
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    Ok((-mean).exp())
}
