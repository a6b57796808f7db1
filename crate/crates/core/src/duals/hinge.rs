use super::config::{check_delta, DualSolveResult};
use super::lambda::{minimize_lambda, BracketPolicy};
use crate::error::Result;

/// Sorted nonnegative gaps `g_i` supporting fast evaluation of
/// `λδ + (1/R) Σ_i (1 - λ g_i)^+`.
///
/// The objective is convex and piecewise linear with breakpoints at `1/g_i`.
#[derive(Debug, Clone)]
pub struct HingeProfile {
    zeros: usize,
    positive: Vec<f64>,
    prefix: Vec<f64>,
    infinite: usize,
    normalizer: f64,
}

impl HingeProfile {
    /// `gaps` are pooled across replications; `replications` is `R`.
    pub fn new(gaps: impl IntoIterator<Item = f64>, replications: usize) -> Self {
        let mut zeros = 0;
        let mut infinite = 0;
        let mut positive = Vec::new();
        for g in gaps {
            debug_assert!(g >= 0.0, "gaps are nonnegative");
            if g <= 0.0 {
                zeros += 1;
            } else if g.is_infinite() {
                infinite += 1;
            } else {
                positive.push(g);
            }
        }
        positive.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(positive.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for g in &positive {
            acc += g;
            prefix.push(acc);
        }
        Self { zeros, positive, prefix, infinite, normalizer: replications as f64 }
    }

    /// `(1/R) Σ_i (1 - λ g_i)^+`.
    pub fn hinge_mean(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return (self.zeros + self.positive.len() + self.infinite) as f64 / self.normalizer;
        }
        let cut = 1.0 / lambda;
        let k = self.positive.partition_point(|&g| g < cut);
        (self.zeros as f64 + (k as f64 - lambda * self.prefix[k]).max(0.0)) / self.normalizer
    }

    pub fn objective(&self, lambda: f64, delta: f64) -> f64 {
        lambda * delta + self.hinge_mean(lambda)
    }

    /// Limit of the hinge mean as `λ -> ∞`.
    pub fn zero_fraction(&self) -> f64 {
        self.zeros as f64 / self.normalizer
    }

    pub fn smallest_positive(&self) -> Option<f64> {
        self.positive.first().copied()
    }

    /// Breakpoints `1/g_i` of the piecewise-linear objective.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.positive.iter().map(|g| 1.0 / g)
    }
}

/// Minimize `λδ + hinge_mean(λ)`; `robust_value` is set to the objective.
///
/// At `δ = 0` the infimum is the `λ -> ∞` limit, attained exactly at
/// `λ = 1 / min g` over positive finite gaps.
pub(crate) fn solve(profile: &HingeProfile, delta: f64) -> Result<DualSolveResult> {
    check_delta(delta)?;
    if delta == 0.0 {
        let lambda_star = match profile.smallest_positive() {
            Some(g) => 1.0 / g,
            None if profile.infinite > 0 => 1.0,
            None => 0.0,
        };
        let objective = profile.zero_fraction();
        return Ok(DualSolveResult {
            lambda_star,
            objective,
            robust_value: objective,
            bracket: (0.0, lambda_star),
            iterations: 0,
            converged: true,
        });
    }
    let m = minimize_lambda(|l| profile.objective(l, delta), &BracketPolicy::for_delta(delta));
    Ok(DualSolveResult {
        lambda_star: m.lambda,
        objective: m.value,
        robust_value: m.value,
        bracket: m.bracket,
        iterations: m.iterations,
        converged: m.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let gaps = [0.0, 0.3, 1.2, 0.05, f64::INFINITY, 2.0];
        let p = HingeProfile::new(gaps, 4);
        for &l in &[0.0, 0.1, 0.5, 1.0, 3.3, 20.0, 1e6] {
            let direct: f64 = gaps
                .iter()
                .map(|&g| if l == 0.0 { 1.0 } else { (1.0 - l * g).max(0.0) })
                .sum::<f64>()
                / 4.0;
            assert!((p.hinge_mean(l) - direct).abs() < 1e-14, "λ={l}");
        }
        assert_eq!(p.zero_fraction(), 0.25);
    }
}
