use rayon::prelude::*;

use super::loss::Loss;
use crate::duals::{minimize_lambda, BracketPolicy};
use crate::error::{ensure_dim, Error, Result};
use crate::norm::Norm;

/// Row-major matrix `L_ij = ℓ(z_i) - λ ‖z_i - x_j‖` with adversary rows and
/// base columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl LossMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged loss matrix".into()));
        }
        Ok(Self { rows: rows.len(), cols, values: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }
}

fn check_points(points: &[Vec<f64>], what: &'static str) -> Result<usize> {
    let dim = points.first().ok_or(Error::Empty(what))?.len();
    for p in points {
        ensure_dim(dim, p.len())?;
    }
    Ok(dim)
}

pub fn build_loss_matrix(
    adversary: &[Vec<f64>],
    base: &[Vec<f64>],
    loss: &dyn Loss,
    lambda: f64,
    norm: Norm,
) -> Result<LossMatrix> {
    LossPool::new(adversary, base, loss, norm).map(|p| p.matrix(lambda))
}

/// `R = (1/n) Σ_j max_i L_ij`.
pub fn inner_objective(matrix: &LossMatrix) -> Result<f64> {
    if matrix.rows == 0 || matrix.cols == 0 {
        return Err(Error::Empty("loss matrix"));
    }
    let mut best = vec![f64::NEG_INFINITY; matrix.cols];
    for row in matrix.values.chunks_exact(matrix.cols) {
        for (b, v) in best.iter_mut().zip(row) {
            *b = b.max(*v);
        }
    }
    Ok(best.iter().sum::<f64>() / matrix.cols as f64)
}

/// Candidate losses and costs, reusable across values of `λ`.
#[derive(Debug, Clone)]
pub struct LossPool {
    losses: Vec<f64>,
    /// Row-major `candidates × columns`.
    costs: Vec<f64>,
    cols: usize,
}

impl LossPool {
    pub fn new(
        candidates: &[Vec<f64>],
        base: &[Vec<f64>],
        loss: &dyn Loss,
        norm: Norm,
    ) -> Result<Self> {
        let d = check_points(candidates, "adversary samples")?;
        ensure_dim(d, check_points(base, "base samples")?)?;
        let losses = candidates.iter().map(|z| loss.value(z)).collect();
        let costs = candidates
            .par_iter()
            .flat_map_iter(|z| base.iter().map(move |x| norm.distance(z, x)))
            .collect();
        Ok(Self { losses, costs, cols: base.len() })
    }

    pub fn matrix(&self, lambda: f64) -> LossMatrix {
        let values = self
            .costs
            .chunks_exact(self.cols)
            .zip(&self.losses)
            .flat_map(|(row, l)| row.iter().map(move |c| l - lambda * c))
            .collect();
        LossMatrix { rows: self.losses.len(), cols: self.cols, values }
    }

    /// For each column, the winning row at `λ` (ties to the lowest cost).
    fn argmax(&self, lambda: f64) -> Vec<usize> {
        let mut best = vec![(f64::NEG_INFINITY, f64::INFINITY, 0usize); self.cols];
        for (i, (row, l)) in self.costs.chunks_exact(self.cols).zip(&self.losses).enumerate() {
            for (b, c) in best.iter_mut().zip(row) {
                let v = l - lambda * c;
                if v > b.0 || (v == b.0 && *c < b.1) {
                    *b = (v, *c, i);
                }
            }
        }
        best.into_iter().map(|b| b.2).collect()
    }

    /// `R(λ)`.
    pub fn objective(&self, lambda: f64) -> f64 {
        let mut best = vec![f64::NEG_INFINITY; self.cols];
        for (row, l) in self.costs.chunks_exact(self.cols).zip(&self.losses) {
            for (b, c) in best.iter_mut().zip(row) {
                *b = b.max(l - lambda * c);
            }
        }
        best.iter().sum::<f64>() / self.cols as f64
    }

    /// Mean transport cost of the column winners: `-R'(λ)`.
    pub fn mean_winning_cost(&self, lambda: f64) -> f64 {
        let winners = self.argmax(lambda);
        winners.iter().enumerate().map(|(j, &i)| self.costs[i * self.cols + j]).sum::<f64>()
            / self.cols as f64
    }

    /// `(λ*, min_λ λδ + R(λ), converged)`.
    ///
    /// With `δ = 0` and a zero-cost candidate in every column the infimum is
    /// the `λ -> ∞` limit, attained at the largest per-column crossover.
    pub fn minimize(&self, delta: f64) -> (f64, f64, bool) {
        if delta == 0.0 {
            if let Some(exact) = self.zero_budget() {
                return exact;
            }
        }
        let m = minimize_lambda(|l| l * delta + self.objective(l), &BracketPolicy::for_delta(delta));
        (m.lambda, m.value, m.converged)
    }

    fn zero_budget(&self) -> Option<(f64, f64, bool)> {
        let mut lambda_star = 0.0f64;
        let mut total = 0.0;
        for j in 0..self.cols {
            let column = || self.costs.iter().skip(j).step_by(self.cols).zip(&self.losses);
            let stay = column()
                .filter(|(c, _)| **c == 0.0)
                .map(|(_, l)| *l)
                .fold(f64::NEG_INFINITY, f64::max);
            if stay == f64::NEG_INFINITY {
                return None;
            }
            for (c, l) in column().filter(|(c, _)| **c > 0.0) {
                lambda_star = lambda_star.max((l - stay) / c);
            }
            total += stay;
        }
        Some((lambda_star, total / self.cols as f64, true))
    }
}
