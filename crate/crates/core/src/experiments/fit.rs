//! Moment fits of logistic dependence parameters through the extremal
//! coefficient `θ = V(1, …, 1)`.
//!
//! For unit-Fréchet margins `1 / max_k X_k` is exponential with rate `θ`, so
//! `θ̂ = 1 / mean(1 / max_k X_k)`.

use crate::error::{Error, Result};
use crate::evt::{AsymmetricLogistic, DependenceModel, COMONOTONE_ALPHA};

pub fn extremal_coefficient(samples: &[Vec<f64>]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    let mut total = 0.0;
    for x in samples {
        let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(m > 0.0) {
            return Err(Error::Domain("samples must have a positive coordinate".into()));
        }
        total += 1.0 / m;
    }
    Ok(samples.len() as f64 / total)
}

/// Symmetric logistic with `α̂ = ln θ̂ / ln d`, clamped to the valid range.
pub fn fit_symmetric_logistic(samples: &[Vec<f64>]) -> Result<DependenceModel> {
    let dim = samples.first().ok_or(Error::Empty("samples"))?.len();
    if dim < 2 {
        return DependenceModel::symmetric(dim.max(1), 1.0);
    }
    let theta = extremal_coefficient(samples)?;
    let alpha = (theta.ln() / (dim as f64).ln()).clamp(COMONOTONE_ALPHA, 1.0);
    DependenceModel::symmetric(dim, alpha)
}

/// Keeps the asymmetry weights of `template` and picks the common `α` whose
/// extremal coefficient matches the sample by bisection (`θ` is increasing
/// in `α`).
pub fn fit_asymmetric_logistic(
    samples: &[Vec<f64>],
    template: &AsymmetricLogistic,
) -> Result<DependenceModel> {
    let target = extremal_coefficient(samples)?;
    let ones = vec![1.0; template.dim];
    let theta_at = |alpha: f64| -> Result<f64> {
        DependenceModel::asymmetric(template.with_alpha(alpha)?)?.exponent(&ones)
    };
    let (mut lo, mut hi) = (COMONOTONE_ALPHA, 1.0);
    if target <= theta_at(lo)? {
        hi = lo;
    } else if target >= theta_at(hi)? {
        lo = hi;
    }
    for _ in 0..100 {
        if hi - lo < 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if theta_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    DependenceModel::asymmetric(template.with_alpha(0.5 * (lo + hi))?)
}
