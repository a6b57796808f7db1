use super::{AsymmetricLogistic, COMONOTONE_ALPHA, INDEPENDENT_ALPHA};
use crate::error::{Error, Result};

fn check_positive(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Empty("exponent argument"));
    }
    match x.iter().find(|v| !(**v > 0.0) || v.is_nan()) {
        Some(v) => Err(Error::Domain(format!("exponent needs positive coordinates, got {v}"))),
        None => Ok(()),
    }
}

/// Symmetric logistic exponent `V(x) = (Σ_k x_k^{-1/α})^α`.
///
/// Evaluated as `exp(α · logsumexp(-ln x_k / α))` so small `α` does not
/// overflow; `α = 1` and the comonotone limit are exact.
pub fn sl_exponent(x: &[f64], alpha: f64) -> Result<f64> {
    check_positive(x)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("SL alpha {alpha} outside (0, 1]")));
    }
    Ok(logistic_term(x.iter().map(|&xi| (1.0, xi)), alpha))
}

/// Asymmetric logistic exponent
/// `V(x) = Σ_b (Σ_{i∈b} (λ_{i,b} / x_i)^{1/α_b})^{α_b}`.
pub fn asl_exponent(x: &[f64], model: &AsymmetricLogistic) -> Result<f64> {
    check_positive(x)?;
    crate::error::ensure_dim(model.dim, x.len())?;
    model.validate()?;
    Ok(model
        .subsets
        .iter()
        .map(|s| {
            logistic_term(
                s.members.iter().zip(&s.weights).map(|(&i, &w)| (w, x[i])),
                s.alpha,
            )
        })
        .sum())
}

/// `(Σ (w_i / x_i)^{1/α})^α` over the `(w_i, x_i)` pairs with `w_i > 0`.
fn logistic_term(pairs: impl Iterator<Item = (f64, f64)> + Clone, alpha: f64) -> f64 {
    let active = pairs.filter(|(w, _)| *w > 0.0);
    if alpha >= INDEPENDENT_ALPHA {
        return active.map(|(w, x)| w / x).sum();
    }
    if alpha <= COMONOTONE_ALPHA {
        return active.map(|(w, x)| w / x).fold(0.0, f64::max);
    }
    let logs: Vec<f64> = active.map(|(w, x)| (w.ln() - x.ln()) / alpha).collect();
    if logs.is_empty() {
        return 0.0;
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    (alpha * lse).exp()
}
