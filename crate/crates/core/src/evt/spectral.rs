//! Exact sampling from logistic spectral measures.
//!
//! With `Y_k = E_k^{-α} / Γ(1-α)` for i.i.d. `E_k ~ Exp(1)`, the vector `Y`
//! has unit means and `E max_k Y_k / x_k = (Σ_k x_k^{-1/α})^α`, so it is a
//! mark generator for the SL model. The spectral measure on the simplex is
//! the law of `Y / ‖Y‖_1` size-biased by `‖Y‖_1 = Σ_j Y_j`. Size-biasing by
//! `Y_j` alone replaces `E_j` by a `Gamma(1-α)` draw and leaves the others
//! untouched, so `H` is the uniform mixture over `j` of those laws. The ASL
//! case picks the pair `(b, j)` with probability `λ_{j,b} / d` and applies
//! the same construction inside subset `b`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use super::{AsymmetricLogistic, DependenceModel, SpectralSample, COMONOTONE_ALPHA, INDEPENDENT_ALPHA};
use crate::error::Result;
use crate::rng::open_unit;

/// `n` draws from the model's spectral measure on the simplex.
///
/// Mixtures draw a component per point, i.e. sample `Σ_c p_c H_c`.
pub fn sample_spectral<R: Rng + ?Sized>(
    rng: &mut R,
    model: &DependenceModel,
    n: usize,
) -> Result<Vec<SpectralSample>> {
    Ok(sample_spectral_log(rng, model, n)?
        .into_iter()
        .map(|lw| SpectralSample::new_unchecked(lw.iter().map(|l| l.exp()).collect()))
        .collect())
}

/// Like [`sample_spectral`] but returns `ln w` (with `-inf` for zero
/// coordinates).
pub fn sample_spectral_log<R: Rng + ?Sized>(
    rng: &mut R,
    model: &DependenceModel,
    n: usize,
) -> Result<Vec<Vec<f64>>> {
    model.validate()?;
    let dim = model.dim();
    Ok((0..n)
        .map(|_| {
            let mut lw = vec![f64::NEG_INFINITY; dim];
            draw_log(rng, model, &mut lw);
            lw
        })
        .collect())
}

/// Fill `out` with normalized log spectral coordinates of one draw.
pub(crate) fn draw_log<R: Rng + ?Sized>(rng: &mut R, model: &DependenceModel, out: &mut [f64]) {
    out.fill(f64::NEG_INFINITY);
    match model {
        DependenceModel::SymmetricLogistic { dim, alpha } => {
            let j = rng.random_range(0..*dim);
            let members: Vec<usize> = (0..*dim).collect();
            logistic_size_biased(rng, *alpha, &members, None, j, out);
        }
        DependenceModel::AsymmetricLogistic(m) => asl_log(rng, m, out),
        DependenceModel::Mixture { components } => {
            let idx = DependenceModel::pick_component(components, rng.random());
            draw_log(rng, &components[idx].model, out);
        }
    }
    normalize_log(out);
}

fn asl_log<R: Rng + ?Sized>(rng: &mut R, model: &AsymmetricLogistic, out: &mut [f64]) {
    // pick (b, j) with probability λ_{j,b} / d
    let target = rng.random::<f64>() * model.dim as f64;
    let mut acc = 0.0;
    let mut chosen = None;
    'outer: for (bi, s) in model.subsets.iter().enumerate() {
        for (pos, &w) in s.weights.iter().enumerate() {
            acc += w;
            if target < acc && w > 0.0 {
                chosen = Some((bi, pos));
                break 'outer;
            }
        }
    }
    let (bi, pos) = chosen.unwrap_or_else(|| last_positive(model));
    let s = &model.subsets[bi];
    logistic_size_biased(rng, s.alpha, &s.members, Some(&s.weights), pos, out);
}

fn last_positive(model: &AsymmetricLogistic) -> (usize, usize) {
    for (bi, s) in model.subsets.iter().enumerate().rev() {
        if let Some(pos) = s.weights.iter().rposition(|&w| w > 0.0) {
            return (bi, pos);
        }
    }
    unreachable!("validated ASL model has positive weights")
}

/// Unnormalized log marks of a logistic block, size-biased at `members[biased]`.
fn logistic_size_biased<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    members: &[usize],
    weights: Option<&[f64]>,
    biased: usize,
    out: &mut [f64],
) {
    let weight = |p: usize| weights.map_or(1.0, |w| w[p]);
    if members.len() == 1 || alpha >= INDEPENDENT_ALPHA {
        out[members[biased]] = 0.0;
        return;
    }
    for (p, &k) in members.iter().enumerate() {
        let w = weight(p);
        if w <= 0.0 {
            continue;
        }
        if alpha <= COMONOTONE_ALPHA {
            out[k] = w.ln();
            continue;
        }
        let log_e = if p == biased {
            log_gamma_small_shape(rng, 1.0 - alpha)
        } else {
            let e: f64 = Exp1.sample(rng);
            e.ln()
        };
        out[k] = w.ln() - alpha * log_e;
    }
}

/// `ln G` for `G ~ Gamma(a, 1)` with `0 < a < 1`, via `G = G' U^{1/a}`,
/// `G' ~ Gamma(a + 1, 1)`.
fn log_gamma_small_shape<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    let g = Gamma::new(shape + 1.0, 1.0).expect("shape in (1, 2)");
    let base: f64 = g.sample(rng);
    base.ln() + open_unit(rng).ln() / shape
}

pub(crate) fn normalize_log(v: &mut [f64]) {
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + v.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    for x in v.iter_mut() {
        *x -= lse;
    }
}
