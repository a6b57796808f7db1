use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{
    scaled_log_positive_stable, AsymmetricLogistic, DependenceModel, MaxStableSample,
    COMONOTONE_ALPHA,
};
use crate::error::{ensure_dim, Result};
use crate::rng::open_unit;

/// Inverse unit-Fréchet CDF: `x = -1 / ln u`.
pub fn unit_frechet_from_uniform(u: f64) -> f64 {
    -1.0 / u.ln()
}

pub fn sample_unit_frechet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| unit_frechet_from_uniform(open_unit(rng))).collect()
}

/// `n` independent max-stable vectors with unit Fréchet margins.
///
/// SL and ASL use exact positive-stable mixing; mixtures pick a component per
/// sample.
pub fn sample_max_stable<R: Rng + ?Sized>(
    rng: &mut R,
    model: &DependenceModel,
    n: usize,
    dim: usize,
) -> Result<Vec<MaxStableSample>> {
    Ok(sample_max_stable_labeled(rng, model, n, dim)?.0)
}

/// As [`sample_max_stable`], also returning the mixture component of each
/// draw (always 0 for non-mixtures).
pub fn sample_max_stable_labeled<R: Rng + ?Sized>(
    rng: &mut R,
    model: &DependenceModel,
    n: usize,
    dim: usize,
) -> Result<(Vec<MaxStableSample>, Vec<usize>)> {
    model.validate()?;
    ensure_dim(model.dim(), dim)?;
    let mut samples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, label) = draw_one(rng, model);
        samples.push(MaxStableSample::new_unchecked(x));
        labels.push(label);
    }
    Ok((samples, labels))
}

fn draw_one<R: Rng + ?Sized>(rng: &mut R, model: &DependenceModel) -> (Vec<f64>, usize) {
    match model {
        DependenceModel::SymmetricLogistic { dim, alpha } => (sl_draw(rng, *dim, *alpha), 0),
        DependenceModel::AsymmetricLogistic(m) => (asl_draw(rng, m), 0),
        DependenceModel::Mixture { components } => {
            let idx = DependenceModel::pick_component(components, rng.random());
            (draw_one(rng, &components[idx].model).0, idx)
        }
    }
}

/// `Z_i = (S / W_i)^α`, `W_i ~ Exp(1)`.
fn sl_draw<R: Rng + ?Sized>(rng: &mut R, dim: usize, alpha: f64) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    sl_fill(rng, alpha, dim, |k, z| out[k] = z);
    out
}

fn sl_fill<R: Rng + ?Sized>(rng: &mut R, alpha: f64, count: usize, mut put: impl FnMut(usize, f64)) {
    let log_s = scaled_log_positive_stable(rng, alpha);
    for k in 0..count {
        let w: f64 = Exp1.sample(rng);
        let z = if alpha <= COMONOTONE_ALPHA { log_s.exp() } else { (log_s - alpha * w.ln()).exp() };
        put(k, z);
    }
}

/// `M_i = max_{b ∋ i} λ_{i,b} Z^{(b)}_i` with independent SL vectors per subset.
fn asl_draw<R: Rng + ?Sized>(rng: &mut R, model: &AsymmetricLogistic) -> Vec<f64> {
    let mut out = vec![0.0f64; model.dim];
    for s in &model.subsets {
        sl_fill(rng, s.alpha, s.members.len(), |j, z| {
            let i = s.members[j];
            out[i] = out[i].max(s.weights[j] * z);
        });
    }
    out
}
