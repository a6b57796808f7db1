use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::{
    sample_max_stable_labeled, AsymmetricLogistic, DependenceModel, MaxStableSample,
    MixtureComponent,
};
use crate::rng::seeded;

/// Two-component dependence mixture: a rare strongly dependent component
/// and a common weakly dependent one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub high: DependenceModel,
    pub low: DependenceModel,
    /// Probability of the strongly dependent component.
    pub high_probability: f64,
}

pub const HIGH_DEPENDENCE_ALPHA: f64 = 0.1;
pub const LOW_DEPENDENCE_ALPHA: f64 = 0.9;
pub const HIGH_DEPENDENCE_PROBABILITY: f64 = 0.1;

impl MixtureSpec {
    /// Symmetric logistic components with `α = 0.1` (probability 0.1) and
    /// `α = 0.9`.
    pub fn symmetric(dim: usize) -> Result<Self> {
        Ok(Self {
            high: DependenceModel::symmetric(dim, HIGH_DEPENDENCE_ALPHA)?,
            low: DependenceModel::symmetric(dim, LOW_DEPENDENCE_ALPHA)?,
            high_probability: HIGH_DEPENDENCE_PROBABILITY,
        })
    }

    /// Power-set asymmetric logistic components sharing one random
    /// asymmetry point drawn from `seed`.
    pub fn asymmetric(dim: usize, seed: u64) -> Result<Self> {
        let weights = random_asymmetry_weights(&mut seeded(seed), dim)?;
        let template = AsymmetricLogistic::power_set(dim, HIGH_DEPENDENCE_ALPHA, &weights)?;
        Ok(Self {
            high: DependenceModel::asymmetric(template.clone())?,
            low: DependenceModel::asymmetric(template.with_alpha(LOW_DEPENDENCE_ALPHA)?)?,
            high_probability: HIGH_DEPENDENCE_PROBABILITY,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.to_model().map(|_| ())
    }

    pub fn dim(&self) -> usize {
        self.high.dim()
    }

    pub fn to_model(&self) -> Result<DependenceModel> {
        if self.high.dim() != self.low.dim() {
            return Err(Error::DimensionMismatch { expected: self.high.dim(), got: self.low.dim() });
        }
        DependenceModel::mixture(vec![
            MixtureComponent { probability: self.high_probability, model: self.high.clone() },
            MixtureComponent { probability: 1.0 - self.high_probability, model: self.low.clone() },
        ])
    }
}

/// Per-coordinate uniform points on the simplex over the `2^(d-1)` subsets
/// containing each coordinate.
pub fn random_asymmetry_weights<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<Vec<Vec<f64>>> {
    if dim == 0 || dim > 16 {
        return Err(Error::InvalidModel(format!("unsupported dimension {dim}")));
    }
    let k = 1usize << (dim - 1);
    Ok((0..dim)
        .map(|_| {
            let e: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = e.iter().sum();
            e.into_iter().map(|v| v / total).collect()
        })
        .collect())
}

/// `n` mixture samples and their component labels (0 = strongly dependent).
pub fn gen_mixture_dataset<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &MixtureSpec,
    n: usize,
) -> Result<(Vec<MaxStableSample>, Vec<usize>)> {
    let model = spec.to_model()?;
    sample_max_stable_labeled(rng, &model, n, spec.dim())
}
