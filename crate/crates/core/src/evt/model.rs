use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on simplex sums (spectral samples, mixture probabilities).
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// Tolerance on the per-coordinate ASL weight constraint.
const ASL_WEIGHT_TOLERANCE: f64 = 1e-9;

/// One subset `b` of an asymmetric logistic model.
///
/// `members` are zero-based coordinates; `weights[j]` is the asymmetry weight
/// of coordinate `members[j]` in this subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AslSubset {
    pub members: Vec<usize>,
    pub alpha: f64,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymmetricLogistic {
    pub dim: usize,
    pub subsets: Vec<AslSubset>,
}

impl AsymmetricLogistic {
    pub fn new(dim: usize, subsets: Vec<AslSubset>) -> Result<Self> {
        let model = Self { dim, subsets };
        model.validate()?;
        Ok(model)
    }

    /// Every nonempty subset of `{0..dim}` with the same `alpha`, and
    /// per-coordinate weights taken from `weights[i]`, which lists coordinate
    /// `i`'s weights over the subsets containing it in enumeration order.
    pub fn power_set(dim: usize, alpha: f64, weights: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 || dim > 16 {
            return Err(Error::InvalidModel(format!(
                "power-set ASL supports 1..=16 dimensions, got {dim}"
            )));
        }
        if weights.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: weights.len() });
        }
        let per_coord = 1usize << (dim - 1);
        for w in weights {
            if w.len() != per_coord {
                return Err(Error::InvalidModel(format!(
                    "each coordinate needs {per_coord} weights, got {}",
                    w.len()
                )));
            }
        }
        let mut cursor = vec![0usize; dim];
        let mut subsets = Vec::with_capacity((1 << dim) - 1);
        for mask in 1usize..(1 << dim) {
            let members: Vec<usize> = (0..dim).filter(|i| mask & (1 << i) != 0).collect();
            let ws = members
                .iter()
                .map(|&i| {
                    let w = weights[i][cursor[i]];
                    cursor[i] += 1;
                    w
                })
                .collect();
            let subset_alpha = if members.len() == 1 { 1.0 } else { alpha };
            subsets.push(AslSubset { members, alpha: subset_alpha, weights: ws });
        }
        Self::new(dim, subsets)
    }

    /// Copy with every non-singleton subset's dependence parameter replaced.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let subsets = self
            .subsets
            .iter()
            .map(|s| AslSubset {
                alpha: if s.members.len() == 1 { s.alpha } else { alpha },
                ..s.clone()
            })
            .collect();
        Self::new(self.dim, subsets)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidModel("dimension must be positive".into()));
        }
        if self.subsets.is_empty() {
            return Err(Error::InvalidModel("ASL model needs at least one subset".into()));
        }
        let mut totals = vec![0.0; self.dim];
        for (idx, s) in self.subsets.iter().enumerate() {
            if s.members.is_empty() {
                return Err(Error::InvalidModel(format!("subset {idx} is empty")));
            }
            if s.members.len() != s.weights.len() {
                return Err(Error::InvalidModel(format!(
                    "subset {idx}: {} members but {} weights",
                    s.members.len(),
                    s.weights.len()
                )));
            }
            if !(s.alpha > 0.0 && s.alpha <= 1.0) {
                return Err(Error::InvalidModel(format!(
                    "subset {idx}: alpha {} outside (0, 1]",
                    s.alpha
                )));
            }
            let mut seen = vec![false; self.dim];
            for (&m, &w) in s.members.iter().zip(&s.weights) {
                if m >= self.dim {
                    return Err(Error::InvalidModel(format!(
                        "subset {idx}: coordinate {m} out of range for dimension {}",
                        self.dim
                    )));
                }
                if std::mem::replace(&mut seen[m], true) {
                    return Err(Error::InvalidModel(format!(
                        "subset {idx}: coordinate {m} repeated"
                    )));
                }
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(Error::InvalidModel(format!(
                        "subset {idx}: weight {w} is not a nonnegative number"
                    )));
                }
                totals[m] += w;
            }
        }
        for (i, t) in totals.iter().enumerate() {
            if (t - 1.0).abs() > ASL_WEIGHT_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "weights of coordinate {i} sum to {t}, expected 1"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub probability: f64,
    pub model: DependenceModel,
}

/// Parametric spectral dependence model.
///
/// JSON form: `{"variant": "sl", "dim": 2, "alpha": 0.5}`,
/// `{"variant": "asl", "dim": 2, "subsets": [{"members": [0, 1], "alpha": 0.3,
/// "weights": [0.4, 0.6]}, ...]}` or
/// `{"variant": "mixture", "components": [{"probability": 0.1, "model": {...}}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", deny_unknown_fields)]
pub enum DependenceModel {
    #[serde(rename = "sl")]
    SymmetricLogistic { dim: usize, alpha: f64 },
    #[serde(rename = "asl")]
    AsymmetricLogistic(AsymmetricLogistic),
    #[serde(rename = "mixture")]
    Mixture { components: Vec<MixtureComponent> },
}

impl DependenceModel {
    pub fn symmetric(dim: usize, alpha: f64) -> Result<Self> {
        let m = DependenceModel::SymmetricLogistic { dim, alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn asymmetric(model: AsymmetricLogistic) -> Result<Self> {
        model.validate()?;
        Ok(DependenceModel::AsymmetricLogistic(model))
    }

    pub fn mixture(components: Vec<MixtureComponent>) -> Result<Self> {
        let m = DependenceModel::Mixture { components };
        m.validate()?;
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: DependenceModel = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn dim(&self) -> usize {
        match self {
            DependenceModel::SymmetricLogistic { dim, .. } => *dim,
            DependenceModel::AsymmetricLogistic(m) => m.dim,
            DependenceModel::Mixture { components } => {
                components.first().map(|c| c.model.dim()).unwrap_or(0)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DependenceModel::SymmetricLogistic { dim, alpha } => {
                if *dim == 0 {
                    return Err(Error::InvalidModel("dimension must be positive".into()));
                }
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return Err(Error::InvalidModel(format!("SL alpha {alpha} outside (0, 1]")));
                }
                Ok(())
            }
            DependenceModel::AsymmetricLogistic(m) => m.validate(),
            DependenceModel::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidModel("mixture has no components".into()));
                }
                let dim = components[0].model.dim();
                let mut total = 0.0;
                for c in components {
                    c.model.validate()?;
                    if c.model.dim() != dim {
                        return Err(Error::InvalidModel(format!(
                            "mixture components disagree on dimension ({} vs {dim})",
                            c.model.dim()
                        )));
                    }
                    if !(c.probability >= 0.0 && c.probability.is_finite()) {
                        return Err(Error::InvalidModel(format!(
                            "mixture probability {} is not nonnegative",
                            c.probability
                        )));
                    }
                    total += c.probability;
                }
                if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
                    return Err(Error::InvalidModel(format!(
                        "mixture probabilities sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Exponent function `V(x) = -ln P(M <= x)`.
    ///
    /// For a mixture this is `-ln Σ_c p_c exp(-V_c(x))`, the exponent of the
    /// sample-level mixture drawn by [`crate::evt::sample_max_stable`].
    pub fn exponent(&self, x: &[f64]) -> Result<f64> {
        crate::error::ensure_dim(self.dim(), x.len())?;
        match self {
            DependenceModel::SymmetricLogistic { alpha, .. } => super::sl_exponent(x, *alpha),
            DependenceModel::AsymmetricLogistic(m) => super::asl_exponent(x, m),
            DependenceModel::Mixture { .. } => Ok(-self.cdf(x)?.ln()),
        }
    }

    /// `P(M <= x)`.
    pub fn cdf(&self, x: &[f64]) -> Result<f64> {
        match self {
            DependenceModel::Mixture { components } => {
                let mut total = 0.0;
                for c in components {
                    total += c.probability * c.model.cdf(x)?;
                }
                Ok(total)
            }
            _ => Ok((-self.exponent(x)?).exp()),
        }
    }

    /// Mixture components, or the model itself as a single component.
    pub fn components(&self) -> Vec<(f64, &DependenceModel)> {
        match self {
            DependenceModel::Mixture { components } => {
                components.iter().map(|c| (c.probability, &c.model)).collect()
            }
            other => vec![(1.0, other)],
        }
    }

    /// Index of the mixture component selected by a uniform draw `u`.
    pub(crate) fn pick_component(components: &[MixtureComponent], u: f64) -> usize {
        let mut acc = 0.0;
        for (i, c) in components.iter().enumerate() {
            acc += c.probability;
            if u < acc {
                return i;
            }
        }
        components
            .iter()
            .rposition(|c| c.probability > 0.0)
            .unwrap_or(components.len() - 1)
    }
}

/// A point on the unit simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSample(Vec<f64>);

impl SpectralSample {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Empty("spectral sample"));
        }
        if w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(Error::Domain("spectral coordinates must be nonnegative".into()));
        }
        let s: f64 = w.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOLERANCE * w.len() as f64 {
            return Err(Error::Domain(format!("spectral coordinates sum to {s}, expected 1")));
        }
        Ok(Self(w))
    }

    pub(crate) fn new_unchecked(w: Vec<f64>) -> Self {
        Self(w)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for SpectralSample {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A max-stable draw with unit Fréchet margins (all entries positive).
#[derive(Debug, Clone, PartialEq)]
pub struct MaxStableSample(Vec<f64>);

impl MaxStableSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("max-stable sample"));
        }
        if values.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::Domain("max-stable entries must be positive".into()));
        }
        Ok(Self(values))
    }

    pub(crate) fn new_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for MaxStableSample {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}
