use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::evt::{mark_scale, DependenceModel, MaxStableSample, SpectralSample};
use crate::rng::derived;

/// Finite truncation of one point-process realization.
///
/// Atoms are stored flat: `arrivals[n]` with mark `marks[n*dim..(n+1)*dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    dim: usize,
    arrivals: Vec<f64>,
    marks: Vec<f64>,
}

impl PointConfiguration {
    /// Arrivals must be positive and strictly increasing, marks nonnegative.
    pub fn new(dim: usize, arrivals: Vec<f64>, marks: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("configuration dimension must be positive".into()));
        }
        if arrivals.is_empty() {
            return Err(Error::Empty("configuration atoms"));
        }
        ensure_dim(arrivals.len() * dim, marks.len())?;
        if !(arrivals[0] > 0.0) || arrivals.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("arrivals must be positive and finite".into()));
        }
        if arrivals.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("arrivals must be strictly increasing".into()));
        }
        if marks.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
            return Err(Error::InvalidInput("marks must be nonnegative and finite".into()));
        }
        Ok(Self { dim, arrivals, marks })
    }

    pub fn from_atoms(dim: usize, atoms: &[(f64, Vec<f64>)]) -> Result<Self> {
        let mut arrivals = Vec::with_capacity(atoms.len());
        let mut marks = Vec::with_capacity(atoms.len() * dim);
        for (a, y) in atoms {
            ensure_dim(dim, y.len())?;
            arrivals.push(*a);
            marks.extend_from_slice(y);
        }
        Self::new(dim, arrivals, marks)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn mark(&self, n: usize) -> &[f64] {
        &self.marks[n * self.dim..(n + 1) * self.dim]
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        self.arrivals.iter().copied().zip(self.marks.chunks_exact(self.dim))
    }

    /// Atom positions `x_n = y_n / a_n` in sample space.
    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.atoms().map(|(a, y)| y.iter().map(|v| v / a).collect())
    }

    /// Copy with an extra atom appended (its arrival must exceed the last).
    pub fn with_atom(&self, arrival: f64, mark: &[f64]) -> Result<Self> {
        let mut arrivals = self.arrivals.clone();
        let mut marks = self.marks.clone();
        arrivals.push(arrival);
        marks.extend_from_slice(mark);
        Self::new(self.dim, arrivals, marks)
    }
}

/// Truncation controls for [`sample_configuration`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    /// Maximum number of atoms `N`.
    pub atoms: usize,
    /// Stop early once `1 / a_n < cutoff · ‖M‖_∞`.
    pub relative_cutoff: Option<f64>,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { atoms: 200, relative_cutoff: Some(1e-6) }
    }
}

impl Truncation {
    pub fn atoms(atoms: usize) -> Self {
        Self { atoms, ..Self::default() }
    }

    pub fn exact(atoms: usize) -> Self {
        Self { atoms, relative_cutoff: None }
    }
}

/// One truncated realization: arrivals are cumulative unit exponentials and
/// marks are `d · w` with `w` drawn from the model's spectral measure.
///
/// A mixture model picks one component for the whole configuration, so that
/// [`max_stable_from_configuration`] reproduces the sample-level mixture.
pub fn sample_configuration<R: Rng + ?Sized>(
    rng: &mut R,
    model: &DependenceModel,
    truncation: Truncation,
) -> Result<PointConfiguration> {
    model.validate()?;
    if truncation.atoms == 0 {
        return Err(Error::InvalidInput("truncation needs at least one atom".into()));
    }
    let component = match model {
        DependenceModel::Mixture { components } => {
            &components[DependenceModel::pick_component(components, rng.random())].model
        }
        other => other,
    };
    let dim = model.dim();
    let scale = mark_scale(dim);
    let mut arrivals = Vec::with_capacity(truncation.atoms);
    let mut marks = Vec::with_capacity(truncation.atoms * dim);
    let mut lw = vec![0.0; dim];
    let mut sup = 0.0f64;
    let mut a = 0.0;
    for _ in 0..truncation.atoms {
        let e: f64 = Exp1.sample(rng);
        a += e;
        if let Some(cut) = truncation.relative_cutoff {
            if !arrivals.is_empty() && 1.0 / a < cut * sup {
                break;
            }
        }
        crate::evt::draw_spectral_log(rng, component, &mut lw);
        arrivals.push(a);
        for &l in &lw {
            let y = scale * l.exp();
            sup = sup.max(y / a);
            marks.push(y);
        }
    }
    Ok(PointConfiguration { dim, arrivals, marks })
}

/// `count` configurations; replication `r` uses the stream `(seed, r)`, so
/// the result does not depend on evaluation order.
pub fn sample_configurations(
    seed: u64,
    model: &DependenceModel,
    count: usize,
    truncation: Truncation,
) -> Result<Vec<PointConfiguration>> {
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|r| sample_configuration(&mut derived(seed, &[r as u64]), model, truncation))
        .collect()
}

/// Componentwise `max_n y_n / a_n`.
pub fn max_stable_from_configuration(cfg: &PointConfiguration) -> MaxStableSample {
    let mut m = vec![0.0f64; cfg.dim];
    for (a, y) in cfg.atoms() {
        for (mk, yk) in m.iter_mut().zip(y) {
            *mk = mk.max(yk / a);
        }
    }
    MaxStableSample::new_unchecked(m)
}

/// Expected number of atoms beyond the truncation that could still raise
/// some coordinate of `M`, assuming marks bounded by `max(d, max observed
/// mark)`: `Σ_k (b / M_k - a_N)^+`. A Markov bound on the probability that
/// the truncation changes `M`.
pub fn truncation_tail_bound(cfg: &PointConfiguration) -> f64 {
    let bound = cfg.marks.iter().cloned().fold(mark_scale(cfg.dim), f64::max);
    let last = *cfg.arrivals.last().expect("configuration is nonempty");
    let m = max_stable_from_configuration(cfg);
    m.iter()
        .map(|&mk| if mk > 0.0 { (bound / mk - last).max(0.0) } else { f64::INFINITY })
        .sum()
}

/// `T(x) = (1 / ‖x‖_1, x / ‖x‖_1)`.
pub fn radial_spectral_transform(x: &[f64]) -> Result<(f64, SpectralSample)> {
    if x.is_empty() {
        return Err(Error::Empty("radial-spectral argument"));
    }
    if x.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Domain("radial-spectral transform needs nonnegative finite input".into()));
    }
    let total: f64 = x.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Domain("radial-spectral transform of the zero vector".into()));
    }
    let w = x.iter().map(|v| v / total).collect();
    Ok((1.0 / total, SpectralSample::new_unchecked(w)))
}

/// Inverse of [`radial_spectral_transform`]: `x = w / r`.
pub fn inverse_radial_spectral(r: f64, w: &[f64]) -> Vec<f64> {
    w.iter().map(|v| v / r).collect()
}

/// `V_x^(n) = max_k y_k^(n) x_k` for every atom.
pub fn v_statistic(cfg: &PointConfiguration, x: &[f64]) -> Result<Vec<f64>> {
    ensure_dim(cfg.dim, x.len())?;
    if x.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("V statistic needs positive thresholds".into()));
    }
    Ok(cfg
        .marks
        .chunks_exact(cfg.dim)
        .map(|y| y.iter().zip(x).fold(0.0f64, |m, (yk, xk)| m.max(yk * xk)))
        .collect())
}
