use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::{draw_spectral_log, mark_scale, normalize_log, DependenceModel, SpectralSample};
use crate::point_process::{max_stable_from_configuration, sample_configurations, PointConfiguration, Truncation};
use crate::rng::open_unit;

/// Leading atoms per configuration used to estimate the unit-margin rescaling.
const LEADING_ATOMS: usize = 16;
const PROJECTION_ROUNDS: usize = 30;

/// How far the adversary may move away from the base model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustificationMode {
    /// Arbitrary positive vectors: max-stable samples perturbed off the
    /// max-stable class by a multiplicative log-normal mixture.
    Unconstrained,
    /// Max-stable samples sharing the base arrivals with transformed
    /// spectral marks.
    EvtConstrained,
    /// As `EvtConstrained`, with spectral coordinate means held at `1/d`.
    EvtConstrainedUnitMargins,
}

impl RobustificationMode {
    pub const ALL: [RobustificationMode; 3] = [
        RobustificationMode::Unconstrained,
        RobustificationMode::EvtConstrained,
        RobustificationMode::EvtConstrainedUnitMargins,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RobustificationMode::Unconstrained => "unconstrained",
            RobustificationMode::EvtConstrained => "evt-constrained",
            RobustificationMode::EvtConstrainedUnitMargins => "evt-constrained-unit-margins",
        }
    }

    /// Modes whose adversary class this mode's class contains, innermost last.
    pub fn nested(self) -> &'static [RobustificationMode] {
        let i = self as usize;
        &Self::ALL[i..]
    }
}

impl fmt::Display for RobustificationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RobustificationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown robustification mode {s:?}")))
    }
}

/// Base configurations with their max-stable samples and log spectral marks.
#[derive(Debug, Clone)]
pub struct BaseBatch {
    configurations: Vec<PointConfiguration>,
    log_marks: Vec<Vec<f64>>,
    samples: Vec<Vec<f64>>,
}

impl BaseBatch {
    pub fn sample(
        seed: u64,
        model: &DependenceModel,
        count: usize,
        truncation: Truncation,
    ) -> Result<Self> {
        Ok(Self::from_configurations(sample_configurations(seed, model, count, truncation)?))
    }

    pub fn from_configurations(configurations: Vec<PointConfiguration>) -> Self {
        let log_marks = configurations
            .iter()
            .map(|cfg| {
                let scale = mark_scale(cfg.dim());
                cfg.atoms().flat_map(|(_, y)| y.iter().map(move |v| (v / scale).ln())).collect()
            })
            .collect();
        let samples =
            configurations.iter().map(|c| max_stable_from_configuration(c).into_vec()).collect();
        Self { configurations, log_marks, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn configurations(&self) -> &[PointConfiguration] {
        &self.configurations
    }
}

/// Common random numbers for one batch: Gumbel noise for the component
/// weights and standard normals for the unconstrained perturbation.
#[derive(Debug, Clone)]
pub struct Noise {
    gumbel: Vec<f64>,
    normal: Vec<f64>,
}

impl Noise {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, count: usize, components: usize, dim: usize) -> Self {
        let gumbel = (0..count * components).map(|_| -(-open_unit(rng).ln()).ln()).collect();
        let normal = (0..count * dim).map(|_| StandardNormal.sample(rng)).collect();
        Self { gumbel, normal }
    }
}

/// Parametric adversary acting on the spectral marks of the base model.
///
/// Each sample draws soft component weights `r = softmax((logits + G)/τ)`
/// with Gumbel noise `G`; component `c` maps a base mark `w` to
/// `softmax(γ_c log w + β_c)` and the adversarial mark is the `r`-weighted
/// average. At `θ = 0` every component is the identity, so the adversary
/// starts at the base model.
///
/// Parameter layout: `logits[D]`, `log γ[D]`, `β[D×d]`, and in unconstrained
/// mode additionally `η[D×d]`, `σ[D×d]` for the factor
/// `exp(Σ_c r_c (η_c + σ_c ⊙ ξ))`, `ξ ~ N(0, I)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryFamily {
    pub mode: RobustificationMode,
    pub dim: usize,
    pub components: usize,
    pub temperature: f64,
    pub theta: Vec<f64>,
    pub base: DependenceModel,
}

impl AdversaryFamily {
    pub fn new(
        base: DependenceModel,
        mode: RobustificationMode,
        components: usize,
        temperature: f64,
    ) -> Result<Self> {
        base.validate()?;
        if components == 0 {
            return Err(Error::InvalidInput("adversary needs at least one component".into()));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidInput(format!("temperature {temperature} must be positive")));
        }
        let dim = base.dim();
        let theta = vec![0.0; Self::parameter_count(mode, dim, components)];
        Ok(Self { mode, dim, components, temperature, theta, base })
    }

    pub fn parameter_count(mode: RobustificationMode, dim: usize, components: usize) -> usize {
        let spectral = components * (2 + dim);
        match mode {
            RobustificationMode::Unconstrained => spectral + 2 * components * dim,
            _ => spectral,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.theta.len() != Self::parameter_count(self.mode, self.dim, self.components) {
            return Err(Error::DimensionMismatch {
                expected: Self::parameter_count(self.mode, self.dim, self.components),
                got: self.theta.len(),
            });
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("adversary parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let family: Self = serde_json::from_str(text)?;
        family.validate()?;
        Ok(family)
    }

    pub fn with_theta(&self, theta: &[f64]) -> Self {
        Self { theta: theta.to_vec(), ..self.clone() }
    }

    fn view(&self) -> View<'_> {
        let (d, k) = (self.dim, self.components);
        let t = &self.theta;
        let beta_end = 2 * k + k * d;
        View {
            dim: d,
            components: k,
            temperature: self.temperature,
            logits: &t[..k],
            log_gamma: &t[k..2 * k],
            beta: &t[2 * k..beta_end],
            eta: t.get(beta_end..beta_end + k * d),
            sigma: t.get(beta_end + k * d..beta_end + 2 * k * d),
        }
    }

    /// Spectral draws from the adversary; in unit-margin mode the batch is
    /// rescaled so that its coordinate means are `1/d`.
    pub fn sample_spectral<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<SpectralSample> {
        let v = self.view();
        let mut lw = vec![0.0; self.dim];
        let mut r = vec![0.0; self.components];
        let mut scratch = vec![0.0; self.dim];
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            draw_spectral_log(rng, &self.base, &mut lw);
            let g: Vec<f64> = (0..self.components).map(|_| -(-open_unit(rng).ln()).ln()).collect();
            v.mixing(&g, &mut r);
            let mut w = vec![0.0; self.dim];
            v.transform(&lw, &r, &mut scratch, &mut w);
            out.push(w);
        }
        if self.mode == RobustificationMode::EvtConstrainedUnitMargins {
            let f = unit_margin_factors(&out, self.dim);
            for w in &mut out {
                rescale(w, &f);
            }
        }
        out.into_iter().map(SpectralSample::new_unchecked).collect()
    }

    /// Adversarial samples paired one-to-one with the batch configurations.
    pub fn samples(&self, batch: &BaseBatch, noise: &Noise) -> Vec<Vec<f64>> {
        let v = self.view();
        let (d, k) = (self.dim, self.components);
        let weights: Vec<Vec<f64>> = (0..batch.len())
            .map(|j| {
                let mut r = vec![0.0; k];
                v.mixing(&noise.gumbel[j * k..(j + 1) * k], &mut r);
                r
            })
            .collect();
        let factors = (self.mode == RobustificationMode::EvtConstrainedUnitMargins).then(|| {
            let mut scratch = vec![0.0; d];
            let mut leading = Vec::new();
            for (j, lm) in batch.log_marks.iter().enumerate() {
                for lw in lm.chunks_exact(d).take(LEADING_ATOMS) {
                    let mut w = vec![0.0; d];
                    v.transform(lw, &weights[j], &mut scratch, &mut w);
                    leading.push(w);
                }
            }
            unit_margin_factors(&leading, d)
        });
        (0..batch.len())
            .into_par_iter()
            .map(|j| {
                let cfg = &batch.configurations[j];
                let mut m =
                    v.assemble(cfg.arrivals(), &batch.log_marks[j], &weights[j], factors.as_deref());
                if let (Some(eta), Some(sigma)) = (v.eta, v.sigma) {
                    let xi = &noise.normal[j * d..(j + 1) * d];
                    for (i, mi) in m.iter_mut().enumerate() {
                        let s: f64 = (0..k)
                            .map(|c| weights[j][c] * (eta[c * d + i] + sigma[c * d + i] * xi[i]))
                            .sum();
                        *mi *= s.exp();
                    }
                }
                m
            })
            .collect()
    }
}

struct View<'a> {
    dim: usize,
    components: usize,
    temperature: f64,
    logits: &'a [f64],
    log_gamma: &'a [f64],
    beta: &'a [f64],
    eta: Option<&'a [f64]>,
    sigma: Option<&'a [f64]>,
}

impl View<'_> {
    fn mixing(&self, gumbel: &[f64], out: &mut [f64]) {
        for ((o, l), g) in out.iter_mut().zip(self.logits).zip(gumbel) {
            *o = (l + g) / self.temperature;
        }
        normalize_log(out);
        for o in out.iter_mut() {
            *o = o.exp();
        }
    }

    fn transform(&self, lw: &[f64], r: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for c in 0..self.components {
            let gamma = self.log_gamma[c].exp();
            let beta = &self.beta[c * self.dim..(c + 1) * self.dim];
            for ((s, l), b) in scratch.iter_mut().zip(lw).zip(beta) {
                *s = if *l == f64::NEG_INFINITY { f64::NEG_INFINITY } else { gamma * l + b };
            }
            normalize_log(scratch);
            for (o, s) in out.iter_mut().zip(scratch.iter()) {
                *o += r[c] * s.exp();
            }
        }
    }

    /// `max_n d·w̃_n / a_n`, stopping once `d / a_n` cannot raise any
    /// coordinate (marks lie on the simplex, so the bound is exact).
    fn assemble(&self, arrivals: &[f64], log_marks: &[f64], r: &[f64], factors: Option<&[f64]>) -> Vec<f64> {
        let d = self.dim;
        let scale = mark_scale(d);
        let mut m = vec![0.0f64; d];
        let mut scratch = vec![0.0; d];
        let mut w = vec![0.0; d];
        for (a, lw) in arrivals.iter().zip(log_marks.chunks_exact(d)) {
            let floor = m.iter().cloned().fold(f64::INFINITY, f64::min);
            if scale / a <= floor {
                break;
            }
            self.transform(lw, r, &mut scratch, &mut w);
            if let Some(f) = factors {
                rescale(&mut w, f);
            }
            for (mk, wk) in m.iter_mut().zip(&w) {
                *mk = mk.max(scale * wk / a);
            }
        }
        m
    }
}

fn rescale(w: &mut [f64], factors: &[f64]) {
    let mut total = 0.0;
    for (wk, f) in w.iter_mut().zip(factors) {
        *wk *= f;
        total += *wk;
    }
    w.iter_mut().for_each(|wk| *wk /= total);
}

/// Per-coordinate factors `f` such that the renormalized points
/// `normalize(w ⊙ f)` have coordinate means `1/d` (Sinkhorn-style
/// alternating rescaling).
fn unit_margin_factors(points: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let target = 1.0 / dim as f64;
    let mut f = vec![1.0; dim];
    let mut w = vec![0.0; dim];
    for _ in 0..PROJECTION_ROUNDS {
        let mut mean = vec![0.0; dim];
        for p in points {
            w.copy_from_slice(p);
            rescale(&mut w, &f);
            for (m, wk) in mean.iter_mut().zip(&w) {
                *m += wk;
            }
        }
        let mut worst = 0.0f64;
        for (fk, m) in f.iter_mut().zip(&mean) {
            let m = m / points.len() as f64;
            if m > 0.0 {
                *fk *= target / m;
                worst = worst.max((m - target).abs());
            }
        }
        if worst < 1e-12 {
            break;
        }
    }
    f
}
