//! Unit-Fréchet margins, logistic dependence models and their samplers.
//!
//! A max-stable vector `M` with unit Fréchet margins has CDF
//!
//! ```text
//! P(M <= x) = exp(-V(x)),   V(x) = d * ∫ max_k (w_k / x_k) H(dw)
//! ```
//!
//! where `H` is a probability measure on the simplex with coordinate means
//! `1/d`. The symmetric logistic (SL) model has `V(x) = (Σ_k x_k^{-1/α})^α`;
//! the asymmetric logistic (ASL) model sums SL-type terms over subsets with
//! per-coordinate asymmetry weights.
//!
//! Point-process marks use the scale `Y = d * w` so that `E[Y_k] = 1`; see
//! [`mark_scale`].

mod diagnostics;
mod exponent;
mod model;
mod sampling;
mod spectral;
mod stable;

pub use diagnostics::{ks_statistic, unit_frechet_cdf};
pub use exponent::{asl_exponent, sl_exponent};
pub use model::{
    AslSubset, AsymmetricLogistic, DependenceModel, MaxStableSample, MixtureComponent,
    SpectralSample, SIMPLEX_TOLERANCE,
};
pub use sampling::{
    sample_max_stable, sample_max_stable_labeled, sample_unit_frechet, unit_frechet_from_uniform,
};
pub use spectral::{sample_spectral, sample_spectral_log};
pub use stable::scaled_log_positive_stable;
pub(crate) use spectral::{draw_log as draw_spectral_log, normalize_log};

/// Dependence parameters at or below this value are treated as the
/// comonotone limit.
pub const COMONOTONE_ALPHA: f64 = 1e-9;

/// Dependence parameters at or above this value are treated as independence.
pub const INDEPENDENT_ALPHA: f64 = 1.0 - 1e-12;

/// Factor turning a simplex point into a point-process mark with unit mean
/// coordinates: `Y = d * w`.
pub fn mark_scale(dim: usize) -> f64 {
    dim as f64
}
