//! Distributionally robust estimation of multivariate extreme-value risk.
//!
//! Max-stable vectors are represented through their radial–spectral Poisson
//! point process `M = max_n Y^(n) / A^(n)`. On top of that representation the
//! crate provides:
//!
//! - [`evt`]: logistic dependence models, closed-form exponent functions and
//!   exact samplers for max-stable vectors and spectral measures.
//! - [`point_process`]: truncated point configurations, the radial–spectral
//!   transform and the matching distance between configurations.
//! - [`duals`]: one-dimensional dual programs for the worst-case CDF, rare-set
//!   probability, expected event count and CVaR over Wasserstein balls of
//!   point processes.
//! - [`adversary`]: the alternating min–max procedure for general losses with
//!   unconstrained, max-stable and unit-margin adversaries.
//! - [`experiments`]: synthetic mixtures, returns ingestion, block maxima and
//!   error-versus-budget sweeps.
//! - [`io`]: CSV and JSON formats for all of the above.

pub mod adversary;
pub mod duals;
pub mod error;
pub mod evt;
pub mod experiments;
pub mod io;
pub mod norm;
pub mod point_process;
pub mod rng;

pub use error::{Error, Result};
pub use norm::Norm;
