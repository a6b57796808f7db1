//! Synthetic mixture datasets, real-return ingestion, the truncated L1
//! target and error-versus-budget sweeps.

mod fit;
mod mixture;
mod returns;
mod sweep;

pub use fit::{extremal_coefficient, fit_asymmetric_logistic, fit_symmetric_logistic};
pub use mixture::{gen_mixture_dataset, random_asymmetry_weights, MixtureSpec};
pub use returns::{
    block_maxima, industry_average, standardize_frechet, BlockLength, ReturnRecord, ReturnsTable,
};
pub use sweep::{
    cvar_l1_target, error_vs_delta_sweep, geometric_grid, RiskSweepRecord, SweepConfig,
    TargetEstimate, TrueRiskSource,
};
