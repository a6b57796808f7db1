//! Truncated Poisson point processes behind the radial–spectral
//! representation `M = max_n Y^(n) / A^(n)`.
//!
//! A [`PointConfiguration`] holds the first `N` atoms `(a_n, y_n)` of one
//! realization: unit-rate Poisson arrivals paired with marks `y = d · w`,
//! `w ~ H`. Configurations can be compared through the matching distance
//! [`configuration_distance`], which is infinite when atom counts differ and
//! otherwise the cheapest perfect matching of atoms.

mod assignment;
mod configuration;
mod distance;

pub use assignment::min_cost_assignment;
pub use configuration::{
    inverse_radial_spectral, max_stable_from_configuration, radial_spectral_transform,
    sample_configuration, sample_configurations, truncation_tail_bound, v_statistic,
    PointConfiguration, Truncation,
};
pub use distance::{configuration_distance, ArrivalPolicy, TransportCostSpec};
