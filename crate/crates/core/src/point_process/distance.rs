use serde::{Deserialize, Serialize};

use super::{min_cost_assignment, PointConfiguration};
use crate::norm::Norm;

/// How arrival times enter the per-atom transport cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrivalPolicy {
    /// Moving an arrival costs infinity; only marks are transported.
    FixedArrivals,
    /// Arrivals move at cost `|a - a'|`, added to the mark distance.
    Free,
}

/// Per-atom cost and the scaling functional of the configuration distance.
/// The scaling functional is the constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportCostSpec {
    pub arrival_policy: ArrivalPolicy,
    pub mark_norm: Norm,
}

impl TransportCostSpec {
    pub fn fixed(mark_norm: Norm) -> Self {
        Self { arrival_policy: ArrivalPolicy::FixedArrivals, mark_norm }
    }

    pub fn free(mark_norm: Norm) -> Self {
        Self { arrival_policy: ArrivalPolicy::Free, mark_norm }
    }

    pub fn kappa(&self, _count: usize) -> f64 {
        1.0
    }

    /// Cost of moving atom `(s, u)` to `(t, v)`.
    pub fn atom_cost(&self, s: f64, u: &[f64], t: f64, v: &[f64]) -> f64 {
        match self.arrival_policy {
            ArrivalPolicy::FixedArrivals if s != t => f64::INFINITY,
            ArrivalPolicy::FixedArrivals => self.mark_norm.distance(u, v),
            ArrivalPolicy::Free => (s - t).abs() + self.mark_norm.distance(u, v),
        }
    }
}

/// Matching distance between two configurations: infinite when the atom
/// counts differ, otherwise `κ · min_σ Σ_i c(x_i, y_σ(i))`.
///
/// Under fixed arrivals both configurations have strictly increasing
/// arrivals, so the only finite matching pairs atoms with identical arrival
/// values in order.
pub fn configuration_distance(
    lhs: &PointConfiguration,
    rhs: &PointConfiguration,
    cost: TransportCostSpec,
) -> f64 {
    if lhs.len() != rhs.len() || lhs.dim() != rhs.dim() {
        return f64::INFINITY;
    }
    let n = lhs.len();
    let kappa = cost.kappa(n);
    match cost.arrival_policy {
        ArrivalPolicy::FixedArrivals => {
            if lhs.arrivals() != rhs.arrivals() {
                return f64::INFINITY;
            }
            kappa
                * (0..n)
                    .map(|i| cost.mark_norm.distance(lhs.mark(i), rhs.mark(i)))
                    .sum::<f64>()
        }
        ArrivalPolicy::Free => {
            let mut matrix = Vec::with_capacity(n * n);
            for (s, u) in lhs.atoms() {
                for (t, v) in rhs.atoms() {
                    matrix.push(cost.atom_cost(s, u, t, v));
                }
            }
            kappa * min_cost_assignment(&matrix, n).1
        }
    }
}
