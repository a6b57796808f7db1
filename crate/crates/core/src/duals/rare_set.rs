//! Worst-case rare-event probability and expected event count.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{check_delta, DualSolveResult};
use super::hinge::{solve, HingeProfile};
use crate::error::{ensure_dim, Error, Result};
use crate::norm::Norm;
use crate::point_process::PointConfiguration;

/// A subset of `R^d_+` with an exact distance function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RareSet {
    /// `{x : lower <= x <= upper}`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{x : x >= lower}`.
    UpperOrthant { lower: Vec<f64> },
    /// `{x : x_k > threshold_k for some k}`, the complement of `[0, threshold]`.
    Exceedance { threshold: Vec<f64> },
    /// `{x : <normal, x> >= offset}` with a nonnegative normal.
    HalfSpace { normal: Vec<f64>, offset: f64 },
}

impl RareSet {
    pub fn dim(&self) -> usize {
        match self {
            RareSet::Box { lower, .. } | RareSet::UpperOrthant { lower } => lower.len(),
            RareSet::Exceedance { threshold } => threshold.len(),
            RareSet::HalfSpace { normal, .. } => normal.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match self {
            RareSet::Box { lower, upper } => {
                ensure_dim(lower.len(), upper.len())?;
                finite(lower) && finite(upper) && lower.iter().zip(upper).all(|(l, u)| l <= u)
            }
            RareSet::UpperOrthant { lower } => finite(lower),
            RareSet::Exceedance { threshold } => {
                finite(threshold) && threshold.iter().all(|t| *t >= 0.0)
            }
            RareSet::HalfSpace { normal, offset } => {
                finite(normal)
                    && offset.is_finite()
                    && normal.iter().all(|a| *a >= 0.0)
                    && normal.iter().any(|a| *a > 0.0)
            }
        };
        if self.dim() == 0 {
            return Err(Error::InvalidInput("rare set has dimension 0".into()));
        }
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("malformed rare set {self:?}")))
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            RareSet::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| l <= v && v <= u)
            }
            RareSet::UpperOrthant { lower } => x.iter().zip(lower).all(|(v, l)| v >= l),
            RareSet::Exceedance { threshold } => x.iter().zip(threshold).any(|(v, t)| v > t),
            RareSet::HalfSpace { normal, offset } => dot(normal, x) >= *offset,
        }
    }

    /// `inf_{y ∈ A} ‖y - x‖`; zero on the closure of `A`.
    pub fn distance(&self, x: &[f64], norm: Norm) -> f64 {
        match self {
            RareSet::Box { lower, upper } => {
                let v: Vec<f64> = x
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(v, (l, u))| (l - v).max(0.0) + (v - u).max(0.0))
                    .collect();
                norm.norm(&v)
            }
            RareSet::UpperOrthant { lower } => {
                let v: Vec<f64> = x.iter().zip(lower).map(|(v, l)| (l - v).max(0.0)).collect();
                norm.norm(&v)
            }
            // Reaching the set means pushing a single coordinate past its
            // threshold, which costs the same under every p-norm.
            RareSet::Exceedance { threshold } => x
                .iter()
                .zip(threshold)
                .map(|(v, t)| (t - v).max(0.0))
                .fold(f64::INFINITY, f64::min),
            RareSet::HalfSpace { normal, offset } => {
                (offset - dot(normal, x)).max(0.0) / norm.dual().norm(normal)
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("bad number {t:?}: {e}")))
        })
        .collect()
}

/// Compact form used on the command line:
/// `box:l1,l2;u1,u2`, `orthant:l1,l2`, `exceed:t1,t2`, `halfspace:a1,a2;b`.
impl FromStr for RareSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("rare set {s:?} lacks a kind prefix")))?;
        let parts: Vec<&str> = body.split(';').collect();
        let set = match (kind.trim(), parts.as_slice()) {
            ("box", [l, u]) => RareSet::Box { lower: parse_list(l)?, upper: parse_list(u)? },
            ("orthant", [l]) => RareSet::UpperOrthant { lower: parse_list(l)? },
            ("exceed", [t]) => RareSet::Exceedance { threshold: parse_list(t)? },
            ("halfspace", [a, b]) => {
                let offset = parse_list(b)?;
                if offset.len() != 1 {
                    return Err(Error::InvalidInput("half-space offset must be a scalar".into()));
                }
                RareSet::HalfSpace { normal: parse_list(a)?, offset: offset[0] }
            }
            _ => return Err(Error::InvalidInput(format!("unrecognised rare set {s:?}"))),
        };
        set.validate()?;
        Ok(set)
    }
}

/// Distances from every point `y^(n)/a^(n)` of every configuration to `set`.
pub fn atom_distances(
    configurations: &[PointConfiguration],
    set: &RareSet,
    norm: Norm,
) -> Result<Vec<Vec<f64>>> {
    if configurations.is_empty() {
        return Err(Error::Empty("configurations"));
    }
    set.validate()?;
    configurations
        .par_iter()
        .map(|cfg| {
            ensure_dim(set.dim(), cfg.dim())?;
            Ok(cfg.points().map(|x| set.distance(&x, norm)).collect())
        })
        .collect()
}

fn replication_minima(distances: &[Vec<f64>]) -> impl Iterator<Item = f64> + '_ {
    distances.iter().map(|d| d.iter().copied().fold(f64::INFINITY, f64::min))
}

/// `λδ + (1/R) Σ_r (1 - λ d_r)^+` with `d_r = min_n dist(X^(n), A)`.
pub fn rare_set_dual_objective(
    lambda: f64,
    configurations: &[PointConfiguration],
    set: &RareSet,
    norm: Norm,
    delta: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    check_delta(delta)?;
    let d = atom_distances(configurations, set, norm)?;
    Ok(HingeProfile::new(replication_minima(&d), d.len()).objective(lambda, delta))
}

/// `λδ + (1/R) Σ_r Σ_n (1 - λ dist(X^(n), A))^+`.
pub fn expected_count_dual_objective(
    lambda: f64,
    configurations: &[PointConfiguration],
    set: &RareSet,
    norm: Norm,
    delta: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    check_delta(delta)?;
    let d = atom_distances(configurations, set, norm)?;
    let r = d.len();
    Ok(HingeProfile::new(d.into_iter().flatten(), r).objective(lambda, delta))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda {lambda} must be >= 0")))
    }
}

/// Fraction of replications with at least one point in the closure of `A`.
pub fn baseline_rare_set_probability(
    configurations: &[PointConfiguration],
    set: &RareSet,
    norm: Norm,
) -> Result<f64> {
    let d = atom_distances(configurations, set, norm)?;
    Ok(replication_minima(&d).filter(|m| *m <= 0.0).count() as f64 / d.len() as f64)
}

/// Mean number of points in the closure of `A` per replication.
pub fn baseline_expected_count(
    configurations: &[PointConfiguration],
    set: &RareSet,
    norm: Norm,
) -> Result<f64> {
    let d = atom_distances(configurations, set, norm)?;
    let hits: usize = d.iter().map(|r| r.iter().filter(|v| **v <= 0.0).count()).sum();
    Ok(hits as f64 / d.len() as f64)
}

/// Worst-case `P(N(A) >= 1)` over the Wasserstein ball.
pub fn robust_rare_set_probability(
    configurations: &[PointConfiguration],
    set: &RareSet,
    norm: Norm,
    delta: f64,
) -> Result<DualSolveResult> {
    let d = atom_distances(configurations, set, norm)?;
    solve(&HingeProfile::new(replication_minima(&d), d.len()), delta)
}

/// Worst-case `E N(A)` over the Wasserstein ball.
pub fn robust_expected_count(
    configurations: &[PointConfiguration],
    set: &RareSet,
    norm: Norm,
    delta: f64,
) -> Result<DualSolveResult> {
    let d = atom_distances(configurations, set, norm)?;
    let r = d.len();
    solve(&HingeProfile::new(d.into_iter().flatten(), r), delta)
}
