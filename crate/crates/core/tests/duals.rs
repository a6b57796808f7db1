use mevdro::duals::{
    baseline_cdf, baseline_cvar, baseline_expected_count, baseline_rare_set_probability,
    cdf_dual_objective, cdf_minimizer_value, cvar_inner_objective, cvar_inner_supremum,
    expected_count_dual_objective, minimize_lambda, rare_set_dual_objective,
    replication_statistic, robust_cdf, robust_cvar, robust_expected_count,
    robust_rare_set_probability, BracketPolicy, HingeProfile, RareSet, RobustificationConfig,
};
use mevdro::evt::DependenceModel;
use mevdro::point_process::{sample_configurations, PointConfiguration, Truncation};
use mevdro::Norm;
use proptest::prelude::*;

/// One-dimensional configuration with points `y/a` at the given values
/// (`a = 1, 2, ...`).
fn points_1d(points: &[f64]) -> PointConfiguration {
    let atoms: Vec<(f64, Vec<f64>)> =
        points.iter().enumerate().map(|(i, p)| ((i + 1) as f64, vec![p * (i + 1) as f64])).collect();
    PointConfiguration::from_atoms(1, &atoms).unwrap()
}

/// Minimum of `f` over a dense grid on `[0, hi]` plus the given breakpoints.
fn grid_min(f: impl Fn(f64) -> f64, hi: f64, breakpoints: &[f64]) -> f64 {
    let n = 200_000;
    (0..=n)
        .map(|i| hi * i as f64 / n as f64)
        .chain(breakpoints.iter().copied())
        .map(&f)
        .fold(f64::INFINITY, f64::min)
}

fn sl_fixture(replications: usize) -> Vec<PointConfiguration> {
    let model = DependenceModel::symmetric(2, 0.5).unwrap();
    sample_configurations(3, &model, replications, Truncation::atoms(200)).unwrap()
}

fn orthant() -> RareSet {
    RareSet::UpperOrthant { lower: vec![1.0] }
}

#[test]
fn cdf_dual_at_zero_multiplier_is_one() {
    let cfgs = sl_fixture(200);
    assert_eq!(cdf_dual_objective(0.0, &cfgs, &[1.0, 1.0], 0.3).unwrap(), 1.0);
}

#[test]
fn replication_already_above_contributes_one() {
    // V = y·x = 2 >= a = 1: the replication is outside the CDF event
    let cfg = PointConfiguration::from_atoms(1, &[(1.0, vec![2.0])]).unwrap();
    for lambda in [0.0, 1.0, 1e6] {
        assert_eq!(cdf_dual_objective(lambda, std::slice::from_ref(&cfg), &[1.0], 0.0).unwrap(), 1.0);
    }
}

#[test]
fn single_gap_two_zero_budget() {
    // a = 3, V = 1: g = 2
    let cfg = PointConfiguration::from_atoms(1, &[(3.0, vec![1.0])]).unwrap();
    let r = robust_cdf(std::slice::from_ref(&cfg), &[1.0], 0.0).unwrap();
    let oracle = grid_min(|l| cdf_dual_objective(l, std::slice::from_ref(&cfg), &[1.0], 0.0).unwrap(), 5.0, &[0.5]);
    assert!(r.objective.abs() < 1e-12 && oracle.abs() < 1e-12);
    assert_eq!(r.lambda_star, 0.5);
    assert_eq!(r.robust_value, 1.0);
}

#[test]
fn cdf_small_budget_matches_grid() {
    let cfgs = sl_fixture(300);
    let x = [1.0, 1.0];
    for delta in [0.01, 0.1, 0.4] {
        let r = robust_cdf(&cfgs, &x, delta).unwrap();
        let gaps = mevdro::duals::cdf_gaps(&cfgs, &x).unwrap();
        let kinks: Vec<f64> = gaps.iter().filter(|g| **g > 0.0).map(|g| 1.0 / g).collect();
        let f = |l: f64| l * delta + gaps.iter().map(|g| (1.0 - l * g).max(0.0)).sum::<f64>() / gaps.len() as f64;
        let oracle = (0..=20_000).map(|i| 200.0 * i as f64 / 20_000.0).chain(kinks.iter().copied()).map(f).fold(f64::INFINITY, f64::min);
        assert!((cdf_dual_objective(0.7, &cfgs, &x, delta).unwrap() - f(0.7)).abs() < 1e-12);
        assert!((r.objective - oracle).abs() < 1e-9, "{delta}: {} vs {oracle}", r.objective);
        assert!(r.robust_value <= baseline_cdf(&cfgs, &x).unwrap() + 1e-12);
    }
}

#[test]
fn cdf_large_budget_is_zero() {
    let cfgs = sl_fixture(300);
    let x = [1.0, 1.0];
    let gaps = mevdro::duals::cdf_gaps(&cfgs, &x).unwrap();
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let r = robust_cdf(&cfgs, &x, mean_gap * 1.01).unwrap();
    assert!(r.robust_value.abs() < 1e-9);
    assert_eq!(r.lambda_star, 0.0);
}

#[test]
fn unshifted_region_recovers_baseline() {
    let cfgs = sl_fixture(2_000);
    let x = [1.0, 1.0];
    let unshifted = cdf_minimizer_value(&cfgs, &x, f64::INFINITY).unwrap();
    // exp(-E N(C)) against the fraction of empty regions: both estimate exp(-V)
    assert!((unshifted - baseline_cdf(&cfgs, &x).unwrap()).abs() < 0.03);
    assert!((unshifted - (-(2f64.sqrt())).exp()).abs() < 0.03);
    assert_eq!(cdf_minimizer_value(&cfgs, &x, 0.0).unwrap(), 0.0);
    let far = PointConfiguration::from_atoms(2, &[(50.0, vec![0.1, 0.1])]).unwrap();
    assert_eq!(cdf_minimizer_value(&[far], &x, 1e6).unwrap(), 1.0);
}

#[test]
fn rare_set_everything_is_certain() {
    let cfgs = sl_fixture(100);
    let everything = RareSet::UpperOrthant { lower: vec![0.0, 0.0] };
    for delta in [0.0, 0.1, 5.0] {
        let r = robust_rare_set_probability(&cfgs, &everything, Norm::L2, delta).unwrap();
        assert!((r.robust_value - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rare_set_two_replications_match_grid() {
    let cfgs = [points_1d(&[0.5]), points_1d(&[1.0])];
    let r = robust_rare_set_probability(&cfgs, &orthant(), Norm::L2, 0.1).unwrap();
    let oracle = grid_min(
        |l| rare_set_dual_objective(l, &cfgs, &orthant(), Norm::L2, 0.1).unwrap(),
        10.0,
        &[2.0],
    );
    assert!((r.robust_value - oracle).abs() < 1e-6);
    assert!((oracle - 0.7).abs() < 1e-9);
    assert_eq!(baseline_rare_set_probability(&cfgs, &orthant(), Norm::L2).unwrap(), 0.5);
}

#[test]
fn expected_count_three_atoms_match_grid() {
    // distances 0, 0.2, 0.7 from {x >= 1}
    let cfgs = [points_1d(&[1.0, 0.8, 0.3])];
    let r = robust_expected_count(&cfgs, &orthant(), Norm::L2, 0.1).unwrap();
    let oracle = grid_min(
        |l| expected_count_dual_objective(l, &cfgs, &orthant(), Norm::L2, 0.1).unwrap(),
        20.0,
        &[5.0, 1.0 / 0.7],
    );
    assert!((r.robust_value - oracle).abs() < 1e-6, "{} vs {oracle}", r.robust_value);
    assert_eq!(baseline_expected_count(&cfgs, &orthant(), Norm::L2).unwrap(), 1.0);
}

#[test]
fn interior_atoms_are_free() {
    let cfgs = [points_1d(&[3.0, 2.0]), points_1d(&[1.5])];
    let r = robust_expected_count(&cfgs, &orthant(), Norm::L2, 0.2).unwrap();
    assert!((r.robust_value - 1.5 - 0.2 * r.lambda_star).abs() < 1e-12);
}

#[test]
fn exceedance_set_complements_the_cdf() {
    let cfgs = sl_fixture(5_000);
    let x = [1.0, 2.0];
    let set = RareSet::Exceedance { threshold: vec![1.0, 0.5] };
    let hit = baseline_rare_set_probability(&cfgs, &set, Norm::L2).unwrap();
    let cdf = baseline_cdf(&cfgs, &x).unwrap();
    assert!((hit - (1.0 - cdf)).abs() < 1e-12);
    let robust_hit = robust_rare_set_probability(&cfgs, &set, Norm::L2, 0.0).unwrap().robust_value;
    let robust_cdf_value = robust_cdf(&cfgs, &x, 0.0).unwrap().robust_value;
    assert!((robust_hit - (1.0 - robust_cdf_value)).abs() < 0.02);
}

#[test]
fn zero_budget_recovers_baselines() {
    let cfgs = sl_fixture(1_000);
    let set = RareSet::HalfSpace { normal: vec![1.0, 1.0], offset: 2.0 };
    let x = [0.7, 1.4];
    assert!((robust_cdf(&cfgs, &x, 0.0).unwrap().robust_value - baseline_cdf(&cfgs, &x).unwrap()).abs() < 1e-9);
    assert!(
        (robust_rare_set_probability(&cfgs, &set, Norm::L1, 0.0).unwrap().robust_value
            - baseline_rare_set_probability(&cfgs, &set, Norm::L1).unwrap())
        .abs()
            < 1e-9
    );
    assert!(
        (robust_expected_count(&cfgs, &set, Norm::LInf, 0.0).unwrap().robust_value
            - baseline_expected_count(&cfgs, &set, Norm::LInf).unwrap())
        .abs()
            < 1e-9
    );
    assert_eq!(robust_cvar(&cfgs, 0.0, 0.9).unwrap().robust_value, baseline_cvar(&cfgs, 0.9).unwrap());
}

#[test]
fn cvar_matches_sorted_tail_mean() {
    let cfgs = sl_fixture(1_000);
    let mut s: Vec<f64> = cfgs.iter().map(replication_statistic).collect();
    s.sort_by(f64::total_cmp);
    // 950th order statistic, then the 50 values above it
    let tail = &s[950..];
    let oracle = tail.iter().sum::<f64>() / tail.len() as f64;
    let r = robust_cvar(&cfgs, 0.0, 0.95).unwrap();
    assert!((r.robust_value - oracle).abs() < 1e-9 * oracle);
    assert!(r.converged);
    let shifted = robust_cvar(&cfgs, 2.0, 0.95).unwrap();
    assert!((shifted.robust_value - r.robust_value - 40.0).abs() < 1e-9);
}

#[test]
fn cvar_min_z_form_agrees() {
    let cfgs = sl_fixture(1_000);
    let s: Vec<f64> = cfgs.iter().map(replication_statistic).collect();
    for (alpha, delta) in [(0.9, 0.0), (0.95, 1.0), (0.8, 0.3)] {
        let min_z = s
            .iter()
            .map(|&z| z + (delta + s.iter().map(|v| (v - z).max(0.0)).sum::<f64>() / s.len() as f64) / (1.0 - alpha))
            .fold(f64::INFINITY, f64::min);
        let r = robust_cvar(&cfgs, delta, alpha).unwrap().robust_value;
        assert!((r - min_z).abs() < 1e-6 * r, "{alpha}: {r} vs {min_z}");
    }
}

#[test]
fn cvar_with_too_few_replications_is_flagged() {
    let cfgs = sl_fixture(5);
    assert!(!robust_cvar(&cfgs, 0.0, 0.95).unwrap().converged);
    assert!(robust_cvar(&cfgs, 0.0, 1.0).is_err());
    assert!(robust_cvar(&cfgs, -0.1, 0.5).is_err());
}

#[test]
fn cvar_inner_threshold_at_one() {
    let points = vec![vec![2.0, 0.5], vec![0.25, 1.0]];
    let z = 1.0;
    assert!(cvar_inner_supremum(&points, z, 0.5).is_infinite());
    assert!(cvar_inner_supremum(&points, z, 0.999).is_infinite());
    assert_eq!(cvar_inner_supremum(&points, z, 1.0), 2.0);
    assert_eq!(cvar_inner_supremum(&points, z, 1.5), 2.0);
    let mut last = f64::NEG_INFINITY;
    for t in [1.0, 10.0, 1e3, 1e5] {
        let probes = vec![vec![2.0 + t, 0.5], vec![0.25, 1.0]];
        let v = cvar_inner_objective(&points, &probes, z, 0.5);
        assert!(v > last);
        last = v;
    }
    assert!(last >= 0.5 * 1e5);
}

#[test]
fn minimizer_examples() {
    let m = minimize_lambda(|l| (l - 2.0).powi(2) + 3.0, &BracketPolicy::default());
    assert!((m.lambda - 2.0).abs() < 1e-6 && (m.value - 3.0).abs() < 1e-12 && m.converged);
    let m = minimize_lambda(|l| 0.5 * l, &BracketPolicy::for_delta(0.5));
    assert_eq!((m.lambda, m.value), (0.0, 0.0));
    let m = minimize_lambda(|l| -l, &BracketPolicy::for_delta(1.0));
    assert!(!m.converged);
}

#[test]
fn hinge_dual_matches_breakpoint_enumeration() {
    let gaps = [0.3, 1.2, 2.5];
    let profile = HingeProfile::new(gaps, 3);
    let f = |l: f64| 0.1 * l + gaps.iter().map(|g| (1.0 - l * g).max(0.0)).sum::<f64>() / 3.0;
    let oracle = [0.0].iter().chain(gaps.iter().map(|g| 1.0 / g).collect::<Vec<_>>().iter()).map(|&l| f(l)).fold(f64::INFINITY, f64::min);
    let m = minimize_lambda(|l| profile.objective(l, 0.1), &BracketPolicy::for_delta(0.1));
    assert!((m.value - oracle).abs() < 1e-9, "{} vs {oracle}", m.value);
}

#[test]
fn config_validation_and_json() {
    let c = RobustificationConfig::default();
    assert!(c.validate().is_ok());
    assert!(RobustificationConfig { delta: -1.0, ..c.clone() }.validate().is_err());
    assert!(RobustificationConfig { alpha_level: 1.0, ..c.clone() }.validate().is_err());
    assert!(RobustificationConfig { mc_replications: 0, ..c }.validate().is_err());
    let r = robust_cdf(&sl_fixture(50), &[1.0, 1.0], 0.1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["lambda_star", "objective", "robust_value", "converged", "iterations"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn rare_set_strings_parse() {
    assert_eq!(
        "box:0,0;1,2".parse::<RareSet>().unwrap(),
        RareSet::Box { lower: vec![0.0, 0.0], upper: vec![1.0, 2.0] }
    );
    assert_eq!("orthant:1,1".parse::<RareSet>().unwrap(), RareSet::UpperOrthant { lower: vec![1.0, 1.0] });
    assert_eq!("exceed:2".parse::<RareSet>().unwrap(), RareSet::Exceedance { threshold: vec![2.0] });
    assert!("halfspace:1,-1;0".parse::<RareSet>().is_err());
    assert!("box:1;0".parse::<RareSet>().is_err());
    assert!("sphere:1".parse::<RareSet>().is_err());
}

fn rare_set() -> impl Strategy<Value = RareSet> {
    prop_oneof![
        (prop::collection::vec(0.0f64..3.0, 2), prop::collection::vec(0.0f64..3.0, 2)).prop_map(|(a, b)| {
            let lower: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect();
            let upper: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
            RareSet::Box { lower, upper }
        }),
        prop::collection::vec(0.0f64..3.0, 2).prop_map(|lower| RareSet::UpperOrthant { lower }),
        prop::collection::vec(0.1f64..3.0, 2).prop_map(|threshold| RareSet::Exceedance { threshold }),
        (prop::collection::vec(0.0f64..2.0, 2), 0.0f64..3.0)
            .prop_filter("nonzero normal", |(n, _)| n.iter().sum::<f64>() > 1e-3)
            .prop_map(|(normal, offset)| RareSet::HalfSpace { normal, offset }),
    ]
}

fn norm() -> impl Strategy<Value = Norm> {
    prop_oneof![Just(Norm::L1), Just(Norm::L2), Just(Norm::LInf)]
}

proptest! {
    #[test]
    fn set_distance_is_lipschitz_and_zero_inside(
        set in rare_set(),
        norm in norm(),
        x in prop::collection::vec(0.0f64..5.0, 2),
        y in prop::collection::vec(0.0f64..5.0, 2),
    ) {
        let (dx, dy) = (set.distance(&x, norm), set.distance(&y, norm));
        prop_assert!(dx >= 0.0);
        prop_assert!((dx - dy).abs() <= norm.distance(&x, &y) + 1e-9);
        if set.contains(&x) {
            prop_assert!(dx == 0.0);
        }
        if dx > 1e-12 {
            prop_assert!(!set.contains(&x));
        }
    }

    #[test]
    fn hinge_duals_are_convex(
        gaps in prop::collection::vec(0.0f64..5.0, 1..40),
        delta in 0.0f64..2.0,
    ) {
        let profile = HingeProfile::new(gaps.iter().copied(), gaps.len());
        let grid: Vec<f64> = (0..80).map(|i| 1e-3 * 1.15f64.powi(i)).collect();
        let f: Vec<f64> = grid.iter().map(|&l| profile.objective(l, delta)).collect();
        for i in 1..grid.len() - 1 {
            let left = (f[i] - f[i - 1]) / (grid[i] - grid[i - 1]);
            let right = (f[i + 1] - f[i]) / (grid[i + 1] - grid[i]);
            prop_assert!(right - left >= -1e-9);
        }
    }

    #[test]
    fn hinge_solver_finds_the_breakpoint_minimum(
        gaps in prop::collection::vec(0.0f64..5.0, 1..40),
        delta in 0.001f64..2.0,
    ) {
        let profile = HingeProfile::new(gaps.iter().copied(), gaps.len());
        let oracle = std::iter::once(0.0)
            .chain(gaps.iter().filter(|g| **g > 0.0).map(|g| 1.0 / g))
            .map(|l| profile.objective(l, delta))
            .fold(f64::INFINITY, f64::min);
        let m = minimize_lambda(|l| profile.objective(l, delta), &BracketPolicy::for_delta(delta));
        prop_assert!((m.value - oracle).abs() <= 1e-7, "{} vs {}", m.value, oracle);
    }

    #[test]
    fn robust_values_are_monotone_in_budget(seed in 0u64..1000, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let model = DependenceModel::symmetric(2, 0.5).unwrap();
        let cfgs = sample_configurations(seed, &model, 60, Truncation::atoms(40)).unwrap();
        let set = RareSet::UpperOrthant { lower: vec![1.0, 1.0] };
        let x = [1.0, 1.0];
        prop_assert!(robust_cdf(&cfgs, &x, hi).unwrap().robust_value <= robust_cdf(&cfgs, &x, lo).unwrap().robust_value + 1e-12);
        prop_assert!(
            robust_rare_set_probability(&cfgs, &set, Norm::L2, hi).unwrap().robust_value
                >= robust_rare_set_probability(&cfgs, &set, Norm::L2, lo).unwrap().robust_value - 1e-12
        );
        prop_assert!(
            robust_expected_count(&cfgs, &set, Norm::L2, hi).unwrap().robust_value
                >= robust_expected_count(&cfgs, &set, Norm::L2, lo).unwrap().robust_value - 1e-12
        );
        prop_assert!(robust_cvar(&cfgs, hi, 0.9).unwrap().robust_value >= robust_cvar(&cfgs, lo, 0.9).unwrap().robust_value);
    }

    #[test]
    fn cvar_shift_is_exact(seed in 0u64..1000, delta in 0.0f64..20.0, alpha in 0.5f64..0.99) {
        let model = DependenceModel::symmetric(2, 0.7).unwrap();
        let cfgs = sample_configurations(seed, &model, 100, Truncation::atoms(30)).unwrap();
        let base = robust_cvar(&cfgs, 0.0, alpha).unwrap().robust_value;
        let shifted = robust_cvar(&cfgs, delta, alpha).unwrap().robust_value;
        prop_assert!((shifted - base - delta / (1.0 - alpha)).abs() <= 1e-12 * (1.0 + shifted));
    }
}
