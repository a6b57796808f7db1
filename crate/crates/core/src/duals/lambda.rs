//! Golden-section search over `λ >= 0` for convex one-dimensional duals.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Bracketing and stopping rules for [`minimize_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketPolicy {
    /// First upper end tried; doubled until the objective stops decreasing.
    pub initial_upper: f64,
    /// Absolute width at which the search stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_expansions: usize,
}

impl BracketPolicy {
    /// Start at `1 / (δ + 1e-12)`.
    pub fn for_delta(delta: f64) -> Self {
        Self {
            initial_upper: 1.0 / (delta + 1e-12),
            tolerance: 1e-8,
            max_iterations: 200,
            max_expansions: 64,
        }
    }
}

impl Default for BracketPolicy {
    fn default() -> Self {
        Self::for_delta(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaMinimum {
    pub lambda: f64,
    pub value: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// False when the bracket could not be closed or the width tolerance
    /// was not reached.
    pub converged: bool,
}

/// Minimize a convex `objective` over `λ >= 0`.
///
/// The upper end grows geometrically from `policy.initial_upper` until
/// `f(2h) >= f(h)`, which for a convex function places the minimizer in
/// `[0, 2h]`. A monotone decreasing objective is reported unconverged at the
/// largest `λ` tried.
pub fn minimize_lambda(objective: impl Fn(f64) -> f64, policy: &BracketPolicy) -> LambdaMinimum {
    let mut hi = policy.initial_upper.max(f64::MIN_POSITIVE);
    let mut f_hi = objective(hi);
    let mut bracketed = false;
    for _ in 0..policy.max_expansions {
        let f_next = objective(2.0 * hi);
        if f_next >= f_hi {
            bracketed = true;
            hi *= 2.0;
            break;
        }
        hi *= 2.0;
        f_hi = f_next;
    }
    if !bracketed {
        return LambdaMinimum { lambda: hi, value: f_hi, bracket: (0.0, hi), iterations: 0, converged: false };
    }

    let (mut a, mut b) = (0.0, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    let mut iterations = 0;
    while b - a > policy.tolerance && iterations < policy.max_iterations {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d);
        }
        iterations += 1;
    }
    let mid = 0.5 * (a + b);
    let mut best = (0.0, objective(0.0));
    for (l, v) in [(c, fc), (d, fd), (mid, objective(mid))] {
        if v < best.1 {
            best = (l, v);
        }
    }
    LambdaMinimum {
        lambda: best.0,
        value: best.1,
        bracket: (0.0, hi),
        iterations,
        converged: b - a <= policy.tolerance,
    }
}
