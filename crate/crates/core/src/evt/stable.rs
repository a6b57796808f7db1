use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{COMONOTONE_ALPHA, INDEPENDENT_ALPHA};
use crate::rng::open_unit;

/// Draw `α · ln S` where `S` is positive stable with `E[exp(-tS)] = exp(-t^α)`.
///
/// Uses Kanter's representation
/// `S = (A(U) / E)^{(1-α)/α}` with
/// `A(u) = (sin(αu)^α sin((1-α)u)^{1-α} / sin u)^{1/(1-α)}`, `U ~ U(0, π)`,
/// `E ~ Exp(1)`. Multiplying through by `α` keeps the result finite for very
/// small `α`.
pub fn scaled_log_positive_stable<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> f64 {
    if alpha >= INDEPENDENT_ALPHA {
        return 0.0;
    }
    let u = std::f64::consts::PI * open_unit(rng);
    let e: f64 = Exp1.sample(rng);
    if alpha <= COMONOTONE_ALPHA {
        // α ln S -> (ln sin((1-α)u) - ln sin u) - ln E + α ln sin(αu) with α -> 0.
        return -e.ln();
    }
    alpha * (alpha * u).sin().ln() + (1.0 - alpha) * ((1.0 - alpha) * u).sin().ln()
        - u.sin().ln()
        - (1.0 - alpha) * e.ln()
}
