//! Truncated power-law sampling by inverse CDF.

use rand::Rng;

use super::LfrError;
use crate::rng;

/// Inverse CDF of the continuous density `∝ x^(-exponent)` on `[lo, hi]`.
pub(crate) fn continuous_quantile(u: f64, exponent: f64, lo: f64, hi: f64) -> f64 {
    if (exponent - 1.0).abs() < 1e-12 {
        return lo * (hi / lo).powf(u);
    }
    let e = 1.0 - exponent;
    let (a, b) = (lo.powf(e), hi.powf(e));
    (a + u * (b - a)).powf(1.0 / e)
}

/// Rounds a continuous draw on `[xmin - 1/2, xmax + 1/2]` to the nearest
/// integer, so each integer `x` receives the mass of its unit cell.
pub(crate) fn discrete_from_uniform(u: f64, exponent: f64, lo: f64, xmax: usize) -> usize {
    let hi = xmax as f64 + 0.5;
    let x = continuous_quantile(u, exponent, lo.min(hi), hi).round();
    (x.max(1.0) as usize).min(xmax)
}

pub(crate) fn draw(rng: &mut impl Rng, exponent: f64, xmin: usize, xmax: usize) -> usize {
    if xmin == xmax {
        return xmin;
    }
    discrete_from_uniform(rng.random::<f64>(), exponent, xmin as f64 - 0.5, xmax).clamp(xmin, xmax)
}

/// `count` i.i.d. integers with `P(x) ∝ x^(-exponent)` on `[xmin, xmax]`.
pub fn sample_power_law(
    exponent: f64,
    xmin: usize,
    xmax: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<usize>, LfrError> {
    if xmin == 0 || xmin > xmax {
        return Err(LfrError::BadRange(format!(
            "power-law support [{xmin}, {xmax}] is empty or contains 0"
        )));
    }
    if !(exponent.is_finite() && exponent > 0.0) {
        return Err(LfrError::BadRange(format!(
            "exponent {exponent} must be positive"
        )));
    }
    let mut rng = rng::stream(seed, &[0x5057]);
    Ok((0..count)
        .map(|_| draw(&mut rng, exponent, xmin, xmax))
        .collect())
}
