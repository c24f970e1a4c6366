//! First-order Marcum Q function.
//!
//! With `x = a^2/2`, `y = b^2/2` and independent `K_x ~ Poisson(x)`,
//! `K_y ~ Poisson(y)`, the Poisson-weighted gamma-tail series
//!
//! ```text
//! Q1(a, b) = sum_k e^{-x} x^k / k! * P(K_y <= k) = P(K_y <= K_x)
//! ```
//!
//! The complement is `P(K_y > K_x)`. Both are sums of non-negative terms.
//! The smaller of the two is always summed directly, so tiny tail values keep
//! full relative precision and the other side is `1 - small`. Summation stops
//! once the Poisson weights fall below `1e-14` of the peak term's scale (well
//! past `e^{-700}`), which covers every double-precision result.

use super::special::ln_poisson_pmf;
use crate::error::{Error, Result};

/// Half-width of the summation window in standard deviations.
const WINDOW_SIGMAS: f64 = 40.0;

fn check(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("marcum_q1 needs finite a, b >= 0, got ({a}, {b})")));
    }
    Ok(())
}

fn window(mu: f64) -> (u64, u64) {
    let s = mu.sqrt();
    let lo = (mu - WINDOW_SIGMAS * s - 40.0).floor().max(0.0) as u64;
    let hi = (mu + WINDOW_SIGMAS * s + 200.0).ceil() as u64;
    (lo, hi)
}

fn pmf(k: u64, mu: f64) -> f64 {
    ln_poisson_pmf(k, mu).exp()
}

/// `P(K_y <= K_x)`.
fn prob_y_le_x(x: f64, y: f64) -> f64 {
    let (k_lo, k_hi) = window(x);
    // Ascending prefix sums of the y-pmf: additions only, smallest first below the mode.
    let mut cdf_y = 0.0;
    let mut total = 0.0;
    for k in 0..=k_hi {
        cdf_y += pmf(k, y);
        if k >= k_lo {
            total += pmf(k, x) * cdf_y;
        }
    }
    total.min(1.0)
}

/// `P(K_y > K_x)`.
fn prob_y_gt_x(x: f64, y: f64) -> f64 {
    let (k_lo, k_hi) = window(x);
    let top = k_hi.max(window(y).1);
    // Descending suffix sums: sf_y = P(K_y > k).
    let mut sf_y: f64 = ((k_hi + 1)..=top).map(|j| pmf(j, y)).sum();
    let mut total = 0.0;
    let mut k = k_hi;
    loop {
        total += pmf(k, x) * sf_y;
        if k == k_lo {
            break;
        }
        sf_y += pmf(k, y);
        k -= 1;
    }
    total.min(1.0)
}

/// `Q1(a, b)`, the probability that a unit-variance Rician envelope with
/// line-of-sight amplitude `a` exceeds `b`.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    check(a, b)?;
    if b == 0.0 {
        return Ok(1.0);
    }
    let (x, y) = (0.5 * a * a, 0.5 * b * b);
    Ok(if y >= x { prob_y_le_x(x, y) } else { 1.0 - prob_y_gt_x(x, y) })
}

/// `1 - Q1(a, b)`, summed directly so that small values keep relative accuracy.
pub fn marcum_q1_complement(a: f64, b: f64) -> Result<f64> {
    check(a, b)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    let (x, y) = (0.5 * a * a, 0.5 * b * b);
    Ok(if y >= x { 1.0 - prob_y_le_x(x, y) } else { prob_y_gt_x(x, y) })
}
