//! Bracketed root finding.

use super::Tolerance;
use crate::error::{Error, Result};

/// Bisection on `[lo, hi]`, which must bracket a sign change of `f`.
///
/// Stops once the half-width is below `abs_tol + rel_tol * |mid|`. Because the
/// iterates are deterministic halvings, two runs with different tolerances
/// differ by at most the looser one.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64> {
    tol.validate()?;
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Domain("function is NaN at a bracket end".into()));
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    for _ in 0..tol.max_iters {
        let mid = lo + 0.5 * (hi - lo);
        if 0.5 * (hi - lo) <= tol.abs_tol + tol.rel_tol * mid.abs() || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence { iterations: tol.max_iters, estimate: lo + 0.5 * (hi - lo) })
}
