//! Error-rate expressions and bounds for the two-step detector.
//!
//! Assumes QPSK Tx symbols and an on/off tag. With `s = snr` and
//! `x = |g| sqrt(rho)`:
//!
//! - `M(s, x)` ([`m_integral`]) is the Tx symbol error rate given the tag
//!   reflects, averaged over the uniform channel phase.
//! - The equivalent tag-detection SNR is `lambda = 2 s |g|^2 rho N`.
//! - The energy detector compares `2|Y~|^2` against the crossing `Lambda` of
//!   the central and noncentral 2-dof chi-squared densities ([`threshold_lambda`]).
//!
//! # Tx SER bounds
//!
//! [`ser_x1_bounds_sync`] substitutes the bounds `M_ < M < M^` into
//! `SER = (2Q(sqrt s) - Q^2(sqrt s) + M) / 2`, giving
//! `(2Q - Q^2 + M_)/2 <= SER <= (2Q - Q^2 + M^)/2`. The variant that adds
//! `M_` or `M^` without the factor `1/2` is not a lower bound when
//! `M_ > M/2`, which happens at low SNR with weak backscatter.
//!
//! # Asynchronous tag BER
//!
//! [`ber_x2_bounds_async`] uses `Lambda = lambda/4` and is only offered for
//! `snr >= 10 dB`, where that threshold is meaningful.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SystemConfig, TxModulation};
use crate::numerics::{bessel_i0e, bisect_root, marcum_q1, marcum_q1_complement, q_function, Tolerance};

/// A lower and an upper bound on a probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
}

impl BoundPair {
    /// True when `lower - slack <= v <= upper + slack`.
    pub fn contains(&self, v: f64, slack: f64) -> bool {
        self.lower - slack <= v && v <= self.upper + slack
    }
}

/// How the detection threshold is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdMethod {
    /// Crossing of the two densities, by bisection.
    Bisection,
    /// `lambda / 4`.
    Asymptotic,
}

/// Threshold policy for detectors and bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdRule {
    /// Always bisect.
    Bisection,
    /// Always `lambda / 4`.
    Asymptotic,
    /// `lambda / 4` for `lambda >= 10`, bisection below.
    Auto,
}

/// A detection threshold and how it was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Equivalent SNR.
    pub lambda: f64,
    /// `Lambda(lambda)`.
    pub threshold: f64,
    pub method: ThresholdMethod,
}

/// Conditional frame success probabilities of the Tx sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSuccess {
    /// `P(X1^ = X1 | X2 = 0)`.
    pub given_bit0: f64,
    /// Bounds on `P(X1^ = X1 | X2 = 1)`.
    pub given_bit1: BoundPair,
}

/// `(snr, |g| sqrt(rho), N)` after checking the detection assumptions.
fn link(cfg: &SystemConfig) -> Result<(f64, f64, usize)> {
    cfg.validate()?;
    if cfg.tx_modulation != TxModulation::Qpsk {
        return Err(Error::Unsupported("error-rate analysis assumes QPSK Tx symbols".into()));
    }
    if !cfg.tag.is_on_off() {
        return Err(Error::Unsupported("error-rate analysis assumes an on/off tag".into()));
    }
    Ok((cfg.snr, cfg.backscatter_amplitude(), cfg.n))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0,1], got {alpha}")));
    }
    Ok(())
}

/// `lambda = 2 snr |g|^2 rho N`.
pub fn lambda_sync(cfg: &SystemConfig) -> Result<f64> {
    let (s, x, n) = link(cfg)?;
    Ok(2.0 * s * x * x * n as f64)
}

/// `(lambda0, lambda1)` for a delay offset: the noncentralities when only the
/// previous symbol reflects and when only the current one does.
pub fn lambda_async(cfg: &SystemConfig, alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let (s, x, n) = link(cfg)?;
    let (k, nf) = (2.0 * s * x * x, n as f64);
    Ok((k * alpha * alpha / nf, k * (nf + alpha * alpha / nf - 2.0 * alpha)))
}

/// `lambda` of the detector that drops the boundary sample.
pub fn lambda_truncated(cfg: &SystemConfig) -> Result<f64> {
    let (s, x, n) = link(cfg)?;
    if n < 2 {
        return Err(Error::Unsupported("truncated detection needs n >= 2".into()));
    }
    Ok(2.0 * s * x * x * (n - 1) as f64)
}

/// `ln f_central(x) - ln f_noncentral(x; lambda)`; positive below the crossing.
fn log_density_gap(x: f64, lambda: f64) -> f64 {
    let z = (lambda * x).sqrt();
    0.5 * lambda - z - bessel_i0e(z).ln()
}

/// Default tolerance for [`threshold_lambda`].
pub fn threshold_tolerance() -> Tolerance {
    Tolerance { abs_tol: 1e-12, rel_tol: 0.0, max_iters: 400 }
}

/// Optimal threshold: the `x > 0` where the central and noncentral 2-dof
/// chi-squared densities cross. The central density is larger below it.
pub fn threshold_lambda(lambda: f64, tol: &Tolerance) -> Result<ThresholdResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive and finite, got {lambda}")));
    }
    let f = |x: f64| log_density_gap(x, lambda);
    let brackets = [((lambda / 8.0).max(1e-6), lambda + 50.0), (1e-6, 10.0 * lambda + 100.0)];
    for (lo, hi) in brackets {
        if f(lo) > 0.0 && f(hi) < 0.0 {
            let threshold = bisect_root(f, lo, hi, tol)?;
            return Ok(ThresholdResult { lambda, threshold, method: ThresholdMethod::Bisection });
        }
    }
    let (lo, hi) = brackets[1];
    Err(Error::Bracket { lo, hi, f_lo: f(lo), f_hi: f(hi) })
}

/// `Lambda = lambda / 4`.
pub fn threshold_asymptotic(lambda: f64) -> Result<ThresholdResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive and finite, got {lambda}")));
    }
    Ok(ThresholdResult { lambda, threshold: lambda / 4.0, method: ThresholdMethod::Asymptotic })
}

/// Threshold under a [`ThresholdRule`].
pub fn threshold_with(lambda: f64, rule: ThresholdRule) -> Result<ThresholdResult> {
    match rule {
        ThresholdRule::Bisection => threshold_lambda(lambda, &threshold_tolerance()),
        ThresholdRule::Asymptotic => threshold_asymptotic(lambda),
        ThresholdRule::Auto if lambda >= 10.0 => threshold_asymptotic(lambda),
        ThresholdRule::Auto => threshold_lambda(lambda, &threshold_tolerance()),
    }
}

const M_START_NODES: usize = 512;
const M_MAX_NODES: usize = 1 << 22;

/// `M(snr, x) = (1/pi) int Q(a(1/sqrt2 + x cos t)) dt
///   - (1/2pi) int Q(a(1/sqrt2 + x cos t)) Q(a(1/sqrt2 + x sin t)) dt`,
/// `a = sqrt(2 snr)`, both integrals over one period.
///
/// Trapezoid rule from 512 nodes, doubled until the relative change is below `1e-10`.
pub fn m_integral(snr: f64, x: f64) -> Result<f64> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::Domain(format!("snr must be positive, got {snr}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite and >= 0, got {x}")));
    }
    let a = (2.0 * snr).sqrt();
    let g = |t: f64| {
        let qc = q_function(a * (FRAC_1_SQRT_2 + x * t.cos()));
        let qs = q_function(a * (FRAC_1_SQRT_2 + x * t.sin()));
        2.0 * qc - qc * qs
    };
    let step = |n: usize| 2.0 * std::f64::consts::PI / n as f64;
    let mut n = M_START_NODES;
    let mut sum: f64 = (0..n).map(|k| g(k as f64 * step(n))).sum();
    let mut est = sum / n as f64;
    while n < M_MAX_NODES {
        // The doubled rule reuses the old nodes and adds the midpoints.
        let h = step(n);
        sum += (0..n).map(|k| g((k as f64 + 0.5) * h)).sum::<f64>();
        n *= 2;
        let next = sum / n as f64;
        let change = (next - est).abs();
        est = next;
        if change <= 1e-10 * est.abs() || est == 0.0 {
            return Ok(est.clamp(0.0, 1.0));
        }
    }
    Err(Error::Convergence { iterations: n, estimate: est })
}

/// `M^(s, x) = 2Q(sqrt(2s)(1/sqrt2 - x)) - Q^2(sqrt(2s)(1/sqrt2 + x))`.
pub fn m_upper(snr: f64, x: f64) -> f64 {
    let a = (2.0 * snr).sqrt();
    2.0 * q_function(a * (FRAC_1_SQRT_2 - x)) - q_function(a * (FRAC_1_SQRT_2 + x)).powi(2)
}

/// `M_(s, x) = 2Q(sqrt(2s)(1/sqrt2 + x)) - Q^2(sqrt(2s)(1/sqrt2 + x))`.
pub fn m_lower(snr: f64, x: f64) -> f64 {
    let q = q_function((2.0 * snr).sqrt() * (FRAC_1_SQRT_2 + x));
    2.0 * q - q * q
}

/// Conventional QPSK SER, `2Q(sqrt s) - Q^2(sqrt s)`.
fn qpsk_ser(snr: f64) -> f64 {
    let q = q_function(snr.sqrt());
    2.0 * q - q * q
}

/// Exact Tx SER with synchronous tag symbols.
pub fn ser_x1_sync(cfg: &SystemConfig) -> Result<f64> {
    let (s, x, _) = link(cfg)?;
    Ok(0.5 * (qpsk_ser(s) + m_integral(s, x)?))
}

/// Closed-form bounds on [`ser_x1_sync`].
pub fn ser_x1_bounds_sync(cfg: &SystemConfig) -> Result<BoundPair> {
    let (s, x, _) = link(cfg)?;
    let base = qpsk_ser(s);
    Ok(BoundPair { lower: 0.5 * (base + m_lower(s, x)), upper: 0.5 * (base + m_upper(s, x)) })
}

/// High-SNR bounds `(Q(sqrt s), Q(sqrt(2s)(1/sqrt2 - x)))`.
pub fn ser_x1_asymptotic_bounds(cfg: &SystemConfig) -> Result<BoundPair> {
    let (s, x, _) = link(cfg)?;
    Ok(BoundPair {
        lower: q_function(s.sqrt()),
        upper: q_function((2.0 * s).sqrt() * (FRAC_1_SQRT_2 - x)),
    })
}

/// `(1 - p)^n` and `1 - (1 - p)^n` without cancellation.
fn success_and_failure(p: f64, n: usize) -> (f64, f64) {
    let l = n as f64 * (-p).ln_1p();
    (l.exp(), -l.exp_m1())
}

/// Probability that the whole Tx sequence of a frame is detected correctly.
pub fn frame_success_probs(cfg: &SystemConfig) -> Result<FrameSuccess> {
    let (s, x, n) = link(cfg)?;
    Ok(FrameSuccess {
        given_bit0: success_and_failure(qpsk_ser(s), n).0,
        given_bit1: BoundPair {
            lower: success_and_failure(m_upper(s, x), n).0,
            upper: success_and_failure(m_lower(s, x), n).0,
        },
    })
}

/// Tag BER bounds with the bisection threshold.
///
/// ```text
/// UB = (e^{-L/2} + 1 - Q1(sqrt l, sqrt L)) (1 - M_)^N / 2 + (1 - (p0 + (1 - M^)^N)/2) / 2
/// LB = (e^{-L/2} p0 + (1 - Q1(sqrt l, sqrt L)) (1 - M^)^N) / 2
/// ```
pub fn ber_x2_bounds_sync(cfg: &SystemConfig) -> Result<BoundPair> {
    let (s, x, n) = link(cfg)?;
    let lambda = lambda_sync(cfg)?;
    let big = threshold_lambda(lambda, &threshold_tolerance())?.threshold;
    let false_alarm = (-0.5 * big).exp();
    let miss = marcum_q1_complement(lambda.sqrt(), big.sqrt())?;
    let (p0, f0) = success_and_failure(qpsk_ser(s), n);
    let (p1_lo, f1_hi) = success_and_failure(m_upper(s, x), n);
    let p1_hi = success_and_failure(m_lower(s, x), n).0;
    Ok(BoundPair {
        lower: 0.5 * (false_alarm * p0 + miss * p1_lo),
        upper: 0.5 * (false_alarm + miss) * p1_hi + 0.25 * (f0 + f1_hi),
    })
}

/// High-SNR tag BER `(e^{-lambda/8} + 1 - Q1(sqrt lambda, sqrt lambda / 2)) / 2`.
pub fn ber_x2_asymptotic(cfg: &SystemConfig) -> Result<f64> {
    let lambda = lambda_sync(cfg)?;
    let miss = marcum_q1_complement(lambda.sqrt(), 0.5 * lambda.sqrt())?;
    Ok(0.5 * ((-lambda / 8.0).exp() + miss))
}

/// Exact Tx SER with a delay offset `alpha`.
pub fn ser_x1_async(cfg: &SystemConfig, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let (s, x, n) = link(cfg)?;
    let nf = n as f64;
    let w_outer = 1.0 / (4.0 * nf) + (nf - 1.0) / (2.0 * nf);
    let w_inner = 1.0 / (4.0 * nf);
    Ok(w_outer * (m_integral(s, 0.0)? + m_integral(s, x)?)
        + w_inner * (m_integral(s, alpha * x)? + m_integral(s, (1.0 - alpha) * x)?))
}

/// High-SNR bounds `(2N-1)/(2N) * (Q(sqrt s), Q(sqrt(2s)(1/sqrt2 - x)))`.
pub fn ser_x1_async_asymptotic_bounds(cfg: &SystemConfig) -> Result<BoundPair> {
    let (_, _, n) = link(cfg)?;
    let w = (2.0 * n as f64 - 1.0) / (2.0 * n as f64);
    let b = ser_x1_asymptotic_bounds(cfg)?;
    Ok(BoundPair { lower: w * b.lower, upper: w * b.upper })
}

/// Lowest SNR at which [`ber_x2_bounds_async`] is evaluated.
pub const ASYNC_BER_MIN_SNR_DB: f64 = 10.0;

/// Tag BER bounds with a delay offset, at `Lambda = lambda/4`.
///
/// ```text
/// LB = (2 + e^{-L/2} + Q1(sqrt l0, sqrt L) - Q1(sqrt l, sqrt L) - Q1(sqrt l1, sqrt L)) / 4
/// UB = LB + (1 - (1 - M^)^N) / 2
/// ```
pub fn ber_x2_bounds_async(cfg: &SystemConfig, alpha: f64) -> Result<BoundPair> {
    check_alpha(alpha)?;
    let (s, x, n) = link(cfg)?;
    if cfg.snr_db() < ASYNC_BER_MIN_SNR_DB - 1e-9 {
        return Err(Error::Unsupported(format!(
            "asynchronous BER bounds are evaluated only for snr >= {ASYNC_BER_MIN_SNR_DB} dB"
        )));
    }
    let lambda = lambda_sync(cfg)?;
    let (l0, l1) = lambda_async(cfg, alpha)?;
    let big = threshold_asymptotic(lambda)?.threshold;
    let b = big.sqrt();
    let lower = 0.25
        * ((-0.5 * big).exp()
            + marcum_q1(l0.sqrt(), b)?
            + marcum_q1_complement(lambda.sqrt(), b)?
            + marcum_q1_complement(l1.sqrt(), b)?);
    let tx_fail = success_and_failure(m_upper(s, x), n).1;
    Ok(BoundPair { lower, upper: lower + 0.5 * tx_fail })
}

/// Tag BER when every Tx symbol is detected correctly, under a delay offset.
///
/// Averages the four (previous, current) bit pairs for the full-frame
/// detector, or the two bit values for the truncated one (the boundary
/// sample is dropped, so `alpha` does not matter there).
pub fn ber_x2_given_tx_correct(cfg: &SystemConfig, alpha: f64, truncated: bool, rule: ThresholdRule) -> Result<f64> {
    check_alpha(alpha)?;
    if truncated {
        let l = lambda_truncated(cfg)?;
        let b = threshold_with(l, rule)?.threshold;
        return Ok(0.5 * ((-0.5 * b).exp() + marcum_q1_complement(l.sqrt(), b.sqrt())?));
    }
    let lambda = lambda_sync(cfg)?;
    let (l0, l1) = lambda_async(cfg, alpha)?;
    let b = threshold_with(lambda, rule)?.threshold;
    let sb = b.sqrt();
    Ok(0.25
        * ((-0.5 * b).exp()
            + marcum_q1(l0.sqrt(), sb)?
            + marcum_q1_complement(lambda.sqrt(), sb)?
            + marcum_q1_complement(l1.sqrt(), sb)?))
}

/// `Lambda(lambda) * 4 / lambda`; tends to one as `lambda` grows.
pub fn threshold_ratio(lambda: f64) -> Result<f64> {
    Ok(threshold_lambda(lambda, &threshold_tolerance())?.threshold * 4.0 / lambda)
}
