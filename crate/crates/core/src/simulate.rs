//! Seeded Monte Carlo estimates.
//!
//! Work is split into batches of [`BATCH_SIZE`] frames. Batch `b` draws from
//! `ChaCha8Rng` stream `b` under the root seed, and partial results are
//! combined in batch order. The output is therefore a pure function of the
//! inputs, whatever the number of rayon workers.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::ThresholdRule;
use crate::detector::{detect_tx, ml_joint_oracle, Strategy, TwoStepDetector};
use crate::error::{Error, Result};
use crate::model::{draw_noise, draw_tag_bit, draw_tx_symbols, random_frame, rng_stream, SystemConfig, TxModulation};

/// Frames per RNG stream.
pub const BATCH_SIZE: u64 = 1 << 14;

/// Minimum sample count for [`run_mi_estimates`].
pub const MI_MIN_SAMPLES: u64 = 10_000;

/// Error frequency with a normal-approximation confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub rate: f64,
    pub trials: u64,
    pub errors: u64,
    /// `1.96 sqrt(rate (1 - rate) / trials)`.
    pub ci_halfwidth_95: f64,
    pub seed: u64,
}

impl ErrorEstimate {
    /// Build from raw counts.
    pub fn from_counts(errors: u64, trials: u64, seed: u64) -> Self {
        let rate = errors as f64 / trials as f64;
        Self { rate, trials, errors, ci_halfwidth_95: 1.96 * (rate * (1.0 - rate) / trials as f64).sqrt(), seed }
    }

    /// Binomial standard error of `rate`.
    pub fn std_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.trials as f64).sqrt()
    }

    /// True when the 95% interval covers `p`.
    pub fn covers(&self, p: f64) -> bool {
        (self.rate - p).abs() <= self.ci_halfwidth_95
    }
}

/// Plug-in information estimates with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiEstimates {
    pub sum_rate: f64,
    pub sum_rate_se: f64,
    pub tag_mi: f64,
    pub tag_mi_se: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Run `f(rng, count)` on every batch in parallel and return results in batch order.
fn batched<T, F>(frames: u64, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> Result<T> + Sync,
{
    if frames == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let batches = frames.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_stream(seed, b);
            f(&mut rng, BATCH_SIZE.min(frames - b * BATCH_SIZE))
        })
        .collect()
}

fn sum_counts(parts: Vec<(u64, u64)>) -> (u64, u64) {
    parts.into_iter().fold((0, 0), |(e, t), (pe, pt)| (e + pe, t + pt))
}

/// Tx symbol error rate of the quadrant detector over `frames` frames.
///
/// `trials` in the result counts symbols, `frames * N`.
pub fn run_ser_x1(cfg: &SystemConfig, alpha: f64, frames: u64, seed: u64) -> Result<ErrorEstimate> {
    cfg.validate()?;
    let parts = batched(frames, seed, |rng, count| {
        let mut errors = 0u64;
        for _ in 0..count {
            let f = random_frame(rng, cfg, alpha)?;
            let est = detect_tx(&f, cfg)?;
            errors += est.iter().zip(&f.tx_truth).filter(|(a, b)| a != b).count() as u64;
        }
        Ok((errors, count * cfg.n as u64))
    })?;
    let (e, t) = sum_counts(parts);
    Ok(ErrorEstimate::from_counts(e, t, seed))
}

/// Tag bit error rate of the two-step receiver with the bisection threshold.
pub fn run_ber_x2(cfg: &SystemConfig, alpha: f64, strategy: Strategy, frames: u64, seed: u64) -> Result<ErrorEstimate> {
    run_ber_x2_with(cfg, alpha, strategy, ThresholdRule::Bisection, frames, seed)
}

/// Tag bit error rate with an explicit threshold rule.
pub fn run_ber_x2_with(
    cfg: &SystemConfig,
    alpha: f64,
    strategy: Strategy,
    rule: ThresholdRule,
    frames: u64,
    seed: u64,
) -> Result<ErrorEstimate> {
    cfg.validate()?;
    let det = TwoStepDetector::new(cfg, strategy, rule)?;
    let parts = batched(frames, seed, |rng, count| {
        let mut errors = 0u64;
        for _ in 0..count {
            let f = random_frame(rng, cfg, alpha)?;
            errors += (det.detect(&f)?.tag_estimate != f.tag_current) as u64;
        }
        Ok((errors, count))
    })?;
    let (e, t) = sum_counts(parts);
    Ok(ErrorEstimate::from_counts(e, t, seed))
}

/// Tx SER of the two-step receiver and of the joint ML search on the same frames.
pub fn run_ser_x1_vs_ml(cfg: &SystemConfig, frames: u64, seed: u64) -> Result<(ErrorEstimate, ErrorEstimate)> {
    cfg.validate()?;
    let parts = batched(frames, seed, |rng, count| {
        let (mut two, mut ml) = (0u64, 0u64);
        for _ in 0..count {
            let f = random_frame(rng, cfg, 0.0)?;
            let a = detect_tx(&f, cfg)?;
            let (b, _) = ml_joint_oracle(&f, cfg)?;
            two += a.iter().zip(&f.tx_truth).filter(|(x, y)| x != y).count() as u64;
            ml += b.iter().zip(&f.tx_truth).filter(|(x, y)| x != y).count() as u64;
        }
        Ok((two, ml))
    })?;
    let (two, ml) = parts.into_iter().fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
    let symbols = frames * cfg.n as u64;
    Ok((ErrorEstimate::from_counts(two, symbols, seed), ErrorEstimate::from_counts(ml, symbols, seed)))
}

fn mean_and_se(parts: &[(f64, f64, u64)]) -> (f64, f64) {
    let (s, s2, n) = parts.iter().fold((0.0, 0.0, 0u64), |(a, b, c), &(x, y, z)| (a + x, b + y, c + z));
    let n = n as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimates of the exact sum rate and of `I(X2; Y | X1)`.
///
/// The sum rate averages `-log2 f_Y(y) - N log2(pi e)` over draws. The tag
/// MI averages the pointwise information `1 - log2(1 + e^{-D})`, where `D` is
/// the log-likelihood margin of the true tag symbol given `x1`.
pub fn run_mi_estimates(cfg: &SystemConfig, samples: u64, seed: u64) -> Result<MiEstimates> {
    cfg.validate()?;
    if cfg.tx_modulation != TxModulation::Gaussian {
        return Err(Error::Unsupported("information estimates assume Gaussian Tx symbols".into()));
    }
    if samples < MI_MIN_SAMPLES {
        return Err(Error::Precondition(format!("need at least {MI_MIN_SAMPLES} samples, got {samples}")));
    }
    let theta = cfg.fixed_phase()?;
    let amp = cfg.snr.sqrt();
    let gains = [amp * (1.0 + cfg.g_sqrt_rho(theta) * cfg.tag.c0), amp * (1.0 + cfg.g_sqrt_rho(theta) * cfg.tag.c1)];
    let var = [gains[0].norm_sqr() + 1.0, gains[1].norm_sqr() + 1.0];
    let n = cfg.n;
    let nf = n as f64;
    let ln_pi_e = (std::f64::consts::PI * std::f64::consts::E).ln();
    let ln2 = std::f64::consts::LN_2;
    let parts = batched(samples, seed, |rng, count| {
        let (mut s, mut s2, mut t, mut t2) = (0.0, 0.0, 0.0, 0.0);
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for _ in 0..count {
            let x1 = draw_tx_symbols(rng, n, TxModulation::Gaussian);
            let bit = draw_tag_bit(rng) as usize;
            let z = draw_noise(rng, n);
            let mut r = 0.0;
            let (mut d_true, mut d_other) = (0.0, 0.0);
            for i in 0..n {
                y[i] = x1[i] * gains[bit] + z[i];
                r += y[i].norm_sqr();
                d_true += z[i].norm_sqr();
                d_other += (y[i] - x1[i] * gains[1 - bit]).norm_sqr();
            }
            // ln f_Y(y) + N ln pi, as a two-term log-sum-exp.
            let e = [-nf * var[0].ln() - r / var[0], -nf * var[1].ln() - r / var[1]];
            let m = e[0].max(e[1]);
            let ln_f = m + ((e[0] - m).exp() + (e[1] - m).exp()).ln() - ln2;
            let sr = (-ln_f - nf * ln_pi_e + nf * std::f64::consts::PI.ln()) / ln2;
            let margin = d_other - d_true;
            let softplus = if margin > 0.0 { (-margin).exp().ln_1p() } else { -margin + margin.exp().ln_1p() };
            let tm = 1.0 - softplus / ln2;
            s += sr;
            s2 += sr * sr;
            t += tm;
            t2 += tm * tm;
        }
        Ok(((s, s2, count), (t, t2, count)))
    })?;
    let (sr, tm): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    let (sum_rate, sum_rate_se) = mean_and_se(&sr);
    let (tag_mi, tag_mi_se) = mean_and_se(&tm);
    Ok(MiEstimates { sum_rate, sum_rate_se, tag_mi, tag_mi_se, samples, seed })
}

/// Run `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send, F: FnOnce() -> T + Send>(threads: usize, f: F) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}
