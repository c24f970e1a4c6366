//! Two-step joint detection and a small-`N` maximum-likelihood reference.
//!
//! Step one decides each Tx symbol with the usual QPSK quadrant rule. Step
//! two removes the decided direct-link component, combines the residual with
//! maximum-ratio weights and runs an energy detector on
//! `Xi = 2 |Y~|^2`:
//!
//! ```text
//! Y~ = sum_i conj(x^_i) (y_i - sqrt(snr) x^_i) / ||x^||
//! ```
//!
//! The cancellation uses the *estimated* symbols, so Tx errors leak into the
//! tag statistic exactly as they would in a receiver. The detector is not
//! told the delay offset.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytics::{lambda_sync, lambda_truncated, threshold_with, ThresholdResult, ThresholdRule};
use crate::error::{Error, Result};
use crate::model::{qpsk_alphabet, Phase, ReceivedFrame, SystemConfig, TxModulation};

/// Which samples feed the tag statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// All `N` samples.
    Full,
    /// Samples `2..N`; the boundary sample is discarded.
    Truncated,
}

/// Output of one pass of the two-step detector.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub tx_estimates: Vec<Complex64>,
    pub tag_estimate: bool,
    /// `Xi = 2 |Y~|^2`.
    pub test_statistic: f64,
    pub threshold_used: f64,
}

/// Quadrant decision for one sample.
pub fn qpsk_decide(y: Complex64) -> Complex64 {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(if y.re >= 0.0 { a } else { -a }, if y.im >= 0.0 { a } else { -a })
}

fn require_qpsk(cfg: &SystemConfig) -> Result<()> {
    if cfg.tx_modulation != TxModulation::Qpsk {
        return Err(Error::Unsupported("the detector expects QPSK Tx symbols".into()));
    }
    Ok(())
}

/// Symbol-by-symbol Tx decisions.
pub fn detect_tx(frame: &ReceivedFrame, cfg: &SystemConfig) -> Result<Vec<Complex64>> {
    require_qpsk(cfg)?;
    Ok(frame.samples.iter().map(|&y| qpsk_decide(y)).collect())
}

fn mrc(samples: &[Complex64], tx_est: &[Complex64], snr: f64) -> Result<Complex64> {
    if samples.len() != tx_est.len() {
        return Err(Error::Shape(format!("{} samples but {} Tx estimates", samples.len(), tx_est.len())));
    }
    let norm = tx_est.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateInput("Tx estimate vector has zero norm".into()));
    }
    let amp = snr.sqrt();
    let acc: Complex64 = samples.iter().zip(tx_est).map(|(&y, &x)| x.conj() * (y - x * amp)).sum();
    Ok(acc / norm)
}

/// Interference cancellation followed by maximum-ratio combining.
pub fn cancel_and_mrc(frame: &ReceivedFrame, tx_est: &[Complex64], cfg: &SystemConfig) -> Result<Complex64> {
    mrc(&frame.samples, tx_est, cfg.snr)
}

/// Energy detector: `true` iff `2 |y~|^2 >= threshold`.
pub fn detect_tag(y_tilde: Complex64, threshold: f64) -> Result<bool> {
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!("threshold must be positive, got {threshold}")));
    }
    Ok(2.0 * y_tilde.norm_sqr() >= threshold)
}

/// Tag statistic over samples `2..N` only.
pub fn truncated_statistic(frame: &ReceivedFrame, tx_est: &[Complex64], cfg: &SystemConfig) -> Result<Complex64> {
    if cfg.n < 2 || frame.samples.len() < 2 {
        return Err(Error::Unsupported("truncated detection needs n >= 2".into()));
    }
    if tx_est.len() != frame.samples.len() {
        return Err(Error::Shape(format!("{} samples but {} Tx estimates", frame.samples.len(), tx_est.len())));
    }
    mrc(&frame.samples[1..], &tx_est[1..], cfg.snr)
}

/// Tag decision that ignores the boundary sample.
pub fn detect_tag_truncated(
    frame: &ReceivedFrame,
    tx_est: &[Complex64],
    cfg: &SystemConfig,
    threshold: f64,
) -> Result<bool> {
    detect_tag(truncated_statistic(frame, tx_est, cfg)?, threshold)
}

/// The complete two-step receiver with a fixed threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStepDetector {
    pub config: SystemConfig,
    pub strategy: Strategy,
    pub threshold: ThresholdResult,
}

impl TwoStepDetector {
    /// Compute `lambda` for the strategy and the threshold under `rule`.
    pub fn new(config: &SystemConfig, strategy: Strategy, rule: ThresholdRule) -> Result<Self> {
        require_qpsk(config)?;
        let lambda = match strategy {
            Strategy::Full => lambda_sync(config)?,
            Strategy::Truncated => lambda_truncated(config)?,
        };
        if lambda == 0.0 {
            return Err(Error::Config("tag detection needs |g|^2 rho > 0".into()));
        }
        Ok(Self { config: *config, strategy, threshold: threshold_with(lambda, rule)? })
    }

    /// Run both steps on one frame.
    pub fn detect(&self, frame: &ReceivedFrame) -> Result<DetectionResult> {
        let tx_estimates = detect_tx(frame, &self.config)?;
        let y = match self.strategy {
            Strategy::Full => cancel_and_mrc(frame, &tx_estimates, &self.config)?,
            Strategy::Truncated => truncated_statistic(frame, &tx_estimates, &self.config)?,
        };
        let t = self.threshold.threshold;
        Ok(DetectionResult {
            tx_estimates,
            tag_estimate: detect_tag(y, t)?,
            test_statistic: 2.0 * y.norm_sqr(),
            threshold_used: t,
        })
    }
}

/// Largest `N` accepted by [`ml_joint_oracle`].
pub const ML_MAX_N: usize = 4;
/// Phase nodes used to marginalise an unknown channel phase.
pub const ML_PHASE_NODES: usize = 256;

/// Exhaustive joint maximum-likelihood decision over `4^N x 2` hypotheses.
///
/// An unknown phase is integrated out with a periodic rule on
/// [`ML_PHASE_NODES`] points; a known phase is used directly.
pub fn ml_joint_oracle(frame: &ReceivedFrame, cfg: &SystemConfig) -> Result<(Vec<Complex64>, bool)> {
    require_qpsk(cfg)?;
    let n = frame.samples.len();
    if n > ML_MAX_N || cfg.n > ML_MAX_N {
        return Err(Error::Unsupported(format!("ML search limited to n <= {ML_MAX_N}")));
    }
    if n != cfg.n {
        return Err(Error::Shape(format!("frame has {n} samples, config says {}", cfg.n)));
    }
    let alphabet = qpsk_alphabet();
    let thetas: Vec<f64> = match cfg.channel.phase {
        Phase::Fixed(t) => vec![t],
        Phase::Uniform => {
            (0..ML_PHASE_NODES).map(|k| 2.0 * std::f64::consts::PI * k as f64 / ML_PHASE_NODES as f64).collect()
        }
    };
    let amp = cfg.snr.sqrt();
    let hypotheses = 4usize.pow(n as u32);
    let mut best: Option<(f64, usize, bool)> = None;
    for bit in [false, true] {
        let c = cfg.tag.point(bit);
        // ll[k][i][s] = -|y_i - sqrt(snr) a_s (1 + g sqrt(rho) c)|^2 at phase node k.
        let ll: Vec<[[f64; 4]; ML_MAX_N]> = thetas
            .iter()
            .map(|&t| {
                let gain = amp * (1.0 + cfg.g_sqrt_rho(t) * c);
                let mut row = [[0.0; 4]; ML_MAX_N];
                for (i, &y) in frame.samples.iter().enumerate() {
                    for (s, &a) in alphabet.iter().enumerate() {
                        row[i][s] = -(y - a * gain).norm_sqr();
                    }
                }
                row
            })
            .collect();
        let mut per_theta = vec![0.0; thetas.len()];
        for h in 0..hypotheses {
            for (k, row) in ll.iter().enumerate() {
                let mut code = h;
                let mut acc = 0.0;
                for r in row.iter().take(n) {
                    acc += r[code % 4];
                    code /= 4;
                }
                per_theta[k] = acc;
            }
            let m = per_theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let score = m + per_theta.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            if best.is_none_or(|(b, _, _)| score > b) {
                best = Some((score, h, bit));
            }
        }
    }
    let (_, mut code, bit) = best.expect("at least one hypothesis");
    let mut tx = Vec::with_capacity(n);
    for _ in 0..n {
        tx.push(alphabet[code % 4]);
        code /= 4;
    }
    Ok((tx, bit))
}
