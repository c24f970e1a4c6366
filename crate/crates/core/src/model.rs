//! Signal model and random draws.
//!
//! Samples are normalised so that the direct-link noise is `CN(0, 1)`:
//!
//! ```text
//! y_i = sqrt(snr) x_{1,i} (1 + |g| e^{j theta} sqrt(rho) m_i) + z_i
//! ```
//!
//! `m_i` is the tag constellation point of the current bit for every sample
//! except the first. With a delay offset `alpha`, the first sample sees
//! `alpha c(previous) + (1 - alpha) c(current)`. One phase draw `theta` covers
//! both tag symbols that touch the frame.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convert decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Phase of the relative backscatter channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Phase {
    /// Known constant phase in radians.
    Fixed(f64),
    /// Uniform on `[0, 2 pi)`, redrawn for every tag symbol.
    Uniform,
}

/// Relative channel `g = |g| e^{j theta}` of the backscatter link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeChannel {
    /// `|g|`.
    pub magnitude: f64,
    /// Phase model.
    pub phase: Phase,
}

/// Binary tag constellation `{c1, c0}` with `|c| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TagConstellation {
    /// Point sent for bit 1.
    pub c1: Complex64,
    /// Point sent for bit 0.
    pub c0: Complex64,
}

impl TagConstellation {
    /// On/off keying, `{1, 0}`.
    pub fn on_off() -> Self {
        Self { c1: Complex64::new(1.0, 0.0), c0: Complex64::new(0.0, 0.0) }
    }

    /// Antipodal keying, `{1, -1}`.
    pub fn bpsk() -> Self {
        Self { c1: Complex64::new(1.0, 0.0), c0: Complex64::new(-1.0, 0.0) }
    }

    /// Constellation point for `bit`.
    pub fn point(&self, bit: bool) -> Complex64 {
        if bit {
            self.c1
        } else {
            self.c0
        }
    }

    /// `|c1 - c0|`.
    pub fn separation(&self) -> f64 {
        (self.c1 - self.c0).norm()
    }

    /// True for `{1, 0}`.
    pub fn is_on_off(&self) -> bool {
        *self == Self::on_off()
    }
}

/// Modulation of the primary (Tx) symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TxModulation {
    /// Unit-energy QPSK, `(+-1 +- j)/sqrt 2`.
    #[serde(rename = "QPSK", alias = "qpsk")]
    Qpsk,
    /// Circularly symmetric `CN(0, 1)`.
    #[serde(rename = "GAUSSIAN", alias = "gaussian")]
    Gaussian,
}

/// Link and frame parameters shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Direct-link SNR, linear.
    pub snr: f64,
    /// Tag reflection coefficient `rho` in `[0, 1]`.
    pub rho: f64,
    /// Relative channel.
    pub channel: RelativeChannel,
    /// Tx symbols per tag symbol.
    pub n: usize,
    /// Tag constellation.
    pub tag: TagConstellation,
    /// Tx symbol alphabet.
    pub tx_modulation: TxModulation,
}

impl SystemConfig {
    /// Check parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.snr > 0.0) || !self.snr.is_finite() {
            return bad(format!("snr must be positive and finite, got {}", self.snr));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad(format!("rho must lie in [0,1], got {}", self.rho));
        }
        if !(self.channel.magnitude >= 0.0) || !self.channel.magnitude.is_finite() {
            return bad(format!("|g| must be finite and >= 0, got {}", self.channel.magnitude));
        }
        if let Phase::Fixed(t) = self.channel.phase {
            if !t.is_finite() {
                return bad("theta must be finite".into());
            }
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        for (name, c) in [("c1", self.tag.c1), ("c0", self.tag.c0)] {
            if !(c.norm() <= 1.0 + 1e-12) {
                return bad(format!("|{name}| must be <= 1, got {}", c.norm()));
            }
        }
        Ok(())
    }

    /// SNR in dB.
    pub fn snr_db(&self) -> f64 {
        linear_to_db(self.snr)
    }

    /// `|g|^2 rho`, the backscatter-to-direct power ratio.
    pub fn backscatter_gain(&self) -> f64 {
        self.channel.magnitude.powi(2) * self.rho
    }

    /// `|g| sqrt(rho)`.
    pub fn backscatter_amplitude(&self) -> f64 {
        self.channel.magnitude * self.rho.sqrt()
    }

    /// `g sqrt(rho)` at phase `theta`.
    pub fn g_sqrt_rho(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(self.backscatter_amplitude(), theta)
    }

    /// The fixed channel phase, or an error when the phase is random.
    pub fn fixed_phase(&self) -> Result<f64> {
        match self.channel.phase {
            Phase::Fixed(t) => Ok(t),
            Phase::Uniform => Err(Error::Config("this quantity needs a fixed channel phase".into())),
        }
    }
}

/// One received frame plus the ground truth that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    /// Received samples `y_1..y_N`.
    pub samples: Vec<Complex64>,
    /// Transmitted Tx symbols.
    pub tx_truth: Vec<Complex64>,
    /// Tag bit of this frame.
    pub tag_current: bool,
    /// Tag bit of the previous frame.
    pub tag_previous: bool,
    /// Delay offset used for the first sample.
    pub alpha: f64,
    /// Channel phase realisation.
    pub theta: f64,
}

/// The four unit-energy QPSK points in quadrant order I, II, III, IV.
pub fn qpsk_alphabet() -> [Complex64; 4] {
    let a = FRAC_1_SQRT_2;
    [Complex64::new(a, a), Complex64::new(-a, a), Complex64::new(-a, -a), Complex64::new(a, -a)]
}

/// Independent RNG stream `stream` under root `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// `n` i.i.d. Tx symbols.
pub fn draw_tx_symbols<R: Rng + ?Sized>(rng: &mut R, n: usize, modulation: TxModulation) -> Vec<Complex64> {
    match modulation {
        TxModulation::Qpsk => {
            let alphabet = qpsk_alphabet();
            (0..n).map(|_| alphabet[rng.random_range(0..4)]).collect()
        }
        TxModulation::Gaussian => (0..n).map(|_| complex_normal(rng)).collect(),
    }
}

/// Equiprobable tag bit.
pub fn draw_tag_bit<R: Rng + ?Sized>(rng: &mut R) -> bool {
    rng.random::<bool>()
}

/// Channel phase for one tag symbol.
pub fn draw_theta<R: Rng + ?Sized>(rng: &mut R, phase: Phase) -> f64 {
    match phase {
        Phase::Fixed(t) => t,
        Phase::Uniform => rng.random::<f64>() * 2.0 * PI,
    }
}

/// `n` i.i.d. `CN(0, 1)` noise samples.
pub fn draw_noise<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

/// Build the received frame from explicit inputs.
pub fn synthesize_frame(
    config: &SystemConfig,
    tx: &[Complex64],
    tag_bit: bool,
    prev_bit: bool,
    alpha: f64,
    noise: &[Complex64],
    theta: f64,
) -> Result<ReceivedFrame> {
    if tx.len() != config.n || noise.len() != config.n {
        return Err(Error::Shape(format!(
            "expected {} Tx symbols and noise samples, got {} and {}",
            config.n,
            tx.len(),
            noise.len()
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha must lie in [0,1], got {alpha}")));
    }
    let amp = config.snr.sqrt();
    let gr = config.g_sqrt_rho(theta);
    let current = config.tag.point(tag_bit);
    let first = config.tag.point(prev_bit) * alpha + current * (1.0 - alpha);
    let samples = tx
        .iter()
        .zip(noise)
        .enumerate()
        .map(|(i, (&x, &z))| {
            let m = if i == 0 { first } else { current };
            x * amp * (1.0 + gr * m) + z
        })
        .collect();
    Ok(ReceivedFrame {
        samples,
        tx_truth: tx.to_vec(),
        tag_current: tag_bit,
        tag_previous: prev_bit,
        alpha,
        theta,
    })
}

/// Draw a complete random frame.
///
/// The draw order is fixed (Tx symbols, current bit, previous bit, phase,
/// noise), so a stream position maps to the same frame for every `alpha`.
pub fn random_frame<R: Rng + ?Sized>(rng: &mut R, config: &SystemConfig, alpha: f64) -> Result<ReceivedFrame> {
    let tx = draw_tx_symbols(rng, config.n, config.tx_modulation);
    let bit = draw_tag_bit(rng);
    let prev = draw_tag_bit(rng);
    let theta = draw_theta(rng, config.channel.phase);
    let noise = draw_noise(rng, config.n);
    synthesize_frame(config, &tx, bit, prev, alpha, &noise, theta)
}

/// Channel phase as written in a config file: radians or `"uniform"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    /// Fixed phase in radians.
    Radians(f64),
    /// A keyword; only `"uniform"` is accepted.
    Keyword(String),
}

/// Tag constellation as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagSpec {
    /// `[re, im]` of the bit-1 point.
    pub c1: [f64; 2],
    /// `[re, im]` of the bit-0 point.
    pub c0: [f64; 2],
}

/// JSON configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub snr_db: f64,
    pub rho: f64,
    pub g_mag2: f64,
    pub theta: ThetaSpec,
    pub n: usize,
    #[serde(default)]
    pub alpha: f64,
    pub tag: TagSpec,
    pub tx_modulation: TxModulation,
}

impl ConfigFile {
    /// Validated system configuration and delay offset.
    pub fn to_system(&self) -> Result<(SystemConfig, f64)> {
        let phase = match &self.theta {
            ThetaSpec::Radians(t) => Phase::Fixed(*t),
            ThetaSpec::Keyword(k) if k.eq_ignore_ascii_case("uniform") => Phase::Uniform,
            ThetaSpec::Keyword(k) => return Err(Error::Config(format!("theta must be a number or \"uniform\", got {k:?}"))),
        };
        if !(self.g_mag2 >= 0.0) {
            return Err(Error::Config(format!("g_mag2 must be >= 0, got {}", self.g_mag2)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must lie in [0,1], got {}", self.alpha)));
        }
        let cfg = SystemConfig {
            snr: db_to_linear(self.snr_db),
            rho: self.rho,
            channel: RelativeChannel { magnitude: self.g_mag2.sqrt(), phase },
            n: self.n,
            tag: TagConstellation {
                c1: Complex64::new(self.tag.c1[0], self.tag.c1[1]),
                c0: Complex64::new(self.tag.c0[0], self.tag.c0[1]),
            },
            tx_modulation: self.tx_modulation,
        };
        cfg.validate()?;
        Ok((cfg, self.alpha))
    }

    /// Inverse of [`ConfigFile::to_system`].
    pub fn from_system(cfg: &SystemConfig, alpha: f64) -> Self {
        Self {
            snr_db: cfg.snr_db(),
            rho: cfg.rho,
            g_mag2: cfg.channel.magnitude.powi(2),
            theta: match cfg.channel.phase {
                Phase::Fixed(t) => ThetaSpec::Radians(t),
                Phase::Uniform => ThetaSpec::Keyword("uniform".into()),
            },
            n: cfg.n,
            alpha,
            tag: TagSpec { c1: [cfg.tag.c1.re, cfg.tag.c1.im], c0: [cfg.tag.c0.re, cfg.tag.c0.im] },
            tx_modulation: cfg.tx_modulation,
        }
    }
}
