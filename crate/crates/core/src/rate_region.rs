//! Achievable rates and the rate region.
//!
//! All rates are in bits per tag symbol, i.e. per `N` Tx symbols. Notation:
//!
//! | symbol | function |
//! |---|---|
//! | `h_i` | [`h_i`] |
//! | `h_` (lower sum rate) | [`sum_rate_lower_bound`] = [`rate_tx_given_tag`] |
//! | `h^` | `max(h_1, h_0)` = [`TdmaRates::r1_max`] |
//! | `H_` | [`rate_tag_lower_bound`] |
//! | `H^` | [`TdmaRates::r2_upper`] |
//! | `R2max` | [`TdmaRates::r2_max`] |
//!
//! Tx symbols are Gaussian on the rate side. The exact sum rate uses the fact
//! that both components of the received mixture are isotropic, so the
//! entropy integral collapses onto the radius `||y||^2`.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SystemConfig, TxModulation};
use crate::numerics::{binary_entropy, integrate, ln_factorial, m_of_n, Tolerance};

/// A point in the rate plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    /// Tag rate.
    pub r2: f64,
    /// Tx rate.
    pub r1: f64,
}

impl RatePoint {
    fn new(r2: f64, r1: f64) -> Self {
        Self { r2, r1 }
    }
}

/// Corners of the region built from the closed-form rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVertices {
    pub o: RatePoint,
    /// `(0, h_)`.
    pub a1: RatePoint,
    /// `(0, h^)`.
    pub b1: RatePoint,
    /// `(H_, 0)`.
    pub a2: RatePoint,
    /// `(H^, 0)`.
    pub b2: RatePoint,
    /// `(H_, h_ - H_)`. Its `r1` is negative when the region is degenerate.
    pub c: RatePoint,
    /// `(R2max, 0)`.
    pub d: RatePoint,
    /// Set when `H_ > h_`, i.e. `C` falls below the axis.
    pub degenerate: bool,
}

impl RegionVertices {
    /// Inner polygon `o, B1, C, D` in drawing order.
    pub fn polygon(&self) -> [(&'static str, RatePoint); 4] {
        [("o", self.o), ("B1", self.b1), ("C", self.c), ("D", self.d)]
    }

    /// Shoelace area of the inner polygon.
    pub fn area(&self) -> f64 {
        let p = self.polygon();
        let mut twice = 0.0;
        for i in 0..p.len() {
            let (a, b) = (p[i].1, p[(i + 1) % p.len()].1);
            twice += a.r2 * b.r1 - b.r2 * a.r1;
        }
        0.5 * twice.abs()
    }

    /// True when `C` lies strictly beyond the time-sharing line `B1`–`D`.
    pub fn c_outside_tdma(&self) -> bool {
        self.c.r2 / self.d.r2 + self.c.r1 / self.b1.r1 > 1.0
    }
}

/// Boundary slopes at `B1` and at the sum-rate face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopePair {
    /// `h^ / H^`.
    pub r1_slope: f64,
    /// `1 + (h^ - h_) / H_`.
    pub r2_slope: f64,
}

impl SlopePair {
    /// The region is strictly convex iff `r1 > r2`.
    pub fn strictly_convex(&self) -> bool {
        self.r1_slope > self.r2_slope
    }
}

/// Rates of the two time-division phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdmaRates {
    /// Best Tx rate with the tag parked on one symbol.
    pub r1_max: f64,
    /// Tag rate with a constant Tx symbol.
    pub r2_max: f64,
    /// `min(log2(1 + N |g|^2 rho snr), 1)`.
    pub r2_upper: f64,
}

/// Asymptotic regime for [`approx_slopes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `|g|^2 << 1`.
    WeakChannel,
    /// `snr << 1` with antipodal tag symbols.
    LowSnrBpsk,
}

fn quad_tol() -> Tolerance {
    Tolerance { abs_tol: 1e-12, rel_tol: 1e-10, max_iters: 1 << 16 }
}

fn require_gaussian(cfg: &SystemConfig) -> Result<()> {
    match cfg.tx_modulation {
        TxModulation::Gaussian => Ok(()),
        TxModulation::Qpsk => Err(Error::Unsupported("rate expressions assume Gaussian Tx symbols".into())),
    }
}

/// Received power gain `|1 + g sqrt(rho) c|^2` for the tag point of `bit`.
fn path_gain(cfg: &SystemConfig, bit: bool) -> Result<f64> {
    let theta = cfg.fixed_phase()?;
    Ok((1.0 + cfg.g_sqrt_rho(theta) * cfg.tag.point(bit)).norm_sqr())
}

/// `h_i = N log2(1 + |1 + g sqrt(rho) c_i|^2 snr)`; `bit` selects `c1` or `c0`.
pub fn h_i(cfg: &SystemConfig, bit: bool) -> Result<f64> {
    cfg.validate()?;
    Ok(cfg.n as f64 * (path_gain(cfg, bit)? * cfg.snr).ln_1p() / LN_2)
}

/// `I(X1; Y | X2) = (h_1 + h_0) / 2`.
pub fn rate_tx_given_tag(cfg: &SystemConfig) -> Result<f64> {
    Ok(0.5 * (h_i(cfg, true)? + h_i(cfg, false)?))
}

/// Closed-form lower bound of the sum rate, `(h_1 + h_0) / 2`.
pub fn sum_rate_lower_bound(cfg: &SystemConfig) -> Result<f64> {
    rate_tx_given_tag(cfg)
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Mutual information of equiprobable binary input with points `separation`
/// apart in circular complex Gaussian noise of variance `noise_var`.
///
/// With `A = separation^2 / noise_var` the log-likelihood ratio is
/// `N(A, 2A)`, and the mixture-entropy integral reduces to
/// `1 - E[log2(1 + e^{-(A + sqrt(2A) u)})]`, `u ~ N(0, 1)`.
pub fn mi_binary_awgn(noise_var: f64, separation: f64) -> Result<f64> {
    if !(noise_var > 0.0) {
        return Err(Error::Domain(format!("noise variance must be positive, got {noise_var}")));
    }
    if !(separation >= 0.0) || !separation.is_finite() {
        return Err(Error::Domain(format!("separation must be finite and >= 0, got {separation}")));
    }
    let a = separation * separation / noise_var;
    if a == 0.0 {
        return Ok(0.0);
    }
    let s = (2.0 * a).sqrt();
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let loss = integrate(
        |u: f64| norm * (-0.5 * u * u).exp() * softplus(-(a + s * u)),
        f64::NEG_INFINITY,
        f64::INFINITY,
        &Tolerance { abs_tol: 1e-13, rel_tol: 1e-11, max_iters: 1 << 16 },
    )?;
    Ok((1.0 - loss / LN_2).clamp(0.0, 1.0))
}

/// Expectation of `f(s)` for `s ~ Gamma(n, 1)` over its effective support.
fn gamma_expectation<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<f64> {
    let nf = n as f64;
    let lg = ln_factorial(n as u64 - 1);
    let lo = (nf - 40.0 * nf.sqrt() - 10.0).max(0.0);
    let hi = nf + 40.0 * nf.sqrt() + 60.0;
    integrate(
        |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            ((nf - 1.0) * s.ln() - s - lg).exp() * f(s)
        },
        lo,
        hi,
        &quad_tol(),
    )
}

/// `I(X2; Y | X1)`: the binary-input MI averaged over `|X1|^2 ~ Gamma(N, 1)`.
pub fn rate_tag_given_tx(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    require_gaussian(cfg)?;
    let k = cfg.backscatter_gain() * cfg.snr;
    let d = cfg.tag.separation();
    if k == 0.0 || d == 0.0 {
        return Ok(0.0);
    }
    // The inner quadrature can fail only on its budget; surface the first error.
    let failure = std::cell::RefCell::new(None);
    let v = gamma_expectation(cfg.n, |s| {
        mi_binary_awgn(1.0 / (k * s), d).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            0.0
        })
    })?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(v.clamp(0.0, 1.0)),
    }
}

/// Closed-form lower bound `H_` on [`rate_tag_given_tx`].
pub fn rate_tag_lower_bound(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let a = cfg.backscatter_gain() * cfg.snr * cfg.tag.separation().powi(2) / 4.0;
    let mu = (a / (1.0 + a)).sqrt();
    let n = cfg.n as u64;
    let lf = ln_factorial(n - 1);
    let (l_lo, l_hi) = ((0.5 * (1.0 - mu)).ln(), (0.5 * (1.0 + mu)).ln());
    let p: f64 = (0..n)
        .map(|i| (n as f64 * l_lo + ln_factorial(n - 1 + i) - lf - ln_factorial(i) + i as f64 * l_hi).exp())
        .sum();
    let clamped = p.clamp(0.0, 0.5);
    if clamped != p {
        log::warn!("binary entropy argument {p} clamped to {clamped}");
    }
    Ok((1.0 - binary_entropy(clamped)?).clamp(0.0, 1.0))
}

/// Exact sum rate `I(X1, X2; Y) = h(Y) - h(Z)` for Gaussian Tx symbols.
pub fn sum_rate_exact(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    require_gaussian(cfg)?;
    let v = [path_gain(cfg, true)? * cfg.snr + 1.0, path_gain(cfg, false)? * cfg.snr + 1.0];
    let nf = cfg.n as f64;
    let ln_v = [v[0].ln(), v[1].ln()];
    // ln( (1/2) sum_k v_k^{-N} e^{-r/v_k} )
    let ell = |r: f64| {
        let e = [-nf * ln_v[0] - r / v[0], -nf * ln_v[1] - r / v[1]];
        let m = e[0].max(e[1]);
        m + ((e[0] - m).exp() + (e[1] - m).exp()).ln() - LN_2
    };
    let mut mean_ell = 0.0;
    for &vi in &v {
        mean_ell += 0.5 * gamma_expectation(cfg.n, |u| ell(vi * u))?;
    }
    Ok((-mean_ell - nf) / LN_2)
}

/// Time-division rates.
pub fn tdma_rates(cfg: &SystemConfig) -> Result<TdmaRates> {
    let r1_max = h_i(cfg, true)?.max(h_i(cfg, false)?);
    let k = cfg.n as f64 * cfg.backscatter_gain() * cfg.snr;
    let d = cfg.tag.separation();
    let r2_max = if k == 0.0 || d == 0.0 { 0.0 } else { mi_binary_awgn(1.0 / k, d)? };
    let r2_upper = (k.ln_1p() / LN_2).min(1.0);
    Ok(TdmaRates { r1_max, r2_max, r2_upper })
}

/// Corners `o, A1, B1, A2, B2, C, D`.
pub fn region_vertices(cfg: &SystemConfig) -> Result<RegionVertices> {
    let low_h = sum_rate_lower_bound(cfg)?;
    let low_big_h = rate_tag_lower_bound(cfg)?;
    let t = tdma_rates(cfg)?;
    Ok(RegionVertices {
        o: RatePoint::new(0.0, 0.0),
        a1: RatePoint::new(0.0, low_h),
        b1: RatePoint::new(0.0, t.r1_max),
        a2: RatePoint::new(low_big_h, 0.0),
        b2: RatePoint::new(t.r2_upper, 0.0),
        c: RatePoint::new(low_big_h, low_h - low_big_h),
        d: RatePoint::new(t.r2_max, 0.0),
        degenerate: low_big_h > low_h,
    })
}

/// Boundary slopes from the closed-form rates.
pub fn convexity_slopes(cfg: &SystemConfig) -> Result<SlopePair> {
    let h_hi = h_i(cfg, true)?.max(h_i(cfg, false)?);
    let h_lo = sum_rate_lower_bound(cfg)?;
    let big_h_lo = rate_tag_lower_bound(cfg)?;
    let k = cfg.n as f64 * cfg.backscatter_gain() * cfg.snr;
    let big_h_hi = (k.ln_1p() / LN_2).min(1.0);
    Ok(SlopePair { r1_slope: h_hi / big_h_hi, r2_slope: 1.0 + (h_hi - h_lo) / big_h_lo })
}

/// First-order approximations of the slopes in an asymptotic regime.
///
/// Weak channel:
/// `r1 ~ ln2 log2(1 + snr) / (|g|^2 rho snr)` and
/// `r2 ~ L'(1 + snr) |A + B| / ((1/N) (|g|^2 rho / (2 ln 2)) (M(N) |c1 - c0|)^2)`
/// with `A = |g|^2 rho (|c1|^2 - |c0|^2)`, `B = |g| sqrt(rho) Re[(c1 - c0) e^{j theta}]`
/// and `L'(x) = 1 / (x ln 2)`.
///
/// Low SNR, antipodal tag: with `x = g sqrt(rho)`,
/// `r1 ~ max(|1+x|^2, |1-x|^2) / |g|^2 rho` and
/// `r2 ~ 1 + N ln2 | |1+x|^2 - |1-x|^2 | / ((2 M(N))^2 |g|^2 rho)`,
/// so `(r1 - r2) |g|^2 rho` is the closed-form slope gap.
pub fn approx_slopes(cfg: &SystemConfig, regime: Regime) -> Result<SlopePair> {
    cfg.validate()?;
    let theta = cfg.fixed_phase()?;
    let gr = cfg.backscatter_gain();
    let m = m_of_n(cfg.n)?;
    let nf = cfg.n as f64;
    match regime {
        Regime::WeakChannel => {
            let r1 = LN_2 * (cfg.snr.ln_1p() / LN_2) / (gr * cfg.snr);
            let (c1, c0) = (cfg.tag.c1, cfg.tag.c0);
            let a = gr * (c1.norm_sqr() - c0.norm_sqr());
            let b = cfg.backscatter_amplitude() * ((c1 - c0) * Complex64::from_polar(1.0, theta)).re;
            let l_prime = 1.0 / ((1.0 + cfg.snr) * LN_2);
            let den = (gr / (2.0 * LN_2)) * (m * cfg.tag.separation()).powi(2) / nf;
            Ok(SlopePair { r1_slope: r1, r2_slope: l_prime * (a + b).abs() / den })
        }
        Regime::LowSnrBpsk => {
            let x = cfg.g_sqrt_rho(theta);
            let (p, q) = ((1.0 + x).norm_sqr(), (1.0 - x).norm_sqr());
            Ok(SlopePair {
                r1_slope: p.max(q) / gr,
                r2_slope: 1.0 + nf * LN_2 * (p - q).abs() / ((2.0 * m).powi(2) * gr),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rng_stream, Phase, RelativeChannel, TagConstellation};
    use rand::Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::PI;

    fn defaults() -> SystemConfig {
        SystemConfig {
            snr: 10.0,
            rho: 0.5,
            channel: RelativeChannel { magnitude: 0.1f64.sqrt(), phase: Phase::Fixed(PI / 4.0) },
            n: 1,
            tag: TagConstellation::bpsk(),
            tx_modulation: TxModulation::Gaussian,
        }
    }

    fn with(f: impl FnOnce(&mut SystemConfig)) -> SystemConfig {
        let mut c = defaults();
        f(&mut c);
        c
    }

    #[test]
    fn h_i_values() {
        let c = with(|c| c.channel.magnitude = 0.0);
        assert!((h_i(&c, true).unwrap() - 11f64.log2()).abs() < 1e-14);
        // |1 + sqrt(0.05) e^{j pi/4}|^2 = 1 + 2 sqrt(0.05) cos(pi/4) + 0.05, spelled out in components.
        let a = 0.05f64.sqrt() * (0.5f64).sqrt();
        let g1 = (1.0 + a).powi(2) + a * a;
        let g0 = (1.0 - a).powi(2) + a * a;
        let d = defaults();
        assert!((h_i(&d, true).unwrap() - (1.0 + 10.0 * g1).log2()).abs() < 1e-13);
        assert!((h_i(&d, false).unwrap() - (1.0 + 10.0 * g0).log2()).abs() < 1e-13);
        assert!((h_i(&d, true).unwrap() - 3.874_037).abs() < 1e-6);
        assert!((h_i(&d, false).unwrap() - 3.059_653).abs() < 1e-6);
        let silent = with(|c| c.tag.c0 = Complex64::new(0.0, 0.0));
        assert!((h_i(&silent, false).unwrap() - 11f64.log2()).abs() < 1e-14);
    }

    #[test]
    fn h_scales_with_n() {
        let one = h_i(&defaults(), true).unwrap();
        let four = h_i(&with(|c| c.n = 4), true).unwrap();
        assert_eq!(four, 4.0 * one);
    }

    #[test]
    fn tx_rate_average() {
        let same = with(|c| c.tag.c0 = c.tag.c1);
        assert_eq!(rate_tx_given_tag(&same).unwrap(), h_i(&same, true).unwrap());
        let d = defaults();
        let avg = 0.5 * (h_i(&d, true).unwrap() + h_i(&d, false).unwrap());
        assert_eq!(rate_tx_given_tag(&d).unwrap(), avg);
        assert!((avg - 3.466_845).abs() < 1e-6);
    }

    #[test]
    fn binary_mi_limits() {
        assert!(mi_binary_awgn(1e6, 1.0).unwrap() <= 1e-6);
        assert!(mi_binary_awgn(1e-6, 1.0).unwrap() >= 1.0 - 1e-6);
        assert!(mi_binary_awgn(0.0, 1.0).is_err());
        assert_eq!(mi_binary_awgn(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn binary_mi_against_histogram_estimate() {
        // Plug-in MI from a fine histogram of the projection onto c1 - c0.
        let (var, d) = (0.5f64, 2.0f64);
        let sd = (var / 2.0).sqrt();
        let (lo, hi, bins) = (-d / 2.0 - 8.0 * sd, d / 2.0 + 8.0 * sd, 2000usize);
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![[0u64; 2]; bins];
        let mut rng = rng_stream(11, 0);
        let samples = 10_000_000u64;
        for _ in 0..samples {
            let bit = rng.random::<bool>();
            let mean = if bit { d / 2.0 } else { -d / 2.0 };
            let z: f64 = rng.sample(StandardNormal);
            let y = mean + sd * z;
            let b = (((y - lo) / width) as isize).clamp(0, bins as isize - 1) as usize;
            counts[b][bit as usize] += 1;
        }
        let n = samples as f64;
        let mut mi = 0.0;
        for c in &counts {
            let py = (c[0] + c[1]) as f64 / n;
            for &k in c {
                if k > 0 {
                    let pxy = k as f64 / n;
                    mi += pxy * (pxy / (0.5 * py)).log2();
                }
            }
        }
        let v = mi_binary_awgn(var, d).unwrap();
        assert!((v - mi).abs() < 3e-3, "{v} vs {mi}");
    }

    #[test]
    fn tag_rate_limits() {
        assert_eq!(rate_tag_given_tx(&with(|c| c.channel.magnitude = 0.0)).unwrap(), 0.0);
        assert!(rate_tag_given_tx(&with(|c| c.snr = 1e6)).unwrap() >= 0.999);
        assert!(rate_tag_given_tx(&with(|c| c.tx_modulation = TxModulation::Qpsk)).is_err());
        assert!((rate_tag_given_tx(&defaults()).unwrap() - 0.399_116).abs() < 1e-5);
    }

    #[test]
    fn tag_rate_against_mc_expectation() {
        let c = defaults();
        let k = c.backscatter_gain() * c.snr;
        let mut rng = rng_stream(3, 0);
        let draws = 1_000_000;
        // Tabulate the integrand on a fine grid of s, then average by linear interpolation.
        let grid: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
        let vals: Vec<f64> =
            grid.iter().map(|&s| if s == 0.0 { 0.0 } else { mi_binary_awgn(1.0 / (k * s), 2.0).unwrap() }).collect();
        let mut acc = 0.0;
        for _ in 0..draws {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let s = 0.5 * (re * re + im * im);
            let pos = (s / 0.01).min(3999.999);
            let i = pos as usize;
            let f = pos - i as f64;
            acc += vals[i] * (1.0 - f) + vals[i + 1] * f;
        }
        let mc = acc / draws as f64;
        let q = rate_tag_given_tx(&c).unwrap();
        assert!((q - mc).abs() < 2e-3, "{q} vs {mc}");
    }

    #[test]
    fn tag_lower_bound_limits() {
        assert!(rate_tag_lower_bound(&with(|c| c.channel.magnitude = 0.0)).unwrap().abs() < 1e-15);
        assert!(rate_tag_lower_bound(&with(|c| c.snr = 1e8)).unwrap() >= 0.999);
        let d = defaults();
        let lb = rate_tag_lower_bound(&d).unwrap();
        assert!((lb - 0.255_992).abs() < 1e-5);
        assert!(lb <= rate_tag_given_tx(&d).unwrap());
    }

    #[test]
    fn sum_rate_cases() {
        let flat = with(|c| c.channel.magnitude = 0.0);
        assert!((sum_rate_exact(&flat).unwrap() - 11f64.log2()).abs() < 1e-8);
        let quad = with(|c| c.channel.phase = Phase::Fixed(PI / 2.0));
        let gap = sum_rate_exact(&quad).unwrap() - sum_rate_lower_bound(&quad).unwrap();
        assert!(gap.abs() < 1e-6, "{gap}");
        let d = defaults();
        let (e, l) = (sum_rate_exact(&d).unwrap(), sum_rate_lower_bound(&d).unwrap());
        assert!(e >= l && e <= l + 1.0);
    }

    #[test]
    fn sum_rate_against_mc_entropy() {
        // Differential entropy of the mixture by averaging -log f(y) over 10^7 draws.
        let d = defaults();
        let theta = PI / 4.0;
        let gsr = d.g_sqrt_rho(theta);
        let v = [(1.0 + gsr).norm_sqr() * d.snr + 1.0, (1.0 - gsr).norm_sqr() * d.snr + 1.0];
        let mut rng = rng_stream(21, 0);
        let draws = 10_000_000u64;
        let mut acc = 0.0;
        for _ in 0..draws {
            let bit = rng.random::<bool>();
            let var = v[if bit { 0 } else { 1 }];
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let r = 0.5 * var * (re * re + im * im);
            let f = 0.5 * ((-r / v[0]).exp() / (PI * v[0]) + (-r / v[1]).exp() / (PI * v[1]));
            acc -= f.log2();
        }
        let h_y = acc / draws as f64;
        let mc = h_y - (PI * std::f64::consts::E).log2();
        let q = sum_rate_exact(&d).unwrap();
        assert!((q - mc).abs() < 0.01, "{q} vs {mc}");
    }

    #[test]
    fn tdma_cases() {
        let t = tdma_rates(&with(|c| c.channel.magnitude = 0.0)).unwrap();
        assert!((t.r1_max - 11f64.log2()).abs() < 1e-14);
        assert_eq!((t.r2_max, t.r2_upper), (0.0, 0.0));
        let big = tdma_rates(&with(|c| c.snr = 1e8 / 0.05)).unwrap();
        assert!(big.r2_max > 1.0 - 1e-9 && big.r2_upper == 1.0);
        let d = defaults();
        let t = tdma_rates(&d).unwrap();
        assert!(t.r2_max < t.r2_upper);
        assert!(t.r2_max > rate_tag_lower_bound(&d).unwrap());
        assert!((t.r2_max - 0.485_944).abs() < 1e-5);
    }

    #[test]
    fn default_region() {
        let d = defaults();
        let v = region_vertices(&d).unwrap();
        assert!(!v.degenerate);
        assert!(v.a1.r1 <= v.b1.r1 && v.a2.r2 <= v.d.r2 && v.d.r2 <= v.b2.r2);
        assert!((v.area() - 1.276_01).abs() < 1e-4);
        let s = convexity_slopes(&d).unwrap();
        assert!((s.r1_slope - 6.6227).abs() < 1e-3 && (s.r2_slope - 2.5906).abs() < 1e-3);
        assert!(s.strictly_convex());
        assert!(v.c_outside_tdma());
        assert!(convexity_slopes(&with(|c| c.snr = 1e6)).unwrap().strictly_convex());
    }

    #[test]
    fn quadrature_phase_slopes() {
        let c = with(|c| c.channel.phase = Phase::Fixed(PI / 2.0));
        let s = convexity_slopes(&c).unwrap();
        assert!((s.r2_slope - 1.0).abs() < 1e-12);
        assert!(s.strictly_convex());
    }

    #[test]
    fn weak_channel_approximation() {
        let c = with(|c| c.channel.magnitude = 1e-4f64.sqrt());
        let a = approx_slopes(&c, Regime::WeakChannel).unwrap();
        let e = convexity_slopes(&c).unwrap();
        assert!((a.r1_slope / e.r1_slope - 1.0).abs() < 0.05);
        assert!(a.r1_slope / a.r2_slope > 10.0);
    }

    #[test]
    fn low_snr_bpsk_gap() {
        let c = with(|c| c.snr = 1e-3);
        let a = approx_slopes(&c, Regime::LowSnrBpsk).unwrap();
        let gr = c.backscatter_gain();
        let x = c.g_sqrt_rho(PI / 4.0);
        let gap = (a.r1_slope - a.r2_slope) * gr;
        let closed = (1.0 - LN_2) * (1.0 + x).norm_sqr() + LN_2 * (1.0 - x).norm_sqr() - gr;
        assert!((gap - closed).abs() < 1e-12);
        assert!(gap > 0.0);
        let (re, im) = (x.re, x.im);
        assert!(re * re + 2.0 * (1.0 - 2.0 * LN_2) * re + 1.0 + im * im > 0.85);
        assert!(convexity_slopes(&c).unwrap().strictly_convex());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cfg_strategy() -> impl Strategy<Value = SystemConfig> {
            (-5.0f64..30.0, 0.05f64..1.0, 1e-3f64..1.0, 0.0f64..(2.0 * PI), 1usize..4, any::<bool>()).prop_map(
                |(snr_db, rho, g2, theta, n, bpsk)| SystemConfig {
                    snr: crate::model::db_to_linear(snr_db),
                    rho,
                    channel: RelativeChannel { magnitude: g2.sqrt(), phase: Phase::Fixed(theta) },
                    n,
                    tag: if bpsk { TagConstellation::bpsk() } else { TagConstellation::on_off() },
                    tx_modulation: TxModulation::Gaussian,
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn tag_rate_ordering(c in cfg_strategy()) {
                let lb = rate_tag_lower_bound(&c).unwrap();
                let ex = rate_tag_given_tx(&c).unwrap();
                let ub = tdma_rates(&c).unwrap().r2_upper;
                prop_assert!(lb <= ex + 1e-9, "{} > {}", lb, ex);
                prop_assert!(ex <= ub + 1e-9, "{} > {}", ex, ub);
            }

            #[test]
            fn sum_rate_ordering(c in cfg_strategy()) {
                let e = sum_rate_exact(&c).unwrap();
                let l = sum_rate_lower_bound(&c).unwrap();
                prop_assert!(e >= l - 1e-8, "{} < {}", e, l);
                prop_assert!(e <= l + 1.0 + 1e-8);
            }

            #[test]
            fn binary_mi_decreasing(v in 1e-3f64..1e3, f in 1.01f64..10.0, d in 0.1f64..2.0) {
                let a = mi_binary_awgn(v, d).unwrap();
                let b = mi_binary_awgn(v * f, d).unwrap();
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert!(b <= a + 1e-12);
            }

            #[test]
            fn region_polygon_nonnegative(c in cfg_strategy()) {
                let v = region_vertices(&c).unwrap();
                prop_assert!(v.area() >= 0.0);
                prop_assert!(v.a1.r1 <= v.b1.r1 + 1e-12);
                prop_assert!(v.a2.r2 <= v.d.r2 + 1e-12 && v.d.r2 <= v.b2.r2 + 1e-12);
            }
        }
    }
}
