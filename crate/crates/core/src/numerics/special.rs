//! Special functions.
//!
//! # Accuracy
//!
//! | function | target |
//! |---|---|
//! | [`erfc`], [`q_function`] | ~1e-14 relative for `|x| <= 8`, graceful underflow beyond |
//! | [`bessel_i0e`], [`ln_bessel_i0`] | ~1e-14 relative |
//! | [`ln_poisson_pmf`] | ~1e-14 absolute in the log |
//!
//! `erfc` switches between a positive-term series for `erf` (no cancellation)
//! and a Lentz continued fraction for the tail. `I0` uses its power series up
//! to `x = 30` and the Hankel asymptotic series above. Poisson probabilities use
//! the saddle-point form (Stirling remainder plus the `bd0` deviance term), so
//! they stay accurate when the mean is in the millions.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const ERFC_CF_SWITCH: f64 = 1.5;
const I0_SERIES_MAX: f64 = 30.0;
/// Above this argument `I0` is reported in the log domain.
pub const I0_DIRECT_MAX: f64 = 700.0;

/// Complementary error function `erfc(x) = 2/sqrt(pi) * int_x^inf e^{-t^2} dt`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < ERFC_CF_SWITCH {
        1.0 - erf_series(x)
    } else {
        (-x * x).exp() * FRAC_1_SQRT_PI / erfc_cf(x)
    }
}

/// `erf(x)` for `x >= 0` from `2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1} / (2n+1)!!`.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * (-x2).exp() * sum
}

/// Denominator `x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))` by modified Lentz.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..5000 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// Gaussian tail `Q(x) = P(N(0,1) > x) = erfc(x / sqrt 2) / 2`.
///
/// Values below the smallest positive double underflow to zero.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Binary entropy in bits. Returns `0` at `p = 0` and `p = 1`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("binary entropy needs p in [0,1], got {p}")));
    }
    let h = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    Ok(h(p) + h(1.0 - p))
}

/// Exponentially scaled Bessel function `e^{-|x|} I0(x)`.
pub fn bessel_i0e(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_MAX {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        // Hankel series; terms shrink until k ~ 2x, far past double precision here.
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            let next = term * (2.0f64 * k - 1.0).powi(2) / (8.0 * k * x);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// Natural log of `I0(x)`, finite for every finite `x`.
pub fn ln_bessel_i0(x: f64) -> f64 {
    x.abs() + bessel_i0e(x).ln()
}

/// `I0(x)` in direct form, or its logarithm when the value would overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BesselI0 {
    /// `I0(x)` itself, returned for `|x| <= I0_DIRECT_MAX`.
    Direct(f64),
    /// `ln I0(x)`, returned above the threshold.
    Log(f64),
}

impl BesselI0 {
    /// Natural log of the value.
    pub fn ln(self) -> f64 {
        match self {
            Self::Direct(v) => v.ln(),
            Self::Log(l) => l,
        }
    }

    /// The value, possibly `inf` for the log branch.
    pub fn value(self) -> f64 {
        match self {
            Self::Direct(v) => v,
            Self::Log(l) => l.exp(),
        }
    }
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> Result<BesselI0> {
    if x.is_nan() {
        return Err(Error::Domain("bessel_i0 of NaN".into()));
    }
    let ax = x.abs();
    if ax <= I0_DIRECT_MAX {
        Ok(BesselI0::Direct(bessel_i0e(ax) * ax.exp()))
    } else {
        Ok(BesselI0::Log(ln_bessel_i0(ax)))
    }
}

/// Central chi-squared density with two degrees of freedom, `e^{-x/2}/2`.
pub fn chi2_central_pdf_2dof(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        0.5 * (-0.5 * x).exp()
    }
}

/// Noncentral chi-squared density with two degrees of freedom and
/// noncentrality `lambda`: `e^{-(x+lambda)/2} I0(sqrt(lambda x)) / 2`.
pub fn chi2_noncentral_pdf_2dof(x: f64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("noncentrality must be finite and >= 0, got {lambda}")));
    }
    if x < 0.0 {
        return Ok(0.0);
    }
    let z = (lambda * x).sqrt();
    let d = x.sqrt() - lambda.sqrt();
    Ok(0.5 * (-0.5 * d * d).exp() * bessel_i0e(z))
}

/// `ln n! - [(n + 1/2) ln n - n + ln sqrt(2 pi)]`.
fn stirlerr(n: u64) -> f64 {
    if n < 16 {
        let nf = n as f64;
        let lf: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
        return if n == 0 { -LN_SQRT_2PI } else { lf - (nf + 0.5) * nf.ln() + nf - LN_SQRT_2PI };
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let nn = (n as f64).powi(2);
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n as f64
}

/// Deviance term `x ln(x/m) + m - x`, computed without cancellation near `x = m`.
fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    (nf + 0.5) * nf.ln() - nf + LN_SQRT_2PI + stirlerr(n)
}

/// `ln P(K = k)` for `K ~ Poisson(mu)`. Returns `-inf` for impossible outcomes.
pub fn ln_poisson_pmf(k: u64, mu: f64) -> f64 {
    if mu == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return -mu;
    }
    let kf = k as f64;
    -0.5 * (2.0 * PI * kf).ln() - stirlerr(k) - bd0(kf, mu)
}

/// Largest `n` accepted by [`m_of_n`].
pub const M_OF_N_MAX: usize = 100_000;

/// `M(N) = 2^{-N} sum_{i<N} C(N-1+i, i) (N-i) / 2^i`.
///
/// The sum appears in the weak-channel expansion of the tag lower-bound
/// rate. Terms are formed in the log domain, so large `n` does not overflow.
pub fn m_of_n(n: usize) -> Result<f64> {
    if n == 0 || n > M_OF_N_MAX {
        return Err(Error::Domain(format!("m_of_n needs 1 <= n <= {M_OF_N_MAX}, got {n}")));
    }
    let nn = n as u64;
    let lf_nm1 = ln_factorial(nn - 1);
    let sum: f64 = (0..nn)
        .map(|i| {
            let ln_c = ln_factorial(nn - 1 + i) - lf_nm1 - ln_factorial(i);
            (ln_c - (nn + i) as f64 * LN_2 + ((nn - i) as f64).ln()).exp()
        })
        .sum();
    Ok(sum)
}
