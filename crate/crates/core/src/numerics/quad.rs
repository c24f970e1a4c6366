//! Quadrature.
//!
//! [`integrate`] is a globally adaptive 7/15-point Gauss–Kronrod scheme: the
//! segment with the largest error estimate is bisected until the summed
//! estimate meets the [`Tolerance`]. Infinite endpoints are mapped onto
//! `[0, 1)` with `x = a + t/(1-t)`. Kronrod nodes are open, so the singular
//! endpoint of the map is never evaluated.
//!
//! [`periodic_mean`] is the trapezoid rule on a full period, which converges
//! geometrically for smooth periodic integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use super::Tolerance;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let s = f(c - h * x) + f(c + h * x);
        kron += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment { a, b, value: kron * h, error: ((kron - gauss) * h).abs() }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: &Tolerance) -> Result<f64> {
    let first = gk15(f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while !tol.satisfied(total_err, total) {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Domain("integrand is not finite on the range".into()));
        }
        if heap.len() >= tol.max_iters {
            return Err(Error::Quadrature { estimate: total, error: total_err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment cannot be split further in double precision.
            return Err(Error::Quadrature { estimate: total, error: total_err });
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to drop drift from the running updates.
    Ok(heap.iter().map(|s| s.value).sum())
}

/// Integrate `f` over `[a, b]`, where either bound may be infinite.
///
/// Returns [`Error::Quadrature`] with the partial estimate when the segment
/// budget `tol.max_iters` runs out.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<f64> {
    tol.validate()?;
    if a.is_nan() || b.is_nan() {
        return Err(Error::Domain("integration bound is NaN".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let jac = |t: f64| {
        let s = 1.0 - t;
        (t / s, 1.0 / (s * s))
    };
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(&f, a, b, tol),
        (true, false) => adaptive(
            &|t: f64| {
                let (u, w) = jac(t);
                f(a + u) * w
            },
            0.0,
            1.0,
            tol,
        ),
        (false, true) => adaptive(
            &|t: f64| {
                let (u, w) = jac(t);
                f(b - u) * w
            },
            0.0,
            1.0,
            tol,
        ),
        (false, false) => adaptive(
            &|t: f64| {
                let (u, w) = jac(t);
                (f(u) + f(-u)) * w
            },
            0.0,
            1.0,
            tol,
        ),
    }
}

/// Mean of a `2 pi`-periodic function over one period with `n` equispaced nodes.
pub fn periodic_mean<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let step = 2.0 * PI / n as f64;
    (0..n).map(|k| f(k as f64 * step)).sum::<f64>() / n as f64
}
