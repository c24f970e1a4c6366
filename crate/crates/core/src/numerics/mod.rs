//! Self-contained numerical kernels.
//!
//! Everything the analytic side of the crate needs and nothing more:
//!
//! - [`special`]: complementary error function, Gaussian tail, binary
//!   entropy, modified Bessel `I0`, 2-dof chi-squared densities, Poisson
//!   probabilities and the `M(N)` combinatorial sum.
//! - [`marcum`]: first-order Marcum Q function and its complement.
//! - [`quad`]: adaptive Gauss–Kronrod quadrature and periodic trapezoid sums.
//! - [`roots`]: bracketed bisection.
//!
//! Accuracy targets are stated on each function and checked in the unit
//! tests against independent references.

pub mod marcum;
pub mod quad;
pub mod roots;
pub mod special;

pub use marcum::{marcum_q1, marcum_q1_complement};
pub use quad::{integrate, periodic_mean};
pub use roots::bisect_root;
pub use special::{
    bessel_i0, bessel_i0e, binary_entropy, chi2_central_pdf_2dof, chi2_noncentral_pdf_2dof, erfc,
    ln_bessel_i0, ln_factorial, ln_poisson_pmf, m_of_n, q_function, BesselI0,
};

use crate::error::{Error, Result};

/// Stopping rule shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target.
    pub rel_tol: f64,
    /// Hard cap on iterations or subdivisions.
    pub max_iters: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-9, max_iters: 1 << 16 }
    }
}

impl Tolerance {
    /// Build a tolerance, rejecting negative or NaN targets.
    pub fn new(abs_tol: f64, rel_tol: f64, max_iters: usize) -> Result<Self> {
        let t = Self { abs_tol, rel_tol, max_iters };
        t.validate()?;
        Ok(t)
    }

    /// Check that both targets are finite and non-negative and not both zero.
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.abs_tol) || !ok(self.rel_tol) || (self.abs_tol == 0.0 && self.rel_tol == 0.0) {
            return Err(Error::Domain(format!(
                "tolerance must be finite and non-negative, got abs={} rel={}",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be positive".into()));
        }
        Ok(())
    }

    /// True when `err` meets the target for an estimate of size `value`.
    pub fn satisfied(&self, err: f64, value: f64) -> bool {
        err <= self.abs_tol.max(self.rel_tol * value.abs())
    }
}
