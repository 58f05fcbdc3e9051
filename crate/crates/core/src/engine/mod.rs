//! Ramanujan-Fourier coefficients by three routes: truncated double sums,
//! Euler products and the gcd-family formula, plus mean values and
//! convergence-condition diagnostics.
//!
//! Everything here works in `f64`. Euler products are truncated at the prime
//! cutoff and each local factor at the exponent cap with a stabilization
//! check; the reported errors are proxies, not proofs.

mod condition;
mod double_sum;
mod euler;
mod local;
mod table;

pub use condition::{condition_check, condition_check1, ConditionReport, ConditionVerdict};
pub use double_sum::{coeff_double_sum, coeff_double_sum_fn, DoubleSum, DoubleSumPlan};
pub use euler::{coeff_euler_product, coeff_gcd_family, delange1_coeff, Delange1, EulerProduct, GcdFamily};
pub use local::{local_sum, mean_value, MeanValue};
pub use table::{build_coeff_table, ClosedForm, CoeffEntry, CoeffSource, CoeffTable, Method};

pub(crate) use local::primes_to;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationParams {
    /// Largest prime in Euler products.
    pub prime_cutoff: u64,
    /// Bound on each of `m1`, `m2` in double sums.
    pub sum_cutoff: u64,
    /// Largest `q` in truncated series.
    pub series_qmax: u64,
    /// Largest exponent visited in a local factor.
    pub exponent_cap: u32,
    pub tol: f64,
}

impl Default for TruncationParams {
    fn default() -> Self {
        Self {
            prime_cutoff: 1_000_000,
            sum_cutoff: 10_000,
            series_qmax: 2048,
            exponent_cap: crate::dirichlet2::DEFAULT_EXPONENT_CAP,
            tol: 1e-9,
        }
    }
}

impl TruncationParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("prime cutoff", self.prime_cutoff),
            ("sum cutoff", self.sum_cutoff),
            ("series qmax", self.series_qmax),
            ("exponent cap", self.exponent_cap as u64),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be at least 1")));
            }
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}
