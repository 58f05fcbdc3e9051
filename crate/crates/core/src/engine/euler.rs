//! Coefficients from Euler products: two-variable multiplicative functions,
//! gcd families and the one-variable case.

use super::local::{local_sum, local_sum1, mean_value, mean_value1, MeanValue};
use super::TruncationParams;
use crate::arith;
use crate::dirichlet2::{joint_valuations, ArithFn1, MultFn2};
use crate::error::{Error, Result};

fn check_positive(q1: u64, q2: u64) -> Result<()> {
    match (q1, q2) {
        (0, _) | (_, 0) => Err(Error::NotPositive(0)),
        _ => Ok(()),
    }
}

/// Euler-product coefficients of a multiplicative two-variable function, with
/// `M(f)` computed once.
#[derive(Debug, Clone)]
pub struct EulerProduct {
    f: MultFn2<f64>,
    params: TruncationParams,
    mean: MeanValue,
}

impl EulerProduct {
    pub fn new(f: &MultFn2<f64>, params: &TruncationParams) -> Result<Self> {
        let mean = mean_value(f, params)?;
        Ok(Self::with_mean(f, params, mean))
    }

    /// Reuses a mean value computed earlier with the same parameters.
    pub fn with_mean(f: &MultFn2<f64>, params: &TruncationParams, mean: MeanValue) -> Self {
        Self { f: f.clone(), params: params.clone(), mean }
    }

    pub fn mean(&self) -> &MeanValue {
        &self.mean
    }

    /// `M(f) prod_{p | [q1,q2]} T_p(v_p(q1), v_p(q2)) / T_p(0, 0)`.
    pub fn coefficient(&self, q1: u64, q2: u64) -> Result<f64> {
        check_positive(q1, q2)?;
        let m = self.mean.value;
        if q1 == 1 && q2 == 1 {
            return Ok(m);
        }
        if m.abs() <= self.params.tol {
            return Err(Error::MeanValueVanishes(m));
        }
        let mut ratio = 1.0;
        for (p, k, l) in joint_valuations(&arith::factorize(q1)?, &arith::factorize(q2)?) {
            let tail = local_sum(&self.f, p, k, l, &self.params)?;
            if p <= self.params.prime_cutoff {
                let full = local_sum(&self.f, p, 0, 0, &self.params)?;
                if full == 0.0 {
                    return Err(Error::VanishingLocalFactor(p));
                }
                ratio *= tail / full;
            } else {
                // Primes above the cutoff are absent from M(f).
                ratio *= tail;
            }
        }
        Ok(m * ratio)
    }
}

pub fn coeff_euler_product(
    f: &MultFn2<f64>,
    q1: u64,
    q2: u64,
    params: &TruncationParams,
) -> Result<f64> {
    check_positive(q1, q2)?;
    EulerProduct::new(f, params)?.coefficient(q1, q2)
}

/// Coefficients of `F(n1, n2) = g((n1, n2))` from the one-variable data of `g`,
/// using the exponent `e = v_p(q1) max v_p(q2)` at each prime of `[q1, q2]`.
#[derive(Debug, Clone)]
pub struct GcdFamily {
    g: ArithFn1<f64>,
    params: TruncationParams,
    mean: MeanValue,
}

impl GcdFamily {
    pub fn new(g: &ArithFn1<f64>, params: &TruncationParams) -> Result<Self> {
        let mean = mean_value1(g, 2, params)?;
        Ok(Self { g: g.clone(), params: params.clone(), mean })
    }

    /// `M(f) = prod_p (1 + sum_{e >= 1} (g * mu)(p^e) / p^(2e))`.
    pub fn mean(&self) -> &MeanValue {
        &self.mean
    }

    pub fn coefficient(&self, q1: u64, q2: u64) -> Result<f64> {
        check_positive(q1, q2)?;
        let m = self.mean.value;
        if q1 == 1 && q2 == 1 {
            return Ok(m);
        }
        if m.abs() <= self.params.tol {
            return Err(Error::MeanValueVanishes(m));
        }
        let mut ratio = 1.0;
        for (p, k, l) in joint_valuations(&arith::factorize(q1)?, &arith::factorize(q2)?) {
            let tail = local_sum1(&self.g, p, k.max(l), 2, &self.params)?;
            if p <= self.params.prime_cutoff {
                let full = local_sum1(&self.g, p, 0, 2, &self.params)?;
                if full == 0.0 {
                    return Err(Error::VanishingLocalFactor(p));
                }
                ratio *= tail / full;
            } else {
                ratio *= tail;
            }
        }
        Ok(m * ratio)
    }
}

pub fn coeff_gcd_family(
    g: &ArithFn1<f64>,
    q1: u64,
    q2: u64,
    params: &TruncationParams,
) -> Result<f64> {
    check_positive(q1, q2)?;
    GcdFamily::new(g, params)?.coefficient(q1, q2)
}

/// One-variable coefficients `a_q`. Multiplicative functions use the Euler
/// product `prod_p sum_{e >= v_p(q)} (g * mu)(p^e) / p^e`; others the series
/// `sum_{m <= M} (g * mu)(qm) / (qm)`.
#[derive(Debug, Clone)]
pub struct Delange1 {
    g: ArithFn1<f64>,
    params: TruncationParams,
    mean: Option<MeanValue>,
}

impl Delange1 {
    pub fn new(g: &ArithFn1<f64>, params: &TruncationParams) -> Result<Self> {
        params.validate()?;
        let mean = if g.is_multiplicative() { Some(mean_value1(g, 1, params)?) } else { None };
        Ok(Self { g: g.clone(), params: params.clone(), mean })
    }

    /// The Euler-product mean value; `None` for non-multiplicative functions.
    pub fn mean(&self) -> Option<&MeanValue> {
        self.mean.as_ref()
    }

    pub fn coefficient(&self, q: u64) -> Result<f64> {
        if q == 0 {
            return Err(Error::NotPositive(0));
        }
        let Some(mean) = &self.mean else {
            return self.series(q);
        };
        let qf = arith::factorize(q)?;
        if qf.factors().is_empty() {
            return Ok(mean.value);
        }
        let mut value = mean.value;
        for &(p, k) in qf.factors() {
            let tail = local_sum1(&self.g, p, k, 1, &self.params)?;
            if p <= self.params.prime_cutoff {
                let full = local_sum1(&self.g, p, 0, 1, &self.params)?;
                if full == 0.0 {
                    // A vanishing factor cannot be divided out; rebuild the product.
                    return self.product_without_division(&qf);
                }
                value *= tail / full;
            } else {
                value *= tail;
            }
        }
        Ok(value)
    }

    fn product_without_division(&self, qf: &arith::Factorization) -> Result<f64> {
        let primes = super::local::primes_to(self.params.prime_cutoff);
        let mut value = 1.0;
        for &p in primes.iter() {
            value *= local_sum1(&self.g, p, qf.valuation(p), 1, &self.params)?;
        }
        for &(p, k) in qf.factors() {
            if p > self.params.prime_cutoff {
                value *= local_sum1(&self.g, p, k, 1, &self.params)?;
            }
        }
        Ok(value)
    }

    fn series(&self, q: u64) -> Result<f64> {
        let mut acc = 0.0;
        for m in 1..=self.params.sum_cutoff {
            let n = q.checked_mul(m).ok_or(Error::Overflow("q*m in the one-variable series"))?;
            acc += self.g.star_mu(n)? / n as f64;
        }
        Ok(acc)
    }
}

pub fn delange1_coeff(g: &ArithFn1<f64>, q: u64, params: &TruncationParams) -> Result<f64> {
    if q == 0 {
        return Err(Error::NotPositive(0));
    }
    Delange1::new(g, params)?.coefficient(q)
}
