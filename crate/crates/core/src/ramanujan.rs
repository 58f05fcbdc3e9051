//! Ramanujan sums `c_q(n)`.
//!
//! [`csum`] is the exact divisor-sum form and the one every other module
//! uses. [`csum_exponential`] evaluates the defining character sum in floating
//! point and only exists as an independent check.

use std::f64::consts::TAU;

use crate::arith::{self, SieveTables};
use crate::error::{Error, Result};

/// `c_q(n) = sum_{d | (q,n)} mu(q/d) d`.
pub fn csum(q: u64, n: u64) -> Result<i64> {
    if q == 0 || n == 0 {
        return Err(Error::NotPositive(0));
    }
    let qf = arith::factorize(q)?;
    let g = arith::factorize(arith::gcd(q, n))?;
    // Walk the divisors of g as exponent vectors aligned with q's primes.
    let primes: Vec<(u64, u32, u32)> = qf
        .factors()
        .iter()
        .map(|&(p, a)| (p, a, g.valuation(p)))
        .collect();
    let mut total: i64 = 0;
    let mut exps = vec![0u32; primes.len()];
    loop {
        let mut d: i64 = 1;
        let mut mu: i64 = 1;
        for (&(p, a, _), &b) in primes.iter().zip(&exps) {
            d *= (p as i64).pow(b);
            match a - b {
                0 => {}
                1 => mu = -mu,
                _ => mu = 0,
            }
        }
        total += mu * d;
        // Odometer increment over 0..=valuation_in_g.
        let mut i = 0;
        loop {
            if i == exps.len() {
                return Ok(total);
            }
            if exps[i] < primes[i].2 {
                exps[i] += 1;
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

/// Relative tolerance, per unit of `q`, on the imaginary part of the
/// exponential sum.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// `sum_{1 <= a <= q, (a,q) = 1} exp(2 pi i a n / q)`, rounded to the nearest integer.
pub fn csum_exponential(q: u64, n: u64) -> Result<i64> {
    if q == 0 || n == 0 {
        return Err(Error::NotPositive(0));
    }
    let (mut re, mut im) = (0.0f64, 0.0f64);
    let n_mod = n % q;
    for a in 1..=q {
        if arith::gcd(a, q) != 1 {
            continue;
        }
        let k = ((a as u128 * n_mod as u128) % q as u128) as f64;
        let theta = TAU * k / q as f64;
        re += theta.cos();
        im += theta.sin();
    }
    if im.abs() > IMAGINARY_TOLERANCE * q as f64 {
        return Err(Error::ImaginaryResidue { q, n, residue: im });
    }
    Ok(re.round() as i64)
}

/// `c_q(n)` for `q = 1..=qmax` at a fixed `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsumRow {
    n: u64,
    values: Vec<i64>,
}

impl CsumRow {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn qmax(&self) -> u64 {
        self.values.len() as u64
    }

    /// `c_q(n)`; panics when `q` is outside `1..=qmax`.
    pub fn get(&self, q: u64) -> i64 {
        self.values[q as usize - 1]
    }

    /// Values for `q = 1..=qmax` in order.
    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

pub fn csum_row(qmax: u64, n: u64) -> Result<CsumRow> {
    let tables = arith::build_sieve(qmax)?;
    csum_row_with(&tables, qmax, n)
}

/// Batch row reusing a sieve, via Holder's closed form
/// `c_q(n) = mu(q/g) phi(q) / phi(q/g)` with `g = (q, n)`.
pub fn csum_row_with(tables: &SieveTables, qmax: u64, n: u64) -> Result<CsumRow> {
    if qmax == 0 || n == 0 {
        return Err(Error::NotPositive(0));
    }
    if qmax > tables.limit() {
        return Err(Error::TableTooLarge { requested: qmax, cap: tables.limit() });
    }
    let values = (1..=qmax)
        .map(|q| {
            let r = q / arith::gcd(q, n);
            let mu = tables.mobius(r);
            if mu == 0 {
                0
            } else {
                mu * (tables.euler_phi(q) / tables.euler_phi(r)) as i64
            }
        })
        .collect();
    Ok(CsumRow { n, values })
}

/// `eps_k(n)`: `k` when `k | n`, else 0.
pub fn eps(k: u64, n: u64) -> Result<u64> {
    if k == 0 || n == 0 {
        return Err(Error::NotPositive(0));
    }
    Ok(if n % k == 0 { k } else { 0 })
}
