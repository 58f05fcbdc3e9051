//! Local Euler factors and mean values.

use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::TruncationParams;
use crate::arith;
use crate::dirichlet2::{ArithFn1, MultFn2};
use crate::error::{Error, Result};

/// Consecutive negligible terms required before a local sum is accepted.
const STABLE_WINDOW: u32 = 4;
/// Relative size below which a term counts as negligible.
const NEGLIGIBLE: f64 = 1e-17;

/// Primes up to some limit, sharing one sieved list between calls.
pub(crate) struct PrimeList {
    all: Arc<Vec<u64>>,
    count: usize,
}

impl std::ops::Deref for PrimeList {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.all[..self.count]
    }
}

pub(crate) fn primes_to(limit: u64) -> PrimeList {
    static CACHE: OnceLock<Mutex<(u64, Arc<Vec<u64>>)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((0, Arc::new(Vec::new()))));
    let mut guard = cache.lock().unwrap();
    if guard.0 < limit {
        *guard = (limit, Arc::new(arith::primes_up_to(limit)));
    }
    let all = Arc::clone(&guard.1);
    drop(guard);
    let count = all.partition_point(|&p| p <= limit);
    PrimeList { all, count }
}

/// Accumulates `term(d)` for `d = start..=end` until [`STABLE_WINDOW`]
/// consecutive terms are negligible. Reaching `end` is accepted only when the
/// last term is below `tol` relative to the sum.
fn stabilized_sum(
    p: u64,
    start: u32,
    end: u32,
    tol: f64,
    mut term: impl FnMut(u32) -> Result<f64>,
) -> Result<f64> {
    let mut acc = 0.0;
    let mut quiet = 0;
    let mut last = 0.0f64;
    for d in start..=end {
        let t = term(d)?;
        acc += t;
        last = t;
        if t == 0.0 || t.abs() <= NEGLIGIBLE * acc.abs() {
            quiet += 1;
            if quiet >= STABLE_WINDOW {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
    }
    if last == 0.0 || last.abs() <= tol * acc.abs() {
        Ok(acc)
    } else {
        Err(Error::NonStabilizing { p })
    }
}

pub(crate) fn effective_cap(f: &MultFn2<f64>, params: &TruncationParams) -> u32 {
    params.exponent_cap.min(f.exponent_cap())
}

/// `sum_{e1 >= k, e2 >= l} (f * mu)(p^e1, p^e2) / p^(e1 + e2)`, summed in shells of
/// constant `e1 + e2`.
pub fn local_sum(f: &MultFn2<f64>, p: u64, k: u32, l: u32, params: &TruncationParams) -> Result<f64> {
    local_sum_with(f, p, k, l, params, |v| v)
}

/// Same as [`local_sum`] with `|(f * mu)|`, starting from total degree 1.
pub(crate) fn local_abs_sum(f: &MultFn2<f64>, p: u64, params: &TruncationParams) -> Result<f64> {
    let full = local_sum_with(f, p, 0, 0, params, f64::abs)?;
    Ok(full - 1.0)
}

fn local_sum_with(
    f: &MultFn2<f64>,
    p: u64,
    k: u32,
    l: u32,
    params: &TruncationParams,
    map: impl Fn(f64) -> f64,
) -> Result<f64> {
    let cap = effective_cap(f, params);
    if k > cap || l > cap {
        return Err(Error::ExponentCap { p, e1: k, e2: l, cap });
    }
    let inv = 1.0 / p as f64;
    if f.has_diagonal_support() {
        let start = k.max(l);
        if start == 0 {
            let rest = stabilized_sum(p, 1, cap, params.tol, |e| {
                Ok(map(f.local(p, e, e)?) * inv.powi(2 * e as i32))
            })?;
            return Ok(1.0 + rest);
        }
        return stabilized_sum(p, start, cap, params.tol, |e| {
            Ok(map(f.local(p, e, e)?) * inv.powi(2 * e as i32))
        });
    }
    stabilized_sum(p, k + l, 2 * cap, params.tol, |d| {
        let lo = k.max(d.saturating_sub(cap));
        let hi = cap.min(d - l);
        let mut shell = 0.0;
        for e1 in lo..=hi {
            shell += map(f.local(p, e1, d - e1)?);
        }
        Ok(shell * inv.powi(d as i32))
    })
}

/// `sum_{e >= k} (g * mu)(p^e) / p^(weight * e)`, with the `e = 0` term equal to 1.
pub(crate) fn local_sum1(
    g: &ArithFn1<f64>,
    p: u64,
    k: u32,
    weight: i32,
    params: &TruncationParams,
) -> Result<f64> {
    let inv = 1.0 / p as f64;
    let cap = params.exponent_cap;
    if k > cap {
        return Err(Error::ExponentCap { p, e1: k, e2: 0, cap });
    }
    let term = |e: u32| -> Result<f64> {
        let h = g.local(p, e).ok_or(Error::NotMultiplicative)?;
        Ok(h * inv.powi(weight * e as i32))
    };
    if k == 0 {
        Ok(1.0 + stabilized_sum(p, 1, cap, params.tol, term)?)
    } else {
        stabilized_sum(p, k, cap, params.tol, term)
    }
}

/// `sum_{e >= 1} |(g * mu)(p^e)| / p^(weight * e)`.
pub(crate) fn local_abs_sum1(
    g: &ArithFn1<f64>,
    p: u64,
    weight: i32,
    params: &TruncationParams,
) -> Result<f64> {
    let inv = 1.0 / p as f64;
    stabilized_sum(p, 1, params.exponent_cap, params.tol, |e| {
        let h = g.local(p, e).ok_or(Error::NotMultiplicative)?;
        Ok(h.abs() * inv.powi(weight * e as i32))
    })
}

/// Euler product truncated at the prime cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValue {
    pub value: f64,
    /// `|L_p - 1|` for the last prime `p` included.
    pub error_proxy: f64,
    pub prime_cutoff: u64,
    pub primes_used: usize,
}

/// Multiplies the local factors in increasing prime order.
fn product_of(factors: &[f64], prime_cutoff: u64) -> MeanValue {
    let value = factors.iter().product();
    MeanValue {
        value,
        error_proxy: factors.last().map_or(0.0, |l| (l - 1.0).abs()),
        prime_cutoff,
        primes_used: factors.len(),
    }
}

/// `M(f) = prod_{p <= P} sum_{e1, e2 >= 0} (f * mu)(p^e1, p^e2) / p^(e1 + e2)`.
pub fn mean_value(f: &MultFn2<f64>, params: &TruncationParams) -> Result<MeanValue> {
    params.validate()?;
    let primes = primes_to(params.prime_cutoff);
    let factors: Vec<f64> = primes
        .par_iter()
        .map(|&p| local_sum(f, p, 0, 0, params))
        .collect::<Result<_>>()?;
    Ok(product_of(&factors, params.prime_cutoff))
}

/// `prod_{p <= P} sum_{e >= 0} (g * mu)(p^e) / p^(weight * e)` for multiplicative `g`.
pub(crate) fn mean_value1(
    g: &ArithFn1<f64>,
    weight: i32,
    params: &TruncationParams,
) -> Result<MeanValue> {
    params.validate()?;
    if !g.is_multiplicative() {
        return Err(Error::NotMultiplicative);
    }
    let primes = primes_to(params.prime_cutoff);
    let factors: Vec<f64> = primes
        .par_iter()
        .map(|&p| local_sum1(g, p, 0, weight, params))
        .collect::<Result<_>>()?;
    Ok(product_of(&factors, params.prime_cutoff))
}
