//! Riemann zeta at real `s > 1` by direct summation.
//!
//! The partial sum over `n <= N` is completed with the midpoint of the
//! integral-test bracket `[(N+1)^(1-s), N^(1-s)] / (s-1)` for the tail, so the
//! returned error is a true bound (up to rounding) of about `N^-s / 2`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

pub const DEFAULT_TERMS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: f64,
    /// Half-width of the tail bracket.
    pub error: f64,
}

fn cache() -> &'static Mutex<HashMap<u64, ZetaValue>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, ZetaValue>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn zeta(s: f64) -> Result<ZetaValue> {
    if let Some(v) = cache().lock().unwrap().get(&s.to_bits()) {
        return Ok(*v);
    }
    let v = zeta_direct(s, DEFAULT_TERMS)?;
    cache().lock().unwrap().insert(s.to_bits(), v);
    Ok(v)
}

/// `sum_{n <= terms} n^-s` plus the bracketed tail; smallest terms are added first.
pub fn zeta_direct(s: f64, terms: u64) -> Result<ZetaValue> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("zeta needs real s > 1, got {s}")));
    }
    if terms == 0 {
        return Err(Error::NotPositive(0));
    }
    let integer = (s.fract() == 0.0 && s <= 64.0).then_some(s as i32);
    let mut sum = 0.0f64;
    for n in (1..=terms).rev() {
        let x = n as f64;
        sum += match integer {
            Some(k) => x.powi(-k),
            None => x.powf(-s),
        };
    }
    let n = terms as f64;
    let upper = n.powf(1.0 - s) / (s - 1.0);
    let lower = (n + 1.0).powf(1.0 - s) / (s - 1.0);
    Ok(ZetaValue { value: sum + 0.5 * (upper + lower), error: 0.5 * (upper - lower) })
}
