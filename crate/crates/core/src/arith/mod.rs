//! Scalar arithmetic functions and prime-power factorizations.
//!
//! Everything here works on `u64` with checked multiplication; an overflow is
//! reported as [`Error::Overflow`] instead of wrapping. The `_int` variants of
//! the parameterized functions give exact integers for non-negative integer
//! exponents, the `f64` variants route through them whenever `s` is such an
//! integer.

mod sieve;

use std::sync::OnceLock;

pub use sieve::{build_sieve, build_sieve_capped, primes_up_to, SieveTables, DEFAULT_SIEVE_CAP};

use crate::error::{Error, Result};

/// Prime-power decomposition of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub(crate) fn from_parts(value: u64, factors: Vec<(u64, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        Self { value, factors }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(p, e)` pairs, primes strictly increasing, every `e >= 1`.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Exponent of `p` in the value, 0 when `p` does not divide it.
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn radical(&self) -> u64 {
        self.factors.iter().map(|&(p, _)| p).product()
    }
}

const SMALL_PRIME_LIMIT: u64 = 1 << 16;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(SMALL_PRIME_LIMIT))
}

fn check_positive(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::NotPositive(0))
    } else {
        Ok(())
    }
}

/// Trial division against the cached primes below 2^16, then by odd numbers.
pub fn factorize(n: u64) -> Result<Factorization> {
    check_positive(n)?;
    let mut rest = n;
    let mut factors = Vec::new();
    let mut push_divisor = |rest: &mut u64, p: u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        push_divisor(&mut rest, p);
    }
    if rest > 1 && rest >= SMALL_PRIME_LIMIT * SMALL_PRIME_LIMIT {
        let mut d = SMALL_PRIME_LIMIT + 1;
        while d.saturating_mul(d) <= rest {
            push_divisor(&mut rest, d);
            d += 2;
        }
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization::from_parts(n, factors))
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = factorize(n)?;
    let mut out = vec![1u64];
    for &(p, e) in f.factors() {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::Overflow("lcm"))
}

pub(crate) fn checked_pow(base: u64, exp: u32, what: &'static str) -> Result<u64> {
    base.checked_pow(exp).ok_or(Error::Overflow(what))
}

pub fn mobius(n: u64) -> Result<i64> {
    let f = factorize(n)?;
    Ok(mobius_of(&f))
}

pub(crate) fn mobius_of(f: &Factorization) -> i64 {
    if f.is_squarefree() {
        if f.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

pub fn euler_phi(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(phi_of(&f))
}

pub(crate) fn phi_of(f: &Factorization) -> u64 {
    f.factors
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product()
}

pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.factors.len() as u32)
}

/// Number of divisors.
pub fn tau(n: u64) -> Result<u64> {
    Ok(factorize(n)?.factors.iter().map(|&(_, e)| e as u64 + 1).product())
}

/// `phi_s(n) = n^s prod_{p|n} (1 - p^-s)` for a non-negative integer `s`.
pub fn phi_s_int(n: u64, s: u32) -> Result<u64> {
    let f = factorize(n)?;
    let mut acc: u64 = 1;
    for &(p, e) in &f.factors {
        let ps = checked_pow(p, s, "phi_s")?;
        let head = checked_pow(ps, e - 1, "phi_s")?;
        let local = head.checked_mul(ps - 1).ok_or(Error::Overflow("phi_s"))?;
        acc = acc.checked_mul(local).ok_or(Error::Overflow("phi_s"))?;
    }
    Ok(acc)
}

fn as_small_nonneg_int(s: f64) -> Option<u32> {
    (s >= 0.0 && s.fract() == 0.0 && s <= 64.0).then_some(s as u32)
}

pub fn phi_s(n: u64, s: f64) -> Result<f64> {
    if let Some(k) = as_small_nonneg_int(s) {
        if let Ok(v) = phi_s_int(n, k) {
            return Ok(v as f64);
        }
    }
    let f = factorize(n)?;
    let prod: f64 = f.primes().map(|p| 1.0 - (p as f64).powf(-s)).product();
    Ok((n as f64).powf(s) * prod)
}

/// `sigma_s(n) = sum_{d|n} d^s` for a non-negative integer `s`; `s = 0` is tau.
pub fn sigma_s_int(n: u64, s: u32) -> Result<u64> {
    let f = factorize(n)?;
    let mut acc: u64 = 1;
    for &(p, e) in &f.factors {
        let ps = checked_pow(p, s, "sigma_s")?;
        let mut local: u64 = 0;
        let mut term: u64 = 1;
        for k in 0..=e {
            local = local.checked_add(term).ok_or(Error::Overflow("sigma_s"))?;
            if k < e {
                term = term.checked_mul(ps).ok_or(Error::Overflow("sigma_s"))?;
            }
        }
        acc = acc.checked_mul(local).ok_or(Error::Overflow("sigma_s"))?;
    }
    Ok(acc)
}

pub fn sigma_s(n: u64, s: f64) -> Result<f64> {
    if let Some(k) = as_small_nonneg_int(s) {
        if let Ok(v) = sigma_s_int(n, k) {
            return Ok(v as f64);
        }
    }
    let f = factorize(n)?;
    Ok(f.factors
        .iter()
        .map(|&(p, e)| {
            let ps = (p as f64).powf(s);
            (0..=e).map(|k| ps.powi(k as i32)).sum::<f64>()
        })
        .product())
}

/// `prod_{p|n} (p^2 + p - 1)`; depends only on the radical of `n`.
pub fn phi_tilde(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    let result = f.primes().try_fold(1u64, |acc, p| {
        p.checked_mul(p)
            .and_then(|pp| pp.checked_add(p - 1))
            .and_then(|local| acc.checked_mul(local))
            .ok_or(Error::Overflow("phi_tilde"))
    });
    result
}

/// Non-principal character mod 4.
pub fn chi4(n: u64) -> i64 {
    match n % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Local table of `r(n)/4` at a prime power: 1 at p = 2, `e + 1` for
/// p = 1 mod 4, and the parity indicator of `e` for p = 3 mod 4.
pub fn r2_quarter_local(p: u64, e: u32) -> u64 {
    match p % 4 {
        1 => e as u64 + 1,
        3 => u64::from(e % 2 == 0),
        _ => 1,
    }
}

/// Representations of `n` as an ordered sum of two integer squares, from the
/// multiplicative local table.
pub fn r2(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    let quarter = f
        .factors
        .iter()
        .try_fold(1u64, |acc, &(p, e)| acc.checked_mul(r2_quarter_local(p, e)))
        .ok_or(Error::Overflow("r2"))?;
    quarter.checked_mul(4).ok_or(Error::Overflow("r2"))
}

/// Lattice-point count `#{(a, b) in Z^2 : a^2 + b^2 = n}` by scanning `a`.
pub fn r2_lattice(n: u64) -> Result<u64> {
    check_positive(n)?;
    let mut count = 0u64;
    let mut a: u64 = 0;
    while a * a <= n {
        let rest = n - a * a;
        let b = isqrt(rest);
        if b * b == rest {
            // Signs of a and b; the a = 0 or b = 0 cases have one fewer sign choice.
            let sa = if a == 0 { 1 } else { 2 };
            let sb = if b == 0 { 1 } else { 2 };
            count += sa * sb;
        }
        a += 1;
    }
    Ok(count)
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while n > 1 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(97).unwrap().factors(), &[(97, 1)]);
        assert_eq!(factorize(0), Err(Error::NotPositive(0)));
    }

    #[test]
    fn factorize_matches_trial_division() {
        for n in 1..3000 {
            assert_eq!(factorize(n).unwrap().factors(), brute_factor(n).as_slice(), "n={n}");
        }
    }

    #[test]
    fn factorize_beyond_cached_primes() {
        let p = 4_294_967_311u64; // smallest prime above 2^32
        let f = factorize(p * 3).unwrap();
        assert_eq!(f.factors(), &[(3, 1), (p, 1)]);
        let big = 65_537u64 * 65_539;
        assert_eq!(factorize(big).unwrap().factors(), &[(65_537, 1), (65_539, 1)]);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1).unwrap(), [1]);
        assert_eq!(divisors(12).unwrap(), [1, 2, 3, 4, 6, 12]);
        for n in 1..2000u64 {
            let brute: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            assert_eq!(divisors(n).unwrap(), brute);
        }
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(10).unwrap(), 4);
        assert_eq!(euler_phi(97).unwrap(), 96);
        assert_eq!(phi_s(1, 2.7).unwrap(), 1.0);
        assert_eq!(phi_s_int(6, 2).unwrap(), 24);
        assert_eq!(phi_s_int(5, 2).unwrap(), 24);
        assert_eq!(phi_tilde(1).unwrap(), 1);
        assert_eq!(phi_tilde(6).unwrap(), 55);
        assert_eq!(phi_tilde(4).unwrap(), 5);
        assert_eq!(sigma_s(1, 0.3).unwrap(), 1.0);
        assert_eq!(sigma_s_int(6, 1).unwrap(), 12);
        assert_eq!(sigma_s_int(12, 0).unwrap(), 6);
        assert_eq!(omega(1).unwrap(), 0);
        assert_eq!(omega(12).unwrap(), 2);
        assert_eq!(omega(30).unwrap(), 3);
        assert_eq!(chi4(4), 0);
        assert_eq!(chi4(5), 1);
        assert_eq!(chi4(7), -1);
    }

    #[test]
    fn r2_examples() {
        for (n, r) in [(1, 4), (3, 0), (5, 8), (25, 12), (2, 4)] {
            assert_eq!(r2_lattice(n).unwrap(), r, "lattice n={n}");
            assert_eq!(r2(n).unwrap(), r, "local n={n}");
        }
    }

    #[test]
    fn float_paths_match_integer_paths() {
        for n in 1..500 {
            let direct: f64 = (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powf(1.5)).sum();
            assert!((sigma_s(n, 1.5).unwrap() - direct).abs() <= 1e-9 * direct);
            let jordan = (n as f64).powf(0.5)
                * factorize(n).unwrap().primes().map(|p| 1.0 - (p as f64).powf(-0.5)).product::<f64>();
            assert!((phi_s(n, 0.5).unwrap() - jordan).abs() <= 1e-12 * jordan.max(1.0));
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(sigma_s_int(1 << 40, 2), Err(Error::Overflow("sigma_s")));
        assert!(matches!(phi_s_int(97, 20), Err(Error::Overflow(_))));
        assert!(matches!(lcm(u64::MAX - 1, u64::MAX - 2), Err(Error::Overflow(_))));
    }

    #[test]
    fn divisor_sum_identities() {
        for n in 1..=10_000u64 {
            let divisors: Vec<u64> = (1..=isqrt(n))
                .filter(|d| n % d == 0)
                .flat_map(|d| if d * d == n { vec![d] } else { vec![d, n / d] })
                .collect();
            let mu_sum: i64 = divisors.iter().map(|&d| mobius(d).unwrap()).sum();
            assert_eq!(mu_sum, i64::from(n == 1), "n={n}");
            let phi_sum: u64 = divisors.iter().map(|&d| euler_phi(d).unwrap()).sum();
            assert_eq!(phi_sum, n);
            assert_eq!(phi_s(n, 1.0).unwrap(), euler_phi(n).unwrap() as f64);
        }
    }

    #[test]
    fn r2_lattice_agrees_with_local_table() {
        for n in 1..=10_000 {
            assert_eq!(r2_lattice(n).unwrap(), r2(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn chi4_completely_multiplicative() {
        for m in 1..=200 {
            for n in 1..=200 {
                assert_eq!(chi4(m * n), chi4(m) * chi4(n));
            }
        }
    }

    #[test]
    fn direct_totient_count() {
        for n in 1..300u64 {
            let count = (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64;
            assert_eq!(euler_phi(n).unwrap(), count);
        }
    }
}
