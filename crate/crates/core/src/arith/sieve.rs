use crate::error::{Error, Result};

use super::Factorization;

/// Largest sieve limit accepted by [`build_sieve`]; about 20 bytes per entry.
pub const DEFAULT_SIEVE_CAP: u64 = 50_000_000;

/// Smallest-prime-factor, Mobius and totient tables for `1..=limit`, built by
/// a linear sieve. Index 0 is unused.
#[derive(Debug, Clone)]
pub struct SieveTables {
    limit: u64,
    spf: Vec<u32>,
    mu: Vec<i8>,
    phi: Vec<u64>,
    primes: Vec<u64>,
}

pub fn build_sieve(limit: u64) -> Result<SieveTables> {
    build_sieve_capped(limit, DEFAULT_SIEVE_CAP)
}

pub fn build_sieve_capped(limit: u64, cap: u64) -> Result<SieveTables> {
    if limit == 0 {
        return Err(Error::NotPositive(0));
    }
    if limit > cap || limit > u32::MAX as u64 {
        return Err(Error::TableTooLarge { requested: limit, cap });
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut mu = vec![0i8; n + 1];
    let mut phi = vec![0u64; n + 1];
    let mut primes = Vec::new();
    mu[1] = 1;
    phi[1] = 1;
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            mu[i] = -1;
            phi[i] = i as u64 - 1;
            primes.push(i as u64);
        }
        for &p in &primes {
            let p = p as usize;
            let m = i * p;
            if p > spf[i] as usize || m > n {
                break;
            }
            spf[m] = p as u32;
            if p == spf[i] as usize {
                mu[m] = 0;
                phi[m] = phi[i] * p as u64;
            } else {
                mu[m] = -mu[i];
                phi[m] = phi[i] * (p as u64 - 1);
            }
        }
    }
    Ok(SieveTables { limit, spf, mu, phi, primes })
}

impl SieveTables {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    fn index(&self, n: u64) -> usize {
        assert!(n >= 1 && n <= self.limit, "{n} outside sieve range 1..={}", self.limit);
        n as usize
    }

    pub fn mobius(&self, n: u64) -> i64 {
        self.mu[self.index(n)] as i64
    }

    pub fn euler_phi(&self, n: u64) -> u64 {
        self.phi[self.index(n)]
    }

    pub fn smallest_prime_factor(&self, n: u64) -> u64 {
        self.spf[self.index(n)] as u64
    }

    pub fn factorize(&self, n: u64) -> Factorization {
        let mut rest = self.index(n) as u64;
        let mut factors: Vec<(u64, u32)> = Vec::new();
        while rest > 1 {
            let p = self.spf[rest as usize] as u64;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        Factorization::from_parts(n, factors)
    }
}

/// Primes up to `limit` by an odd-only sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // composite[i] describes 2i + 1.
    let half = ((limit - 1) / 2) as usize;
    let mut composite = vec![false; half + 1];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j <= half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(limit as usize / 10 + 8);
    out.push(2);
    out.extend((1..=half).filter(|&k| !composite[k]).map(|k| 2 * k as u64 + 1));
    out
}
