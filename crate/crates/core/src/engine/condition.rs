//! Heuristic diagnostics for the absolute-convergence conditions.
//!
//! The condition series are summed prime by prime and sampled at `P/8`, `P/4`,
//! `P/2` and `P`. A series whose last increment has not shrunk against the one
//! before is reported as suspect. None of this proves convergence.

use rayon::prelude::*;

use super::local::{local_abs_sum, local_abs_sum1, primes_to};
use super::TruncationParams;
use crate::dirichlet2::{ArithFn1, MultFn2};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionVerdict {
    Stabilizing,
    Suspect,
}

impl ConditionVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stabilizing => "stabilizing",
            Self::Suspect => "suspect",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// `(prime cutoff, partial sum)` in increasing cutoff order.
    pub checkpoints: Vec<(u64, f64)>,
    pub verdict: ConditionVerdict,
}

/// Ratio of consecutive increments above which growth is suspect.
const SHRINK: f64 = 0.75;

fn report(prime_cutoff: u64, primes: &[u64], terms: &[Option<f64>]) -> ConditionReport {
    let marks: Vec<u64> = {
        let mut m: Vec<u64> = [8, 4, 2, 1].iter().map(|d| (prime_cutoff / d).max(1)).collect();
        m.dedup();
        m
    };
    let mut checkpoints = Vec::with_capacity(marks.len());
    let mut acc = 0.0;
    let mut idx = 0;
    let mut broken = false;
    for &mark in &marks {
        while idx < primes.len() && primes[idx] <= mark {
            match terms[idx] {
                Some(t) => acc += t,
                None => broken = true,
            }
            idx += 1;
        }
        checkpoints.push((mark, acc));
    }
    let verdict = if broken {
        ConditionVerdict::Suspect
    } else {
        verdict_of(&checkpoints)
    };
    ConditionReport { checkpoints, verdict }
}

fn verdict_of(checkpoints: &[(u64, f64)]) -> ConditionVerdict {
    let n = checkpoints.len();
    if n < 3 {
        return ConditionVerdict::Stabilizing;
    }
    let last = checkpoints[n - 1].1 - checkpoints[n - 2].1;
    let prev = checkpoints[n - 2].1 - checkpoints[n - 3].1;
    let total = checkpoints[n - 1].1.abs().max(1.0);
    if last <= 1e-15 * total || last <= SHRINK * prev {
        ConditionVerdict::Stabilizing
    } else {
        ConditionVerdict::Suspect
    }
}

/// Partial sums of `sum_p sum_{e1 + e2 >= 1} |(f * mu)(p^e1, p^e2)| / p^(e1 + e2)`.
/// A local sum that fails to stabilize makes the verdict suspect.
pub fn condition_check(f: &MultFn2<f64>, params: &TruncationParams) -> Result<ConditionReport> {
    params.validate()?;
    let primes = primes_to(params.prime_cutoff);
    let terms: Vec<Option<f64>> =
        primes.par_iter().map(|&p| local_abs_sum(f, p, params).ok()).collect();
    Ok(report(params.prime_cutoff, &primes, &terms))
}

/// Prime-by-prime form of Delange's condition for multiplicative `g`:
/// partial sums of `sum_p sum_{e >= 1} |(g * mu)(p^e)| / p^e`.
pub fn condition_check1(g: &ArithFn1<f64>, params: &TruncationParams) -> Result<ConditionReport> {
    params.validate()?;
    if !g.is_multiplicative() {
        return Err(crate::error::Error::NotMultiplicative);
    }
    let primes = primes_to(params.prime_cutoff);
    let terms: Vec<Option<f64>> =
        primes.par_iter().map(|&p| local_abs_sum1(g, p, 1, params).ok()).collect();
    Ok(report(params.prime_cutoff, &primes, &terms))
}
