//! Coefficients as truncated double sums
//! `a_{q1,q2} ~ sum_{m1, m2 <= M} (f * mu)(m1 q1, m2 q2) / (m1 q1 m2 q2)`.
//!
//! For a multiplicative `f` write `h = f * mu`, `alpha(n) = h(n, 1)` and
//! `beta(n) = h(1, n)`. Then `h = (alpha x beta) * D` for a multiplicative `D`
//! that vanishes unless both of its arguments have the same radical, and the
//! rectangle sum collapses to
//! `sum_{d1, d2} D(d1, d2) / (d1 d2) * A(X1 / d1) * B(X2 / d2)` with prefix sums
//! `A`, `B` of `alpha(k)/k`, `beta(k)/k`. The value is the same finite sum; only
//! the grouping of its terms changes.

use super::local::primes_to;
use super::TruncationParams;
use crate::arith::{self, SieveTables};
use crate::dirichlet2::{joint_valuations, MultFn2};
use crate::error::{Error, Result};

/// Truncated double sum with its Cauchy gauges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleSum {
    /// Partial sum over `m1, m2 <= M`.
    pub value: f64,
    /// `|S(M) - S(M/2)|`.
    pub error: f64,
    /// `|S(M/4) - S(M/8)|`, `|S(M/2) - S(M/4)|`, `|S(M) - S(M/2)|`.
    pub gauges: [f64; 3],
    pub cutoff: u64,
}

/// Sum cutoffs `M/8, M/4, M/2, M` used for the gauges.
fn cutoffs(m: u64) -> [u64; 4] {
    [(m / 8).max(1), (m / 4).max(1), (m / 2).max(1), m]
}

fn finish(q1: u64, q2: u64, m: u64, partials: [f64; 4]) -> Result<DoubleSum> {
    let gauges = [
        (partials[1] - partials[0]).abs(),
        (partials[2] - partials[1]).abs(),
        (partials[3] - partials[2]).abs(),
    ];
    let scale = partials[3].abs().max(1.0);
    // A convergent sum may wobble once; three non-shrinking doublings of a
    // visible size are treated as divergence.
    if gauges[0] > 0.0 && gauges[1] >= gauges[0] && gauges[2] >= gauges[1] && gauges[2] > 1e-6 * scale
    {
        return Err(Error::DivergenceSuspected { q1, q2, gauges });
    }
    Ok(DoubleSum { value: partials[3], error: gauges[2], gauges, cutoff: m })
}

/// Double sum for an arbitrary `(f * mu)` given pointwise, visiting
/// `(m1, m2)` in shells of increasing `max(m1, m2)`. Costs `M^2` evaluations.
pub fn coeff_double_sum_fn(
    star_mu: impl Fn(u64, u64) -> Result<f64>,
    q1: u64,
    q2: u64,
    m: u64,
) -> Result<DoubleSum> {
    if q1 == 0 || q2 == 0 || m == 0 {
        return Err(Error::NotPositive(0));
    }
    let term = |m1: u64, m2: u64| -> Result<f64> {
        let (n1, n2) = (m1 * q1, m2 * q2);
        Ok(star_mu(n1, n2)? / (n1 as f64 * n2 as f64))
    };
    let marks = cutoffs(m);
    let mut partials = [0.0; 4];
    let mut acc = 0.0;
    for k in 1..=m {
        let mut shell = term(k, k)?;
        for j in 1..k {
            shell += term(k, j)? + term(j, k)?;
        }
        acc += shell;
        for (slot, &mark) in partials.iter_mut().zip(&marks) {
            if mark == k {
                *slot = acc;
            }
        }
    }
    finish(q1, q2, m, partials)
}

#[derive(Debug, Clone, Copy)]
struct Step {
    pw1: u64,
    pw2: u64,
    weight: f64,
}

/// Shared data for double sums of one function with `q1 <= q1max`, `q2 <= q2max`.
pub struct DoubleSumPlan {
    f: MultFn2<f64>,
    m: u64,
    /// `alpha(k) / k` and `beta(k) / k`, indexed by `k`; `None` when trivial.
    alpha: Option<Vec<f64>>,
    beta: Option<Vec<f64>>,
    /// Primes carrying a nonzero `D` and the steps `(p^e1, p^e2)` they allow.
    primes: Vec<u64>,
    steps: Vec<Vec<Step>>,
    x1max: u64,
    x2max: u64,
}

fn log_floor(p: u64, x: u64) -> u32 {
    let mut e = 0;
    let mut pw = 1u64;
    while pw <= x / p {
        pw *= p;
        e += 1;
    }
    e
}

/// `h(k, 1)` (or `h(1, k)`) for all `k <= limit` from the grid, via smallest prime factors.
fn axis_values(
    f: &MultFn2<f64>,
    sieve: &SieveTables,
    limit: u64,
    first: bool,
) -> Result<Option<Vec<f64>>> {
    let mut h = vec![0.0; limit as usize + 1];
    if limit >= 1 {
        h[1] = 1.0;
    }
    let mut trivial = true;
    for k in 2..=limit {
        let p = sieve.smallest_prime_factor(k);
        let mut rest = k / p;
        let mut e = 1;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        let local = if first { f.local(p, e, 0)? } else { f.local(p, 0, e)? };
        let v = h[rest as usize] * local;
        if v != 0.0 {
            trivial = false;
        }
        h[k as usize] = v;
    }
    if trivial {
        return Ok(None);
    }
    for (k, v) in h.iter_mut().enumerate().skip(1) {
        *v /= k as f64;
    }
    Ok(Some(h))
}

/// Local grid of `D` at `p` for `1 <= e1 <= E1`, `1 <= e2 <= E2`, weighted by `p^-(e1+e2)`.
fn d_steps(f: &MultFn2<f64>, p: u64, big1: u32, big2: u32) -> Result<Vec<Step>> {
    let (n1, n2) = (big1 as usize + 1, big2 as usize + 1);
    let mut h = vec![vec![0.0; n2]; n1];
    for (e1, row) in h.iter_mut().enumerate() {
        for (e2, v) in row.iter_mut().enumerate() {
            *v = f.local(p, e1 as u32, e2 as u32)?;
        }
    }
    let alpha: Vec<f64> = (0..n1).map(|e| h[e][0]).collect();
    let beta: Vec<f64> = (0..n2).map(|e| h[0][e]).collect();
    let mut d = vec![vec![0.0; n2]; n1];
    d[0][0] = 1.0;
    for e1 in 1..n1 {
        for e2 in 1..n2 {
            let mut v = h[e1][e2];
            for j1 in 0..=e1 {
                for j2 in 0..=e2 {
                    if (j1, j2) != (e1, e2) && d[j1][j2] != 0.0 {
                        v -= d[j1][j2] * alpha[e1 - j1] * beta[e2 - j2];
                    }
                }
            }
            d[e1][e2] = v;
        }
    }
    let inv = 1.0 / p as f64;
    let mut steps = Vec::new();
    for e1 in 1..n1 {
        for e2 in 1..n2 {
            if d[e1][e2] != 0.0 {
                steps.push(Step {
                    pw1: p.pow(e1 as u32),
                    pw2: p.pow(e2 as u32),
                    weight: d[e1][e2] * inv.powi((e1 + e2) as i32),
                });
            }
        }
    }
    Ok(steps)
}

impl DoubleSumPlan {
    pub fn new(f: &MultFn2<f64>, q1max: u64, q2max: u64, params: &TruncationParams) -> Result<Self> {
        params.validate()?;
        if q1max == 0 || q2max == 0 {
            return Err(Error::NotPositive(0));
        }
        let m = params.sum_cutoff;
        let over = Error::Overflow("sum cutoff times q");
        let x1max = m.checked_mul(q1max).ok_or(over.clone())?;
        let x2max = m.checked_mul(q2max).ok_or(over)?;
        let sieve = arith::build_sieve(x1max.max(x2max))?;
        let alpha = axis_values(f, &sieve, x1max, true)?;
        let beta = axis_values(f, &sieve, x2max, false)?;
        let reach = x1max.min(x2max);
        let mut primes = Vec::new();
        let mut steps = Vec::new();
        for &p in primes_to(reach).iter() {
            let s = d_steps(f, p, log_floor(p, x1max), log_floor(p, x2max))?;
            if !s.is_empty() {
                primes.push(p);
                steps.push(s);
            }
        }
        Ok(Self { f: f.clone(), m, alpha, beta, primes, steps, x1max, x2max })
    }

    pub fn coefficient(&self, q1: u64, q2: u64) -> Result<DoubleSum> {
        if q1 == 0 || q2 == 0 {
            return Err(Error::NotPositive(0));
        }
        let x1 = self.m * q1;
        let x2 = self.m * q2;
        if x1 > self.x1max || x2 > self.x2max {
            return Err(Error::InvalidParameter(format!(
                "({q1},{q2}) lies outside the planned range"
            )));
        }
        // Primes of q1 q2 take exponents at least their valuations; every
        // admissible combination of them is a starting point `(a1, a2)`.
        let joint = joint_valuations(&arith::factorize(q1)?, &arith::factorize(q2)?);
        let mut starts = vec![(1u64, 1u64, 1.0f64)];
        for &(p, k, l) in &joint {
            let inv = 1.0 / p as f64;
            let mut next = Vec::new();
            for &(a1, a2, w) in &starts {
                let (mut e1, mut pw1) = (k, p.pow(k));
                while pw1 <= x1 / a1 {
                    let (mut e2, mut pw2) = (l, p.pow(l));
                    while pw2 <= x2 / a2 {
                        let h = self.f.local(p, e1, e2)?;
                        if h != 0.0 {
                            next.push((a1 * pw1, a2 * pw2, w * h * inv.powi((e1 + e2) as i32)));
                        }
                        e2 += 1;
                        match pw2.checked_mul(p) {
                            Some(v) => pw2 = v,
                            None => break,
                        }
                    }
                    e1 += 1;
                    match pw1.checked_mul(p) {
                        Some(v) => pw1 = v,
                        None => break,
                    }
                }
            }
            starts = next;
        }
        let rad: u64 = joint.iter().map(|&(p, _, _)| p).product();
        let prefix = |axis: &Option<Vec<f64>>, limit: u64| {
            axis.as_ref().map(|w| {
                let mut acc = vec![0.0; limit as usize + 1];
                for y in 1..=limit as usize {
                    let v = if w[y] != 0.0 && arith::gcd(y as u64, rad) == 1 { w[y] } else { 0.0 };
                    acc[y] = acc[y - 1] + v;
                }
                acc
            })
        };
        let walk = Walk {
            plan: self,
            rad,
            prefix1: prefix(&self.alpha, x1),
            prefix2: prefix(&self.beta, x2),
            marks: cutoffs(self.m).map(|k| (k * q1, k * q2)),
        };
        let mut partials = [0.0; 4];
        for &(a1, a2, w) in &starts {
            walk.visit(0, a1, a2, w, &mut partials);
        }
        finish(q1, q2, self.m, partials)
    }
}

struct Walk<'a> {
    plan: &'a DoubleSumPlan,
    rad: u64,
    prefix1: Option<Vec<f64>>,
    prefix2: Option<Vec<f64>>,
    /// `(K q1, K q2)` for each gauge cutoff `K`.
    marks: [(u64, u64); 4],
}

impl Walk<'_> {
    fn visit(&self, start: usize, n1: u64, n2: u64, w: f64, partials: &mut [f64; 4]) {
        for (slot, &(x1, x2)) in partials.iter_mut().zip(&self.marks) {
            let (y1, y2) = (x1 / n1, x2 / n2);
            if y1 == 0 || y2 == 0 {
                continue;
            }
            let a = self.prefix1.as_ref().map_or(1.0, |s| s[y1 as usize]);
            let b = self.prefix2.as_ref().map_or(1.0, |s| s[y2 as usize]);
            *slot += w * a * b;
        }
        let (x1, x2) = self.marks[3];
        let (rem1, rem2) = (x1 / n1, x2 / n2);
        let reach = rem1.min(rem2);
        for j in start..self.plan.primes.len() {
            let p = self.plan.primes[j];
            if p > reach {
                break;
            }
            if self.rad % p == 0 {
                continue;
            }
            for step in &self.plan.steps[j] {
                if step.pw1 <= rem1 && step.pw2 <= rem2 {
                    self.visit(j + 1, n1 * step.pw1, n2 * step.pw2, w * step.weight, partials);
                }
            }
        }
    }
}

/// Double-sum coefficient of a multiplicative function at one `(q1, q2)`.
pub fn coeff_double_sum(
    f: &MultFn2<f64>,
    q1: u64,
    q2: u64,
    params: &TruncationParams,
) -> Result<DoubleSum> {
    DoubleSumPlan::new(f, q1, q2, params)?.coefficient(q1, q2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_cutoffs() {
        assert_eq!(cutoffs(10_000), [1250, 2500, 5000, 10_000]);
        assert_eq!(cutoffs(3), [1, 1, 1, 3]);
    }

    #[test]
    fn finite_support_sums_exactly() {
        // (f * mu) = delta at (1, 1) and -1 at (2, 3).
        let star = |a: u64, b: u64| Ok(match (a, b) {
            (1, 1) => 1.0,
            (2, 3) => -1.0,
            _ => 0.0,
        });
        let s = coeff_double_sum_fn(star, 1, 1, 8).unwrap();
        assert_eq!(s.value, 1.0 - 1.0 / 6.0);
        // Cutoffs 1, 2, 4, 8: the (2, 3) term lands in shell 3.
        assert_eq!(s.gauges[0], 0.0);
        assert!((s.gauges[1] - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(s.error, 0.0);
        assert_eq!(coeff_double_sum_fn(star, 2, 3, 8).unwrap().value, -1.0 / 6.0);
    }
}
