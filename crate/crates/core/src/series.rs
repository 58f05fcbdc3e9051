//! Truncated Ramanujan-Fourier series
//! `sum_{q1, q2 <= Q} a_{q1,q2} c_q1(n1) c_q2(n2)` with tail bounds and checks
//! against direct values.
//!
//! Sums run over shells of constant `max(q1, q2)` in increasing order, and the
//! order inside a shell is fixed, so results do not depend on the thread count.
//!
//! The tail bound for a two-variable family combines `|c_q(n)| <= sigma(n)` with
//! the multiplicativity of `|a_{q1,q2}| / |M(f)|`: summing it over all pairs gives
//! `prod_p A_p`, whose factors above the prime cutoff are bounded by the family's
//! majorant. Subtracting the exact sum over `max(q1, q2) <= Q` leaves a bound for
//! the excluded region. A second term covers the difference between `M(f)` and
//! its truncated Euler product.

use rayon::prelude::*;

use crate::arith::{self, Factorization, SieveTables};
use crate::catalog::{FamilySpec, OneVariable, TwoVariable};
use crate::engine::{CoeffTable, Method, TruncationParams};
use crate::error::{Error, Result};
use crate::ramanujan::{csum_row_with, CsumRow};

/// First checkpoint; later ones double up to the final cutoff.
pub const CHECKPOINT_BASE: u64 = 256;
/// Errors below this are treated as ties in the decay check.
pub const TIE_LEVEL: f64 = 1e-12;
/// Relative allowance for rounding in products and partial sums.
const ROUNDING: f64 = 1e-12;

/// Two-variable coefficients stored shell by shell: shell `k` holds
/// `a(k, 1..k)`, then `a(1..k, k)`, then `a(k, k)`, starting at offset `(k-1)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellTable {
    qmax: u64,
    data: Vec<f64>,
}

impl ShellTable {
    pub fn from_fn(qmax: u64, a: impl Fn(u64, u64) -> f64 + Sync) -> Result<Self> {
        if qmax == 0 {
            return Err(Error::NotPositive(0));
        }
        let shells: Vec<Vec<f64>> = (1..=qmax)
            .into_par_iter()
            .map(|k| {
                let mut shell = Vec::with_capacity(2 * k as usize - 1);
                shell.extend((1..k).map(|j| a(k, j)));
                shell.extend((1..k).map(|i| a(i, k)));
                shell.push(a(k, k));
                shell
            })
            .collect();
        Ok(Self { qmax, data: shells.concat() })
    }

    /// Uses the square part `q1, q2 <= min(q1max, q2max)` of a table.
    pub fn from_coeff_table(table: &CoeffTable) -> Result<Self> {
        let qmax = table.q1max().min(table.q2max());
        if let Some((q1, q2, err)) = table.failures().find(|&(q1, q2, _)| q1.max(q2) <= qmax) {
            return Err(Error::InvalidParameter(format!(
                "coefficient ({q1},{q2}) is unavailable: {err}"
            )));
        }
        Self::from_fn(qmax, |q1, q2| table.get(q1, q2).unwrap_or(f64::NAN))
    }

    pub fn qmax(&self) -> u64 {
        self.qmax
    }

    pub fn get(&self, q1: u64, q2: u64) -> f64 {
        let k = q1.max(q2);
        let base = ((k - 1) * (k - 1)) as usize;
        let k = k as usize;
        if q1 == q2 {
            self.data[base + 2 * k - 2]
        } else if q1 > q2 {
            self.data[base + q2 as usize - 1]
        } else {
            self.data[base + k - 1 + q1 as usize - 1]
        }
    }

    /// `sum_{max(q1, q2) <= k} |a|` for `k = 0..=qmax`.
    pub fn abs_prefix(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.qmax as usize + 1);
        out.push(0.0);
        let mut acc = 0.0;
        for k in 1..=self.qmax as usize {
            let base = (k - 1) * (k - 1);
            acc += self.data[base..base + 2 * k - 1].iter().map(|a| a.abs()).sum::<f64>();
            out.push(acc);
        }
        out
    }

    /// Same shape with all coefficients zero.
    pub fn zeroed(&self) -> Self {
        Self { qmax: self.qmax, data: vec![0.0; self.data.len()] }
    }

    /// Partial sums at each cutoff in `marks` (increasing, at most `qmax`).
    fn partial_sums(&self, c1: &[f64], c2: &[f64], marks: &[u64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(marks.len());
        let mut next = marks.iter().peekable();
        let mut acc = 0.0;
        for k in 1..=self.qmax as usize {
            let base = (k - 1) * (k - 1);
            let row = &self.data[base..base + k - 1];
            let col = &self.data[base + k - 1..base + 2 * k - 2];
            let (x, y) = (c1[k - 1], c2[k - 1]);
            let mut shell = self.data[base + 2 * k - 2] * x * y;
            if x != 0.0 {
                shell += x * dot(row, &c2[..k - 1]);
            }
            if y != 0.0 {
                shell += y * dot(col, &c1[..k - 1]);
            }
            acc += shell;
            while next.peek().is_some_and(|&&m| m == k as u64) {
                out.push(acc);
                next.next();
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn row_f64(row: &CsumRow) -> Vec<f64> {
    row.values().iter().map(|&v| v as f64).collect()
}

fn check_cutoff(table_qmax: u64, qmax: u64) -> Result<()> {
    if qmax == 0 {
        return Err(Error::NotPositive(0));
    }
    if qmax > table_qmax {
        return Err(Error::MissingCoefficients(qmax));
    }
    Ok(())
}

/// `sum_{q1, q2 <= qmax} a_{q1,q2} c_q1(n1) c_q2(n2)`.
pub fn partial_sum(table: &ShellTable, n1: u64, n2: u64, qmax: u64) -> Result<f64> {
    check_cutoff(table.qmax, qmax)?;
    let sieve = arith::build_sieve(qmax)?;
    let c1 = row_f64(&csum_row_with(&sieve, qmax, n1)?);
    let c2 = row_f64(&csum_row_with(&sieve, qmax, n2)?);
    Ok(table.partial_sums(&c1, &c2, &[qmax])[0])
}

/// `sum_{q <= qmax} a_q c_q(n)`.
pub fn partial_sum1(coeffs: &[f64], n: u64, qmax: u64) -> Result<f64> {
    check_cutoff(coeffs.len() as u64, qmax)?;
    let sieve = arith::build_sieve(qmax)?;
    let c = row_f64(&csum_row_with(&sieve, qmax, n)?);
    Ok(partial_sums1(coeffs, &c, &[qmax])[0])
}

fn partial_sums1(coeffs: &[f64], c: &[f64], marks: &[u64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(marks.len());
    let mut next = marks.iter().peekable();
    let mut acc = 0.0;
    for (i, (a, x)) in coeffs.iter().zip(c).enumerate() {
        acc += a * x;
        while next.peek().is_some_and(|&&m| m == i as u64 + 1) {
            out.push(acc);
            next.next();
        }
    }
    out
}

/// `256, 512, ...` below `qmax`, then `qmax` itself.
pub fn checkpoints(qmax: u64) -> Vec<u64> {
    let mut marks = Vec::new();
    let mut q = CHECKPOINT_BASE;
    while q < qmax {
        marks.push(q);
        q *= 2;
    }
    marks.push(qmax);
    marks
}

fn factorizations(sieve: &SieveTables, qmax: u64) -> Vec<Factorization> {
    (1..=qmax).map(|q| sieve.factorize(q)).collect()
}

/// Closed-form table of a two-variable family.
pub fn closed_form_table(family: &TwoVariable, qmax: u64) -> Result<ShellTable> {
    let sieve = arith::build_sieve(qmax)?;
    let fs = factorizations(&sieve, qmax);
    let m = family.mean().value;
    ShellTable::from_fn(qmax, |q1, q2| {
        m * family.ratio_of(&fs[q1 as usize - 1], &fs[q2 as usize - 1])
    })
}

/// Closed-form coefficients `a_1..a_qmax` of a one-variable family.
pub fn closed_form_coefficients(family: &OneVariable, qmax: u64) -> Result<Vec<f64>> {
    let sieve = arith::build_sieve(qmax)?;
    Ok((1..=qmax).into_par_iter().map(|q| family.coefficient_of(&sieve.factorize(q))).collect())
}

/// Bound on the excluded region of a two-variable family at cutoff `Q`.
#[derive(Debug, Clone)]
pub struct TailModel {
    /// Upper bound on `sum_{all q1,q2} |a_{q1,q2}|`.
    total: f64,
    /// `sum_{max(q1,q2) <= k} |a|` for `k <= qmax`.
    abs_prefix: Vec<f64>,
    /// Relative distance between `M(f)` and its truncated product.
    mean_slack: f64,
}

impl TailModel {
    pub fn new(family: &TwoVariable, closed: &ShellTable) -> Self {
        let cutoff = family.mean().prime_cutoff;
        let total = family.mean().value.abs()
            * family.abs_product()
            * family.majorant().abs_tail_log(cutoff).exp();
        Self {
            total,
            abs_prefix: closed.abs_prefix(),
            mean_slack: family.majorant().mean_slack(cutoff) + ROUNDING,
        }
    }

    /// `sum_{max(q1,q2) > Q} |a|` from above.
    pub fn abs_tail(&self, qmax: u64) -> f64 {
        let inside = self.abs_prefix[qmax as usize];
        (self.total - inside).max(0.0) + ROUNDING * self.total
    }

    /// Bound on `|f(n1, n2) - S_Q|` for a partial sum `S_Q` built from closed-form
    /// coefficients.
    pub fn bound(&self, n1: u64, n2: u64, qmax: u64, partial: f64) -> Result<f64> {
        let s1 = arith::sigma_s_int(n1, 1)? as f64;
        let s2 = arith::sigma_s_int(n2, 1)? as f64;
        let eta = self.mean_slack;
        Ok((1.0 + eta) * s1 * s2 * self.abs_tail(qmax) + eta * partial.abs() * (1.0 + ROUNDING))
    }
}

/// Tail bound for the family at cutoff `qmax` and point `(n1, n2)`; `n2` is
/// ignored for one-variable families.
pub fn tail_bound(family: &FamilySpec, qmax: u64, n1: u64, n2: u64) -> Result<f64> {
    match family {
        FamilySpec::Two(f) => {
            let closed = closed_form_table(f, qmax)?;
            let partial = partial_sum(&closed, n1, n2, qmax)?;
            TailModel::new(f, &closed).bound(n1, n2, qmax, partial)
        }
        FamilySpec::One(f) => {
            let coeffs = closed_form_coefficients(f, qmax)?;
            let partial = partial_sum1(&coeffs, n1, qmax)?;
            bound1(f, n1, qmax, partial)
        }
    }
}

fn bound1(family: &OneVariable, n: u64, qmax: u64, partial: f64) -> Result<f64> {
    let s = arith::sigma_s_int(n, 1)? as f64;
    Ok(s * family.abs_tail(qmax) * (1.0 + ROUNDING) + ROUNDING * partial.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Bracketed,
    NotBracketed,
    /// Coefficients without a rigorous tail; the bracket is indicative only.
    Heuristic,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Bracketed => "bracketed",
            Verdict::NotBracketed => "not_bracketed",
            Verdict::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub qmax: u64,
    pub partial: f64,
    /// `|direct - partial|`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub family: String,
    pub n1: u64,
    /// `None` for one-variable families.
    pub n2: Option<u64>,
    pub direct: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub tail_bound: f64,
    pub verdict: Verdict,
    pub source: Method,
}

impl ConvergenceReport {
    pub fn first(&self) -> &Checkpoint {
        &self.checkpoints[0]
    }

    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("at least one checkpoint")
    }

    /// Error at the last checkpoint does not exceed the first (ties below
    /// [`TIE_LEVEL`] allowed).
    pub fn decayed(&self) -> bool {
        let (first, last) = (self.first().error, self.last().error);
        last <= first || (first <= TIE_LEVEL && last <= TIE_LEVEL)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Bracketed && self.decayed()
    }
}

enum Coefficients {
    Two { table: ShellTable, tail: TailModel },
    One { coeffs: Vec<f64> },
}

/// Coefficients, Ramanujan-sum rows and tail data for repeated evaluation of
/// one family at cutoff `qmax`.
pub struct SeriesContext {
    family: FamilySpec,
    qmax: u64,
    coefficients: Coefficients,
    source: Method,
    sieve: SieveTables,
}

impl SeriesContext {
    pub fn new(family: &FamilySpec, params: &TruncationParams) -> Result<Self> {
        params.validate()?;
        let qmax = params.series_qmax;
        let coefficients = match family {
            FamilySpec::Two(f) => {
                let table = closed_form_table(f, qmax)?;
                let tail = TailModel::new(f, &table);
                Coefficients::Two { table, tail }
            }
            FamilySpec::One(f) => Coefficients::One { coeffs: closed_form_coefficients(f, qmax)? },
        };
        Ok(Self {
            family: family.clone(),
            qmax,
            coefficients,
            source: Method::ClosedForm,
            sieve: arith::build_sieve(qmax)?,
        })
    }

    /// Evaluates with `table` in place of the closed form; the tail bound still
    /// comes from the family.
    pub fn with_table(mut self, table: ShellTable, source: Method) -> Result<Self> {
        match &mut self.coefficients {
            Coefficients::Two { table: t, .. } => {
                if table.qmax() < self.qmax {
                    return Err(Error::MissingCoefficients(self.qmax));
                }
                *t = table;
            }
            Coefficients::One { .. } => {
                return Err(Error::InvalidParameter(
                    "two-variable table given for a one-variable family".into(),
                ))
            }
        }
        self.source = source;
        Ok(self)
    }

    /// One-variable counterpart of [`SeriesContext::with_table`].
    pub fn with_coefficients(mut self, coeffs: Vec<f64>, source: Method) -> Result<Self> {
        match &mut self.coefficients {
            Coefficients::One { coeffs: c } => {
                if (coeffs.len() as u64) < self.qmax {
                    return Err(Error::MissingCoefficients(self.qmax));
                }
                *c = coeffs;
            }
            Coefficients::Two { .. } => {
                return Err(Error::InvalidParameter(
                    "one-variable coefficients given for a two-variable family".into(),
                ))
            }
        }
        self.source = source;
        Ok(self)
    }

    pub fn family(&self) -> &FamilySpec {
        &self.family
    }

    pub fn qmax(&self) -> u64 {
        self.qmax
    }

    fn row(&self, n: u64) -> Result<Vec<f64>> {
        Ok(row_f64(&csum_row_with(&self.sieve, self.qmax, n)?))
    }

    /// `n2` is ignored for one-variable families.
    pub fn report(&self, n1: u64, n2: u64) -> Result<ConvergenceReport> {
        let marks = checkpoints(self.qmax);
        let (direct, partials, bound, second) = match (&self.family, &self.coefficients) {
            (FamilySpec::Two(f), Coefficients::Two { table, tail }) => {
                let direct = f.direct(n1, n2);
                let partials = table.partial_sums(&self.row(n1)?, &self.row(n2)?, &marks);
                let bound = tail.bound(n1, n2, self.qmax, *partials.last().unwrap())?;
                (direct, partials, bound, Some(n2))
            }
            (FamilySpec::One(f), Coefficients::One { coeffs }) => {
                let direct = f.direct(n1);
                let partials = partial_sums1(coeffs, &self.row(n1)?, &marks);
                let bound = bound1(f, n1, self.qmax, *partials.last().unwrap())?;
                (direct, partials, bound, None)
            }
            _ => unreachable!("coefficients always match the family kind"),
        };
        let checkpoints: Vec<Checkpoint> = marks
            .iter()
            .zip(&partials)
            .map(|(&qmax, &partial)| Checkpoint { qmax, partial, error: (direct - partial).abs() })
            .collect();
        let inside = checkpoints.last().unwrap().error <= bound;
        let verdict = match (self.source, inside) {
            (Method::DoubleSum, _) => Verdict::Heuristic,
            (_, true) => Verdict::Bracketed,
            (_, false) => Verdict::NotBracketed,
        };
        Ok(ConvergenceReport {
            family: self.family.label(),
            n1,
            n2: second,
            direct,
            checkpoints,
            tail_bound: bound,
            verdict,
            source: self.source,
        })
    }

    /// Reports for every point with coordinates up to `nmax`, in row-major order.
    pub fn verify(&self, nmax: u64) -> Result<VerifyOutcome> {
        if nmax == 0 {
            return Err(Error::NotPositive(0));
        }
        let points: Vec<(u64, u64)> = match self.family {
            FamilySpec::Two(_) => {
                (1..=nmax).flat_map(|a| (1..=nmax).map(move |b| (a, b))).collect()
            }
            FamilySpec::One(_) => (1..=nmax).map(|a| (a, 1)).collect(),
        };
        let reports =
            points.par_iter().map(|&(a, b)| self.report(a, b)).collect::<Result<Vec<_>>>()?;
        Ok(VerifyOutcome { family: self.family.label(), reports })
    }
}

pub fn evaluate_with_report(
    family: &FamilySpec,
    n1: u64,
    n2: u64,
    params: &TruncationParams,
) -> Result<ConvergenceReport> {
    SeriesContext::new(family, params)?.report(n1, n2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub family: String,
    pub reports: Vec<ConvergenceReport>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(ConvergenceReport::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConvergenceReport> {
        self.reports.iter().filter(|r| !r.passed())
    }
}

pub fn verify_family(family: &FamilySpec, nmax: u64, params: &TruncationParams) -> Result<VerifyOutcome> {
    SeriesContext::new(family, params)?.verify(nmax)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_layout_round_trips() {
        let t = ShellTable::from_fn(7, |a, b| (10 * a + b) as f64).unwrap();
        for a in 1..=7 {
            for b in 1..=7 {
                assert_eq!(t.get(a, b), (10 * a + b) as f64);
            }
        }
        let prefix = t.abs_prefix();
        let direct: f64 = (1..=3).flat_map(|a| (1..=3).map(move |b| (10 * a + b) as f64)).sum();
        assert_eq!(prefix[3], direct);
    }

    #[test]
    fn partial_sum_matches_naive_double_loop() {
        let t = ShellTable::from_fn(40, |a, b| 1.0 / ((a * a + b) as f64)).unwrap();
        for (n1, n2) in [(1, 1), (6, 4), (12, 30)] {
            let mut naive = 0.0;
            for a in 1..=40 {
                for b in 1..=40 {
                    naive += t.get(a, b)
                        * crate::ramanujan::csum(a, n1).unwrap() as f64
                        * crate::ramanujan::csum(b, n2).unwrap() as f64;
                }
            }
            let shells = partial_sum(&t, n1, n2, 40).unwrap();
            assert!((shells - naive).abs() < 1e-12 * naive.abs().max(1.0));
        }
        assert_eq!(partial_sum(&t, 1, 1, 41), Err(Error::MissingCoefficients(41)));
    }

    #[test]
    fn checkpoint_schedule() {
        assert_eq!(checkpoints(2048), vec![256, 512, 1024, 2048]);
        assert_eq!(checkpoints(1000), vec![256, 512, 1000]);
        assert_eq!(checkpoints(100), vec![100]);
    }
}
