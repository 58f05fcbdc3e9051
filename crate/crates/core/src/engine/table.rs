use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::double_sum::DoubleSumPlan;
use super::euler::EulerProduct;
use super::local::{mean_value, MeanValue};
use super::TruncationParams;
use crate::dirichlet2::MultFn2;
use crate::error::{Error, Result};

/// Closed-form two-variable coefficients supplied by a function family.
pub trait ClosedForm: Send + Sync {
    fn coefficient(&self, q1: u64, q2: u64) -> Result<f64>;

    /// Relative uncertainty carried by constants inside the closed form.
    fn relative_error(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    EulerProduct,
    DoubleSum,
    ClosedForm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::EulerProduct, Method::DoubleSum, Method::ClosedForm];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::EulerProduct => "euler_product",
            Method::DoubleSum => "double_sum",
            Method::ClosedForm => "closed_form",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// What a coefficient table can be built from.
#[derive(Clone, Copy)]
pub struct CoeffSource<'a> {
    pub function: &'a MultFn2<f64>,
    /// Mean value already computed with the same parameters.
    pub mean: Option<MeanValue>,
    pub closed_form: Option<&'a dyn ClosedForm>,
}

impl<'a> CoeffSource<'a> {
    pub fn new(function: &'a MultFn2<f64>) -> Self {
        Self { function, mean: None, closed_form: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffEntry {
    /// NaN when `failure` is set.
    pub value: f64,
    pub error: f64,
    pub failure: Option<Error>,
}

impl CoeffEntry {
    fn from_result(r: Result<(f64, f64)>) -> Self {
        match r {
            Ok((value, error)) => Self { value, error, failure: None },
            Err(e) => Self { value: f64::NAN, error: f64::NAN, failure: Some(e) },
        }
    }
}

/// `a_{q1,q2}` for `q1 <= q1max`, `q2 <= q2max`, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    q1max: u64,
    q2max: u64,
    method: Method,
    /// Set when the requested method was replaced by the double sum.
    fallback_from: Option<Method>,
    entries: Vec<CoeffEntry>,
}

impl CoeffTable {
    pub fn q1max(&self) -> u64 {
        self.q1max
    }

    pub fn q2max(&self) -> u64 {
        self.q2max
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn fallback_from(&self) -> Option<Method> {
        self.fallback_from
    }

    pub fn entry(&self, q1: u64, q2: u64) -> Result<&CoeffEntry> {
        if q1 == 0 || q2 == 0 || q1 > self.q1max || q2 > self.q2max {
            return Err(Error::MissingCoefficients(q1.max(q2)));
        }
        Ok(&self.entries[((q1 - 1) * self.q2max + (q2 - 1)) as usize])
    }

    pub fn get(&self, q1: u64, q2: u64) -> Result<f64> {
        let e = self.entry(q1, q2)?;
        match &e.failure {
            Some(err) => Err(err.clone()),
            None => Ok(e.value),
        }
    }

    /// `a_{1,1} = M(f)`.
    pub fn mean_value(&self) -> f64 {
        self.entries[0].value
    }

    /// Entries in row-major order `(1,1), (1,2), ...`.
    pub fn entries(&self) -> &[CoeffEntry] {
        &self.entries
    }

    pub fn failures(&self) -> impl Iterator<Item = (u64, u64, &Error)> {
        self.entries.iter().enumerate().filter_map(move |(i, e)| {
            let i = i as u64;
            e.failure.as_ref().map(|err| (i / self.q2max + 1, i % self.q2max + 1, err))
        })
    }

    /// Same shape with every coefficient replaced by zero.
    pub fn zeroed(&self) -> Self {
        let mut t = self.clone();
        for e in &mut t.entries {
            *e = CoeffEntry { value: 0.0, error: 0.0, failure: None };
        }
        t
    }

    /// Builds a table directly from values, mainly for tests and tooling.
    pub fn from_fn(
        q1max: u64,
        q2max: u64,
        method: Method,
        value: impl Fn(u64, u64) -> f64,
    ) -> Result<Self> {
        if q1max == 0 || q2max == 0 {
            return Err(Error::NotPositive(0));
        }
        let entries = (1..=q1max)
            .flat_map(|q1| (1..=q2max).map(move |q2| (q1, q2)))
            .map(|(q1, q2)| CoeffEntry { value: value(q1, q2), error: 0.0, failure: None })
            .collect();
        Ok(Self { q1max, q2max, method, fallback_from: None, entries })
    }
}

fn fill(q1max: u64, q2max: u64, entry: impl Fn(u64, u64) -> Result<(f64, f64)> + Sync) -> Vec<CoeffEntry> {
    (0..q1max * q2max)
        .into_par_iter()
        .map(|i| CoeffEntry::from_result(entry(i / q2max + 1, i % q2max + 1)))
        .collect()
}

/// Fills a table with the chosen method; per-entry failures are kept in the
/// entries. The Euler product falls back to the double sum when `|M(f)| <= tol`.
pub fn build_coeff_table(
    source: &CoeffSource<'_>,
    q1max: u64,
    q2max: u64,
    method: Method,
    params: &TruncationParams,
) -> Result<CoeffTable> {
    params.validate()?;
    if q1max == 0 || q2max == 0 {
        return Err(Error::NotPositive(0));
    }
    let f = source.function;
    let mut fallback_from = None;
    let mut method = method;
    let entries = loop {
        match method {
            Method::ClosedForm => {
                let closed = source.closed_form.ok_or_else(|| {
                    Error::InvalidParameter("no closed form available for this function".into())
                })?;
                let rel = closed.relative_error();
                break fill(q1max, q2max, |q1, q2| {
                    closed.coefficient(q1, q2).map(|a| (a, a.abs() * rel))
                });
            }
            Method::EulerProduct => {
                let mean = match source.mean {
                    Some(m) => m,
                    None => mean_value(f, params)?,
                };
                if mean.value.abs() <= params.tol && q1max * q2max > 1 {
                    fallback_from = Some(Method::EulerProduct);
                    method = Method::DoubleSum;
                    continue;
                }
                let ep = EulerProduct::with_mean(f, params, mean);
                let proxy = mean.error_proxy;
                break fill(q1max, q2max, |q1, q2| {
                    ep.coefficient(q1, q2).map(|a| (a, a.abs() * proxy))
                });
            }
            Method::DoubleSum => {
                let plan = DoubleSumPlan::new(f, q1max, q2max, params)?;
                break fill(q1max, q2max, |q1, q2| {
                    plan.coefficient(q1, q2).map(|d| (d.value, d.error))
                });
            }
        }
    };
    Ok(CoeffTable { q1max, q2max, method, fallback_from, entries })
}
