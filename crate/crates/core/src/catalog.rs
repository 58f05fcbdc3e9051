//! Built-in function families with their direct evaluators, local grids and
//! closed-form coefficients.
//!
//! Two-variable families:
//!
//! | name | `f(n1, n2)` | `a_{q1,q2}` |
//! |---|---|---|
//! | `phi_product` | `phi(n1 n2)/(n1 n2)` | `M mu(q1) mu(q2) / (phi((q1,q2)) phi~(q1 q2))` |
//! | `custom_32` | product of local values `1 - p/(p^2+1)`, `1 - 2p/(p^2+1)` | `M mu(q1 q2) / phi_2(q1 q2)` |
//! | `sigma_gcd(s)` | `sigma_s(g)/g^s`, `g = (n1, n2)` | `zeta(s+2) / [q1,q2]^(s+2)` |
//! | `tau_gcd` | `tau(g)` | `zeta(2) / [q1,q2]^2` |
//! | `phi_gcd(s)` | `phi_s(g)/g^s` | `mu([q1,q2]) / (zeta(s+2) phi_{s+2}([q1,q2]))` |
//! | `delta_gcd` | `delta(g)` | `mu([q1,q2]) / (zeta(2) phi_2([q1,q2]))` |
//! | `r_gcd` | `r(g)/4` | `M chi([q1,q2]) / [q1,q2]^2` |
//!
//! One-variable families: `sigma1(s)` with `a_q = zeta(s+1)/q^(s+1)` and `phi1`
//! with `a_q = mu(q) / (zeta(2) phi_2(q))`. The one-variable expansions of
//! `tau(n)` and `r(n)` only converge conditionally and are rejected.
//!
//! Two-variable coefficients are `M(f)` times the closed-form ratio `a/M(f)`,
//! with `M(f)` the Euler product computed once at construction.

use std::fmt;
use std::sync::Arc;

use crate::arith::{self, Factorization};
use crate::dirichlet2::{gcd_lift, inverse_power, joint_valuations, ArithFn1, MultFn2};
use crate::engine::{mean_value, primes_to, ClosedForm, MeanValue, TruncationParams};
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::zeta::zeta;

pub const TWO_VARIABLE: [&str; 7] =
    ["phi_product", "custom_32", "sigma_gcd", "tau_gcd", "phi_gcd", "delta_gcd", "r_gcd"];
pub const ONE_VARIABLE: [&str; 2] = ["sigma1", "phi1"];
/// Documented but never evaluated.
pub const UNSUPPORTED: [&str; 2] = ["tau1", "r1"];

pub fn names() -> impl Iterator<Item = &'static str> {
    TWO_VARIABLE.into_iter().chain(ONE_VARIABLE)
}

fn rational(n: u64, d: u64) -> Rational {
    Rational::new(n as i128, d as i128)
}

fn r0() -> Rational {
    Rational::from_integer(0)
}

/// Primes dividing `n1 n2`.
fn primes_of_pair(n1: u64, n2: u64) -> Vec<(u64, u32, u32)> {
    let f1 = arith::factorize(n1).expect("positive argument");
    let f2 = arith::factorize(n2).expect("positive argument");
    joint_valuations(&f1, &f2)
}

/// `phi(n1 n2) / (n1 n2)` with exact rational values.
pub fn phi_product_exact() -> MultFn2<Rational> {
    MultFn2::new(
        "phi(n1 n2)/(n1 n2)",
        |n1, n2| {
            primes_of_pair(n1, n2)
                .into_iter()
                .fold(Rational::from_integer(1), |acc, (p, _, _)| acc * rational(p - 1, p))
        },
        |p, e1, e2| match (e1, e2) {
            (1, 0) | (0, 1) => -inverse_power(p, 1),
            (1, 1) => inverse_power(p, 1),
            _ => r0(),
        },
    )
}

/// The multiplicative function fixed by its local values
/// `f(p^k, p^l) = 1 - p/(p^2+1)` when exactly one of `k, l` is 0 and
/// `1 - 2p/(p^2+1)` when both are positive.
pub fn custom_32_exact() -> MultFn2<Rational> {
    MultFn2::new(
        "f(p^k,p^l) = 1 - p/(p^2+1) or 1 - 2p/(p^2+1)",
        |n1, n2| {
            primes_of_pair(n1, n2).into_iter().fold(Rational::from_integer(1), |acc, (p, k, l)| {
                let d = p * p + 1;
                let local = if k > 0 && l > 0 { rational(d - 2 * p, d) } else { rational(d - p, d) };
                acc * local
            })
        },
        |p, e1, e2| match (e1, e2) {
            (1, 0) | (0, 1) => -rational(p, p * p + 1),
            _ => r0(),
        },
    )
}

pub fn tau_gcd_exact() -> MultFn2<Rational> {
    let g = ArithFn1::multiplicative(
        "tau",
        |n| Rational::from_integer(arith::tau(n).expect("positive argument") as i128),
        |_, _| Rational::from_integer(1),
    );
    gcd_lift(&g).expect("multiplicative")
}

pub fn delta_gcd_exact() -> MultFn2<Rational> {
    let g = ArithFn1::multiplicative(
        "delta",
        |n| Rational::from_integer(i128::from(n == 1)),
        |_, e| if e == 1 { Rational::from_integer(-1) } else { r0() },
    );
    gcd_lift(&g).expect("multiplicative")
}

/// `r(g)/4` by lattice counting, with the local table of `r/4` as grid.
pub fn r_gcd_exact() -> MultFn2<Rational> {
    let g = ArithFn1::multiplicative(
        "r/4",
        |n| Rational::new(arith::r2_lattice(n).expect("positive argument") as i128, 4),
        |p, e| {
            let now = arith::r2_quarter_local(p, e) as i128;
            let before = arith::r2_quarter_local(p, e - 1) as i128;
            Rational::from_integer(now - before)
        },
    );
    gcd_lift(&g).expect("multiplicative")
}

/// `sigma_s(n)/n^s` with local data `p^-(es)`.
pub fn sigma_over_power(s: f64) -> ArithFn1<f64> {
    ArithFn1::multiplicative(
        format!("sigma_{s}/id^{s}"),
        move |n| arith::sigma_s(n, s).expect("positive argument") / (n as f64).powf(s),
        move |p, e| (p as f64).powf(-(e as f64) * s),
    )
}

/// `phi_s(n)/n^s` with local data `-p^-s` at `e = 1`.
pub fn phi_over_power(s: f64) -> ArithFn1<f64> {
    ArithFn1::multiplicative(
        format!("phi_{s}/id^{s}"),
        move |n| arith::phi_s(n, s).expect("positive argument") / (n as f64).powf(s),
        move |p, e| if e == 1 { -(p as f64).powf(-s) } else { 0.0 },
    )
}

/// Constants bounding the tails of a family for primes above the cutoff:
/// `A_p - 1 <= abs_constant p^-sigma` and `sum |(f*mu)(p^e1,p^e2)|/p^(e1+e2) <= mean_constant p^-sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Majorant {
    pub sigma: f64,
    pub abs_constant: f64,
    pub mean_constant: f64,
}

impl Majorant {
    /// `sum_{n > P} n^-sigma <= P^(1-sigma)/(sigma-1)`.
    fn prime_tail(&self, prime_cutoff: u64) -> f64 {
        (prime_cutoff as f64).powf(1.0 - self.sigma) / (self.sigma - 1.0)
    }

    /// Bound on `log prod_{p > P} A_p`.
    pub fn abs_tail_log(&self, prime_cutoff: u64) -> f64 {
        self.abs_constant * self.prime_tail(prime_cutoff)
    }

    /// Bound on `|prod_{p > P} L_p - 1|` for the local factors of `M(f)`.
    pub fn mean_slack(&self, prime_cutoff: u64) -> f64 {
        (self.mean_constant * self.prime_tail(prime_cutoff)).exp_m1()
    }
}

type Ratio2 = Arc<dyn Fn(&Factorization, &Factorization) -> f64 + Send + Sync>;
type Local = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

/// A two-variable family.
#[derive(Clone)]
pub struct TwoVariable {
    name: &'static str,
    s: Option<f64>,
    identity: String,
    function: MultFn2<f64>,
    exact: Option<MultFn2<Rational>>,
    gcd_source: Option<ArithFn1<f64>>,
    ratio: Ratio2,
    mean: MeanValue,
    mean_reference: Option<f64>,
    mean_product: &'static str,
    majorant: Majorant,
    abs_local: Local,
    abs_product: f64,
}

impl fmt::Debug for TwoVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoVariable")
            .field("name", &self.name)
            .field("s", &self.s)
            .field("mean", &self.mean)
            .finish()
    }
}

impl TwoVariable {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn parameter(&self) -> Option<f64> {
        self.s
    }

    /// Human-readable statement of the expansion.
    pub fn identity(&self) -> &str {
        &self.identity
    }

    pub fn function(&self) -> &MultFn2<f64> {
        &self.function
    }

    /// Exact rational version for families with rational values.
    pub fn exact_function(&self) -> Option<&MultFn2<Rational>> {
        self.exact.as_ref()
    }

    /// `g` when the family is `g((n1, n2))`.
    pub fn gcd_source(&self) -> Option<&ArithFn1<f64>> {
        self.gcd_source.as_ref()
    }

    pub fn direct(&self, n1: u64, n2: u64) -> f64 {
        self.function.eval(n1, n2)
    }

    /// `M(f)` as the truncated Euler product.
    pub fn mean(&self) -> &MeanValue {
        &self.mean
    }

    /// `M(f)` from zeta values or a series, when one is known.
    pub fn mean_reference(&self) -> Option<f64> {
        self.mean_reference
    }

    /// The infinite product defining `M(f)`.
    pub fn mean_product(&self) -> &'static str {
        self.mean_product
    }

    /// `a_{q1,q2} / M(f)` from the closed form.
    pub fn ratio(&self, q1: u64, q2: u64) -> Result<f64> {
        Ok((self.ratio)(&arith::factorize(q1)?, &arith::factorize(q2)?))
    }

    pub fn ratio_of(&self, f1: &Factorization, f2: &Factorization) -> f64 {
        (self.ratio)(f1, f2)
    }

    pub fn closed_coefficient(&self, q1: u64, q2: u64) -> Result<f64> {
        Ok(self.mean.value * self.ratio(q1, q2)?)
    }

    pub fn majorant(&self) -> Majorant {
        self.majorant
    }

    /// `A_p = sum_{k, l >= 0} |a_{p^k, p^l}| / |M(f)|`.
    pub fn abs_local(&self, p: u64) -> f64 {
        (self.abs_local)(p)
    }

    /// `prod_{p <= P} A_p` at the prime cutoff used for the mean value.
    pub fn abs_product(&self) -> f64 {
        self.abs_product
    }
}

impl ClosedForm for TwoVariable {
    fn coefficient(&self, q1: u64, q2: u64) -> Result<f64> {
        self.closed_coefficient(q1, q2)
    }

    fn relative_error(&self) -> f64 {
        self.majorant.mean_slack(self.mean.prime_cutoff)
    }
}

type Coeff1 = Arc<dyn Fn(&Factorization) -> f64 + Send + Sync>;
type Tail1 = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

/// A one-variable family.
#[derive(Clone)]
pub struct OneVariable {
    name: &'static str,
    s: Option<f64>,
    identity: String,
    function: ArithFn1<f64>,
    coefficient: Coeff1,
    abs_tail: Tail1,
}

impl fmt::Debug for OneVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OneVariable").field("name", &self.name).field("s", &self.s).finish()
    }
}

impl OneVariable {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn parameter(&self) -> Option<f64> {
        self.s
    }

    pub fn identity(&self) -> &str {
        &self.identity
    }

    pub fn function(&self) -> &ArithFn1<f64> {
        &self.function
    }

    pub fn direct(&self, n: u64) -> f64 {
        self.function.eval(n)
    }

    pub fn closed_coefficient(&self, q: u64) -> Result<f64> {
        Ok((self.coefficient)(&arith::factorize(q)?))
    }

    pub fn coefficient_of(&self, q: &Factorization) -> f64 {
        (self.coefficient)(q)
    }

    pub fn mean_reference(&self) -> f64 {
        (self.coefficient)(&arith::factorize(1).expect("1 is positive"))
    }

    /// Upper bound on `sum_{q > Q} |a_q|`.
    pub fn abs_tail(&self, qmax: u64) -> f64 {
        (self.abs_tail)(qmax)
    }
}

#[derive(Debug, Clone)]
pub enum FamilySpec {
    Two(TwoVariable),
    One(OneVariable),
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Two(f) => f.name,
            FamilySpec::One(f) => f.name,
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match self {
            FamilySpec::Two(f) => f.s,
            FamilySpec::One(f) => f.s,
        }
    }

    pub fn identity(&self) -> &str {
        match self {
            FamilySpec::Two(f) => &f.identity,
            FamilySpec::One(f) => &f.identity,
        }
    }

    /// Name with the parameter, e.g. `sigma_gcd(s=1)`.
    pub fn label(&self) -> String {
        match self.parameter() {
            Some(s) => format!("{}(s={s})", self.name()),
            None => self.name().to_string(),
        }
    }

    pub fn as_two(&self) -> Option<&TwoVariable> {
        match self {
            FamilySpec::Two(f) => Some(f),
            FamilySpec::One(_) => None,
        }
    }

    pub fn as_one(&self) -> Option<&OneVariable> {
        match self {
            FamilySpec::One(f) => Some(f),
            FamilySpec::Two(_) => None,
        }
    }
}

// Closed-form pieces evaluated on factorizations.

fn lcm_parts(a: &Factorization, b: &Factorization) -> Vec<(u64, u32)> {
    joint_valuations(a, b).into_iter().map(|(p, k, l)| (p, k.max(l))).collect()
}

fn gcd_parts(a: &Factorization, b: &Factorization) -> Vec<(u64, u32)> {
    joint_valuations(a, b)
        .into_iter()
        .filter(|&(_, k, l)| k.min(l) > 0)
        .map(|(p, k, l)| (p, k.min(l)))
        .collect()
}

fn product_parts(a: &Factorization, b: &Factorization) -> Vec<(u64, u32)> {
    joint_valuations(a, b).into_iter().map(|(p, k, l)| (p, k + l)).collect()
}

fn mu_parts(parts: &[(u64, u32)]) -> f64 {
    if parts.iter().any(|&(_, e)| e > 1) {
        0.0
    } else if parts.len() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn value_parts(parts: &[(u64, u32)]) -> f64 {
    parts.iter().map(|&(p, e)| (p as f64).powi(e as i32)).product()
}

fn phi_parts(parts: &[(u64, u32)]) -> f64 {
    parts.iter().map(|&(p, e)| (p as f64).powi(e as i32 - 1) * (p - 1) as f64).product()
}

/// `phi_s(n) = n^s prod_{p | n} (1 - p^-s)`.
fn jordan_parts(parts: &[(u64, u32)], s: f64) -> f64 {
    parts
        .iter()
        .map(|&(p, e)| {
            let ps = (p as f64).powf(s);
            ps.powi(e as i32) * (1.0 - 1.0 / ps)
        })
        .product()
}

fn phi_tilde_parts(parts: &[(u64, u32)]) -> f64 {
    parts.iter().map(|&(p, _)| (p * p + p - 1) as f64).product()
}

fn chi_parts(parts: &[(u64, u32)]) -> f64 {
    parts.iter().map(|&(p, e)| (arith::chi4(p) as f64).powi(e as i32)).product()
}

/// Catalan's constant `sum_{k >= 0} (-1)^k / (2k+1)^2`, averaging two
/// consecutive partial sums of the alternating series.
pub fn catalan() -> f64 {
    const TERMS: u64 = 200_000;
    let term = |k: u64| {
        let d = (2 * k + 1) as f64;
        let t = 1.0 / (d * d);
        if k % 2 == 0 {
            t
        } else {
            -t
        }
    };
    let mut sum = 0.0;
    for k in (0..TERMS).rev() {
        sum += term(k);
    }
    sum + 0.5 * term(TERMS)
}

fn validate_s(name: &str, s: f64, lower: f64) -> Result<f64> {
    if s.is_finite() && s > lower {
        Ok(s)
    } else {
        Err(Error::InvalidParameter(format!("{name} needs s > {lower}, got {s}")))
    }
}

fn no_parameter(name: &str, s: Option<f64>) -> Result<()> {
    match s {
        Some(v) => Err(Error::InvalidParameter(format!("{name} takes no parameter (got s = {v})"))),
        None => Ok(()),
    }
}

struct TwoBuilder {
    name: &'static str,
    s: Option<f64>,
    identity: String,
    exact: Option<MultFn2<Rational>>,
    function: MultFn2<f64>,
    gcd_source: Option<ArithFn1<f64>>,
    ratio: Ratio2,
    mean_reference: Option<f64>,
    mean_product: &'static str,
    majorant: Majorant,
    abs_local: Local,
}

impl TwoBuilder {
    fn build(self, params: &TruncationParams) -> Result<TwoVariable> {
        let mean = mean_value(&self.function, params)?;
        let primes = primes_to(params.prime_cutoff);
        let abs_product = primes.iter().map(|&p| (self.abs_local)(p)).product();
        Ok(TwoVariable {
            name: self.name,
            s: self.s,
            identity: self.identity,
            function: self.function,
            exact: self.exact,
            gcd_source: self.gcd_source,
            ratio: self.ratio,
            mean,
            mean_reference: self.mean_reference,
            mean_product: self.mean_product,
            majorant: self.majorant,
            abs_local: self.abs_local,
            abs_product,
        })
    }
}

fn exact_two(
    name: &'static str,
    identity: &str,
    exact: MultFn2<Rational>,
    gcd_source: Option<ArithFn1<f64>>,
    ratio: Ratio2,
    mean_reference: Option<f64>,
    mean_product: &'static str,
    majorant: Majorant,
    abs_local: Local,
) -> TwoBuilder {
    TwoBuilder {
        name,
        s: None,
        identity: identity.to_string(),
        function: exact.to_float(),
        exact: Some(exact),
        gcd_source,
        ratio,
        mean_reference,
        mean_product,
        majorant,
        abs_local,
    }
}

/// `(1 + x)/(1 - x)^2`: number of pairs `(k, l)` with `max(k, l) = e` weighted by `x^e`.
fn lcm_pairs_local(x: f64) -> f64 {
    (1.0 + x) / ((1.0 - x) * (1.0 - x))
}

pub fn family(name: &str, s: Option<f64>, params: &TruncationParams) -> Result<FamilySpec> {
    params.validate()?;
    let cutoff = params.prime_cutoff as f64;
    let geometric = |sigma: f64| 1.0 / (1.0 - cutoff.powf(-sigma));
    let two = |b: TwoBuilder| b.build(params).map(FamilySpec::Two);
    match name {
        "phi_product" => {
            no_parameter(name, s)?;
            two(exact_two(
                "phi_product",
                "phi(n1 n2)/(n1 n2) = M(f) sum mu(q1) mu(q2) / (phi((q1,q2)) phi~(q1 q2)) c_q1(n1) c_q2(n2)",
                phi_product_exact(),
                None,
                Arc::new(|a, b| {
                    let g = gcd_parts(a, b);
                    let prod = product_parts(a, b);
                    let mu = mu_parts(a.factors()) * mu_parts(b.factors());
                    if mu == 0.0 {
                        0.0
                    } else {
                        mu / (phi_parts(&g) * phi_tilde_parts(&prod))
                    }
                }),
                None,
                "prod_p (1 - 2/p^2 + 1/p^3)",
                Majorant { sigma: 2.0, abs_constant: 3.0, mean_constant: 3.0 },
                Arc::new(|p| {
                    let p = p as f64;
                    let t = p * p + p - 1.0;
                    1.0 + 2.0 / t + 1.0 / ((p - 1.0) * t)
                }),
            ))
        }
        "custom_32" => {
            no_parameter(name, s)?;
            two(exact_two(
                "custom_32",
                "f(n1,n2) = M(f) sum mu(q1 q2) / phi_2(q1 q2) c_q1(n1) c_q2(n2)",
                custom_32_exact(),
                None,
                Arc::new(|a, b| {
                    let prod = product_parts(a, b);
                    let mu = mu_parts(&prod);
                    if mu == 0.0 {
                        0.0
                    } else {
                        mu / jordan_parts(&prod, 2.0)
                    }
                }),
                None,
                "prod_p (1 - 2/(p^2+1))",
                Majorant { sigma: 2.0, abs_constant: 3.0, mean_constant: 2.0 },
                Arc::new(|p| {
                    let p = p as f64;
                    1.0 + 2.0 / (p * p - 1.0)
                }),
            ))
        }
        "sigma_gcd" => {
            let s = validate_s(name, s.unwrap_or(1.0), -1.0)?;
            let g = sigma_over_power(s);
            let sigma = s + 2.0;
            two(TwoBuilder {
                name: "sigma_gcd",
                s: Some(s),
                identity: format!(
                    "sigma_{s}((n1,n2))/(n1,n2)^{s} = zeta({sigma}) sum c_q1(n1) c_q2(n2) / [q1,q2]^{sigma}"
                ),
                function: gcd_lift(&g)?,
                exact: None,
                gcd_source: Some(g),
                ratio: Arc::new(move |a, b| value_parts(&lcm_parts(a, b)).powf(-sigma)),
                mean_reference: Some(zeta(sigma)?.value),
                mean_product: "zeta(s+2)",
                majorant: Majorant {
                    sigma,
                    abs_constant: 3.0 * geometric(sigma).powi(2),
                    mean_constant: geometric(sigma),
                },
                abs_local: Arc::new(move |p| lcm_pairs_local((p as f64).powf(-sigma))),
            })
        }
        "tau_gcd" => {
            no_parameter(name, s)?;
            let exact = tau_gcd_exact();
            let source = ArithFn1::multiplicative(
                "tau",
                |n| Rational::from_integer(arith::tau(n).expect("positive argument") as i128),
                |_, _| Rational::from_integer(1),
            );
            two(exact_two(
                "tau_gcd",
                "tau((n1,n2)) = zeta(2) sum c_q1(n1) c_q2(n2) / [q1,q2]^2",
                exact,
                Some(source.to_float()),
                Arc::new(|a, b| value_parts(&lcm_parts(a, b)).powi(-2)),
                Some(zeta(2.0)?.value),
                "zeta(2)",
                Majorant {
                    sigma: 2.0,
                    abs_constant: 3.0 * geometric(2.0).powi(2),
                    mean_constant: geometric(2.0),
                },
                Arc::new(|p| lcm_pairs_local((p as f64).powi(-2))),
            ))
        }
        "phi_gcd" => {
            let s = validate_s(name, s.unwrap_or(1.0), -1.0)?;
            let g = phi_over_power(s);
            let sigma = s + 2.0;
            two(TwoBuilder {
                name: "phi_gcd",
                s: Some(s),
                identity: format!(
                    "phi_{s}((n1,n2))/(n1,n2)^{s} = 1/zeta({sigma}) sum mu([q1,q2]) / phi_{sigma}([q1,q2]) c_q1(n1) c_q2(n2)"
                ),
                function: gcd_lift(&g)?,
                exact: None,
                gcd_source: Some(g),
                ratio: Arc::new(move |a, b| {
                    let l = lcm_parts(a, b);
                    let mu = mu_parts(&l);
                    if mu == 0.0 {
                        0.0
                    } else {
                        mu / jordan_parts(&l, sigma)
                    }
                }),
                mean_reference: Some(1.0 / zeta(sigma)?.value),
                mean_product: "1/zeta(s+2)",
                majorant: Majorant {
                    sigma,
                    abs_constant: 3.0 * geometric(sigma),
                    mean_constant: 1.0,
                },
                abs_local: Arc::new(move |p| 1.0 + 3.0 / ((p as f64).powf(sigma) - 1.0)),
            })
        }
        "delta_gcd" => {
            no_parameter(name, s)?;
            let exact = delta_gcd_exact();
            let source = ArithFn1::multiplicative(
                "delta",
                |n| Rational::from_integer(i128::from(n == 1)),
                |_, e| if e == 1 { Rational::from_integer(-1) } else { r0() },
            );
            two(exact_two(
                "delta_gcd",
                "delta((n1,n2)) = 1/zeta(2) sum mu([q1,q2]) / phi_2([q1,q2]) c_q1(n1) c_q2(n2)",
                exact,
                Some(source.to_float()),
                Arc::new(|a, b| {
                    let l = lcm_parts(a, b);
                    let mu = mu_parts(&l);
                    if mu == 0.0 {
                        0.0
                    } else {
                        mu / jordan_parts(&l, 2.0)
                    }
                }),
                Some(1.0 / zeta(2.0)?.value),
                "1/zeta(2)",
                Majorant { sigma: 2.0, abs_constant: 3.0 * geometric(2.0), mean_constant: 1.0 },
                Arc::new(|p| 1.0 + 3.0 / ((p * p) as f64 - 1.0)),
            ))
        }
        "r_gcd" => {
            no_parameter(name, s)?;
            let exact = r_gcd_exact();
            let source = ArithFn1::multiplicative(
                "r/4",
                |n| Rational::new(arith::r2_lattice(n).expect("positive argument") as i128, 4),
                |p, e| {
                    let now = arith::r2_quarter_local(p, e) as i128;
                    let before = arith::r2_quarter_local(p, e - 1) as i128;
                    Rational::from_integer(now - before)
                },
            );
            two(exact_two(
                "r_gcd",
                "r((n1,n2))/4 = M(f) sum chi([q1,q2]) / [q1,q2]^2 c_q1(n1) c_q2(n2)",
                exact,
                Some(source.to_float()),
                Arc::new(|a, b| {
                    let l = lcm_parts(a, b);
                    chi_parts(&l) / value_parts(&l).powi(2)
                }),
                Some(catalan()),
                "prod_{p>2} 1/(1 - chi(p)/p^2)",
                Majorant {
                    sigma: 2.0,
                    abs_constant: 3.0 * geometric(2.0).powi(2),
                    mean_constant: geometric(2.0),
                },
                Arc::new(|p| if p == 2 { 1.0 } else { lcm_pairs_local((p as f64).powi(-2)) }),
            ))
        }
        "sigma1" => {
            // The coefficient series sum |c_q(n)| / q^(s+1) needs s > 0.
            let s = validate_s(name, s.unwrap_or(1.0), 0.0)?;
            let z = zeta(s + 1.0)?.value;
            Ok(FamilySpec::One(OneVariable {
                name: "sigma1",
                s: Some(s),
                identity: format!("sigma_{s}(n)/n^{s} = zeta({}) sum c_q(n) / q^{}", s + 1.0, s + 1.0),
                function: sigma_over_power(s),
                coefficient: Arc::new(move |q| z * value_parts(q.factors()).powf(-(s + 1.0))),
                abs_tail: Arc::new(move |qmax| z * (qmax as f64).powf(-s) / s),
            }))
        }
        "phi1" => {
            no_parameter(name, s)?;
            let z = zeta(2.0)?.value;
            Ok(FamilySpec::One(OneVariable {
                name: "phi1",
                s: None,
                identity: "phi(n)/n = 1/zeta(2) sum mu(q) / phi_2(q) c_q(n)".to_string(),
                function: phi_over_power(1.0),
                coefficient: Arc::new(move |q| {
                    let mu = mu_parts(q.factors());
                    if mu == 0.0 {
                        0.0
                    } else {
                        mu / (z * jordan_parts(q.factors(), 2.0))
                    }
                }),
                // 1/phi_2(q) <= zeta(2)/q^2, so the tail is at most 1/Q.
                abs_tail: Arc::new(|qmax| 1.0 / qmax as f64),
            }))
        }
        "tau1" => Err(Error::UnsupportedFamily {
            name: name.to_string(),
            reason: "tau(n) = -sum (log q / q) c_q(n) converges only conditionally",
        }),
        "r1" => Err(Error::UnsupportedFamily {
            name: name.to_string(),
            reason: "the expansion of r(n) converges only conditionally",
        }),
        other => Err(Error::UnknownFamily(other.to_string())),
    }
}

/// Every evaluable family at its default parameter.
pub fn all_families(params: &TruncationParams) -> Result<Vec<FamilySpec>> {
    names().map(|n| family(n, None, params)).collect()
}
