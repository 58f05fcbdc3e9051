//! Arithmetic functions of one and two variables, the two-variable Dirichlet
//! convolution and multiplicative functions described by prime-power grids.
//!
//! A multiplicative two-variable function `f` is fixed by its local grid
//! `h_p(e1, e2) = (f * mu)(p^e1, p^e2)` with the implicit `h_p(0, 0) = 1`;
//! [`MultFn2`] stores that grid next to an independent direct evaluator so the
//! two can be checked against each other.

use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;

use crate::arith::{self, Factorization};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

type Eval1<S> = Arc<dyn Fn(u64) -> S + Send + Sync>;
type Local1<S> = Arc<dyn Fn(u64, u32) -> S + Send + Sync>;
type Eval2<S> = Arc<dyn Fn(u64, u64) -> S + Send + Sync>;
type Grid2<S> = Arc<dyn Fn(u64, u32, u32) -> S + Send + Sync>;

/// Default cap on each exponent of a local grid.
pub const DEFAULT_EXPONENT_CAP: u32 = 40;

/// Grid values are memoized only below this prime; larger primes see a
/// handful of low exponents and would only grow the table.
const MEMO_PRIME_LIMIT: u64 = 1 << 16;

/// One-variable arithmetic function, optionally multiplicative with local data
/// `(p, e) -> (f * mu)(p^e) = f(p^e) - f(p^(e-1))` for `e >= 1`.
#[derive(Clone)]
pub struct ArithFn1<S> {
    name: String,
    eval: Eval1<S>,
    local: Option<Local1<S>>,
}

impl<S: Scalar> ArithFn1<S> {
    pub fn new(name: impl Into<String>, eval: impl Fn(u64) -> S + Send + Sync + 'static) -> Self {
        Self { name: name.into(), eval: Arc::new(eval), local: None }
    }

    pub fn multiplicative(
        name: impl Into<String>,
        eval: impl Fn(u64) -> S + Send + Sync + 'static,
        local: impl Fn(u64, u32) -> S + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), eval: Arc::new(eval), local: Some(Arc::new(local)) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, n: u64) -> S {
        (self.eval)(n)
    }

    pub fn is_multiplicative(&self) -> bool {
        self.local.is_some()
    }

    /// `(f * mu)(p^e)`; `None` for non-multiplicative functions or `e = 0`.
    pub fn local(&self, p: u64, e: u32) -> Option<S> {
        match (&self.local, e) {
            (Some(local), 1..) => Some(local(p, e)),
            _ => None,
        }
    }

    /// `(f * mu)(n)` by the one-variable divisor sum.
    pub fn star_mu(&self, n: u64) -> Result<S> {
        let mut acc = S::zero();
        for d in arith::divisors(n)? {
            let mu = arith::mobius(n / d)?;
            if mu != 0 {
                acc = acc + S::from_int(mu) * self.eval(d);
            }
        }
        Ok(acc)
    }

    pub fn to_float(&self) -> ArithFn1<f64> {
        let eval = Arc::clone(&self.eval);
        ArithFn1 {
            name: self.name.clone(),
            eval: Arc::new(move |n| eval(n).to_f64()),
            local: self.local.clone().map(|local| {
                Arc::new(move |p, e| local(p, e).to_f64()) as Local1<f64>
            }),
        }
    }
}

impl<S> fmt::Debug for ArithFn1<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArithFn1")
            .field("name", &self.name)
            .field("multiplicative", &self.local.is_some())
            .finish()
    }
}

/// `delta(n1, n2)`: 1 at `(1, 1)`, else 0.
pub fn delta2<S: Scalar>(n1: u64, n2: u64) -> S {
    if n1 == 1 && n2 == 1 {
        S::one()
    } else {
        S::zero()
    }
}

/// `mu(n1, n2) = mu(n1) mu(n2)`.
pub fn mobius2(n1: u64, n2: u64) -> Result<i64> {
    Ok(arith::mobius(n1)? * arith::mobius(n2)?)
}

/// `(f * g)(n1, n2) = sum_{m1 | n1, m2 | n2} f(m1, m2) g(n1/m1, n2/m2)`.
pub fn convolve2<S, F, G>(f: F, g: G, n1: u64, n2: u64) -> Result<S>
where
    S: Scalar,
    F: Fn(u64, u64) -> S,
    G: Fn(u64, u64) -> S,
{
    let d1 = arith::divisors(n1)?;
    let d2 = arith::divisors(n2)?;
    let mut acc = S::zero();
    for &m1 in &d1 {
        for &m2 in &d2 {
            acc = acc + f(m1, m2) * g(n1 / m1, n2 / m2);
        }
    }
    Ok(acc)
}

/// `(f * mu)(n1, n2)` by convolution with the two-variable Mobius function.
pub fn f_star_mu<S, F>(f: F, n1: u64, n2: u64) -> Result<S>
where
    S: Scalar,
    F: Fn(u64, u64) -> S,
{
    let d1 = arith::divisors(n1)?;
    let d2 = arith::divisors(n2)?;
    let mut acc = S::zero();
    for &m1 in &d1 {
        let mu1 = arith::mobius(n1 / m1)?;
        if mu1 == 0 {
            continue;
        }
        for &m2 in &d2 {
            let mu2 = arith::mobius(n2 / m2)?;
            if mu2 != 0 {
                acc = acc + S::from_int(mu1 * mu2) * f(m1, m2);
            }
        }
    }
    Ok(acc)
}

/// Multiplicative function of two variables: a direct evaluator plus the
/// local grid `(p, e1, e2) -> (f * mu)(p^e1, p^e2)` defined for `e1 + e2 >= 1`.
///
/// Grid values are memoized per `(p, e1, e2)` for small primes; exponents above the cap are
/// rejected with [`Error::ExponentCap`].
#[derive(Clone)]
pub struct MultFn2<S> {
    description: String,
    eval: Eval2<S>,
    grid: Grid2<S>,
    memo: Arc<DashMap<(u64, u32, u32), S>>,
    exponent_cap: u32,
    diagonal: bool,
}

impl<S: Scalar> MultFn2<S> {
    pub fn new(
        description: impl Into<String>,
        eval: impl Fn(u64, u64) -> S + Send + Sync + 'static,
        grid: impl Fn(u64, u32, u32) -> S + Send + Sync + 'static,
    ) -> Self {
        Self {
            description: description.into(),
            eval: Arc::new(eval),
            grid: Arc::new(grid),
            memo: Arc::new(DashMap::new()),
            exponent_cap: DEFAULT_EXPONENT_CAP,
            diagonal: false,
        }
    }

    /// Declares that the grid vanishes off the diagonal `e1 = e2`.
    pub fn with_diagonal_support(mut self) -> Self {
        self.diagonal = true;
        self
    }

    pub fn with_exponent_cap(mut self, cap: u32) -> Self {
        self.exponent_cap = cap;
        self.memo = Arc::new(DashMap::new());
        self
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn exponent_cap(&self) -> u32 {
        self.exponent_cap
    }

    pub fn has_diagonal_support(&self) -> bool {
        self.diagonal
    }

    /// Direct evaluation `f(n1, n2)`.
    pub fn eval(&self, n1: u64, n2: u64) -> S {
        (self.eval)(n1, n2)
    }

    /// Grid value `(f * mu)(p^e1, p^e2)`, 1 at `(0, 0)`.
    pub fn local(&self, p: u64, e1: u32, e2: u32) -> Result<S> {
        if e1 == 0 && e2 == 0 {
            return Ok(S::one());
        }
        if self.diagonal && e1 != e2 {
            return Ok(S::zero());
        }
        if e1 > self.exponent_cap || e2 > self.exponent_cap {
            return Err(Error::ExponentCap { p, e1, e2, cap: self.exponent_cap });
        }
        if p >= MEMO_PRIME_LIMIT {
            return Ok((self.grid)(p, e1, e2));
        }
        if let Some(v) = self.memo.get(&(p, e1, e2)) {
            return Ok(v.clone());
        }
        let v = (self.grid)(p, e1, e2);
        self.memo.insert((p, e1, e2), v.clone());
        Ok(v)
    }

    /// `f(p^a, p^b)` rebuilt from the grid by the finite double sum over
    /// `d1 <= a`, `d2 <= b`.
    pub fn local_value(&self, p: u64, a: u32, b: u32) -> Result<S> {
        let mut acc = S::zero();
        for d1 in 0..=a {
            for d2 in 0..=b {
                acc = acc + self.local(p, d1, d2)?;
            }
        }
        Ok(acc)
    }

    /// `f(n1, n2) = prod_p f(p^{v_p(n1)}, p^{v_p(n2)})` from the grid.
    pub fn mult2_eval(&self, n1: u64, n2: u64) -> Result<S> {
        let mut acc = S::one();
        for (p, a, b) in joint_valuations(&arith::factorize(n1)?, &arith::factorize(n2)?) {
            acc = acc * self.local_value(p, a, b)?;
        }
        Ok(acc)
    }

    /// `(f * mu)(n1, n2)` as the product of grid values.
    pub fn star_mu(&self, n1: u64, n2: u64) -> Result<S> {
        let mut acc = S::one();
        for (p, a, b) in joint_valuations(&arith::factorize(n1)?, &arith::factorize(n2)?) {
            acc = acc * self.local(p, a, b)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// Same function with values converted to `f64`.
    pub fn to_float(&self) -> MultFn2<f64> {
        let eval = Arc::clone(&self.eval);
        let grid = Arc::clone(&self.grid);
        MultFn2 {
            description: self.description.clone(),
            eval: Arc::new(move |n1, n2| eval(n1, n2).to_f64()),
            grid: Arc::new(move |p, e1, e2| grid(p, e1, e2).to_f64()),
            memo: Arc::new(DashMap::new()),
            exponent_cap: self.exponent_cap,
            diagonal: self.diagonal,
        }
    }
}

impl<S> fmt::Debug for MultFn2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultFn2")
            .field("description", &self.description)
            .field("exponent_cap", &self.exponent_cap)
            .field("diagonal", &self.diagonal)
            .finish()
    }
}

/// Merge two factorizations into `(p, v_p(a), v_p(b))` over primes dividing `ab`.
pub(crate) fn joint_valuations(a: &Factorization, b: &Factorization) -> Vec<(u64, u32, u32)> {
    let (fa, fb) = (a.factors(), b.factors());
    let mut out = Vec::with_capacity(fa.len() + fb.len());
    let (mut i, mut j) = (0, 0);
    while i < fa.len() || j < fb.len() {
        match (fa.get(i), fb.get(j)) {
            (Some(&(p, e)), Some(&(q, _))) if p < q => {
                out.push((p, e, 0));
                i += 1;
            }
            (Some(&(p, e)), Some(&(q, f))) if p == q => {
                out.push((p, e, f));
                i += 1;
                j += 1;
            }
            (_, Some(&(q, f))) => {
                out.push((q, 0, f));
                j += 1;
            }
            (Some(&(p, e)), None) => {
                out.push((p, e, 0));
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// `F(n1, n2) = g((n1, n2))` for multiplicative `g`; the grid is
/// `g(p^k) - g(p^(k-1))` on the diagonal `k = l >= 1` and 0 elsewhere.
pub fn gcd_lift<S: Scalar>(g: &ArithFn1<S>) -> Result<MultFn2<S>> {
    let local = g.local.clone().ok_or(Error::NotMultiplicative)?;
    let eval = Arc::clone(&g.eval);
    let lifted = MultFn2::new(
        format!("{}((n1,n2))", g.name),
        move |n1, n2| eval(arith::gcd(n1, n2)),
        move |p, e1, e2| if e1 == e2 { local(p, e1) } else { S::zero() },
    );
    Ok(lifted.with_diagonal_support())
}

/// Constant function 1 as a two-variable multiplicative function.
pub fn constant_one<S: Scalar>() -> MultFn2<S> {
    MultFn2::new("1", |_, _| S::one(), |_, _, _| S::zero())
}

/// Exact rational `1/p^k` helper for grid definitions.
pub(crate) fn inverse_power(p: u64, k: u32) -> Rational {
    Rational::new(1, (p as i128).pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn phi_over_id() -> ArithFn1<Rational> {
        ArithFn1::multiplicative(
            "phi/id",
            |n| Rational::new(arith::euler_phi(n).unwrap() as i128, n as i128),
            |p, e| if e == 1 { -inverse_power(p, 1) } else { Rational::from_integer(0) },
        )
    }

    fn sigma_over_id() -> ArithFn1<Rational> {
        ArithFn1::multiplicative(
            "sigma/id",
            |n| Rational::new(arith::sigma_s_int(n, 1).unwrap() as i128, n as i128),
            |p, e| inverse_power(p, e),
        )
    }

    #[test]
    fn convolution_examples() {
        let one = |_: u64, _: u64| Rational::from_integer(1);
        let g = |n1: u64, n2: u64| Rational::new(n1 as i128 + 2 * n2 as i128, 3);
        for (n1, n2) in [(1, 1), (4, 6), (12, 5)] {
            assert_eq!(convolve2(delta2::<Rational>, g, n1, n2).unwrap(), g(n1, n2));
        }
        let mu2 = |a: u64, b: u64| Rational::from_integer(mobius2(a, b).unwrap() as i128);
        assert_eq!(convolve2(mu2, one, 2, 3).unwrap(), Rational::from_integer(0));
        assert_eq!(convolve2(one, one, 4, 1).unwrap(), Rational::from_integer(3));
    }

    #[test]
    fn mobius2_examples() {
        assert_eq!(mobius2(1, 1).unwrap(), 1);
        assert_eq!(mobius2(2, 3).unwrap(), 1);
        assert_eq!(mobius2(4, 3).unwrap(), 0);
    }

    #[test]
    fn ring_identity() {
        let one = |_: u64, _: u64| 1i64;
        for n1 in 1..=50 {
            for n2 in 1..=50 {
                let v: f64 = convolve2(
                    |a, b| mobius2(a, b).unwrap() as f64,
                    |a, b| one(a, b) as f64,
                    n1,
                    n2,
                )
                .unwrap();
                assert_eq!(v, delta2::<f64>(n1, n2), "({n1},{n2})");
            }
        }
    }

    #[test]
    fn f_star_mu_examples() {
        let f = catalog::phi_product_exact();
        let at = |n1, n2| f_star_mu(|a, b| f.eval(a, b), n1, n2).unwrap();
        assert_eq!(at(2, 1), Rational::new(-1, 2));
        assert_eq!(at(2, 2), Rational::new(1, 2));
        let one = constant_one::<Rational>();
        for (n1, n2) in [(2, 1), (3, 5), (4, 4)] {
            assert!(f_star_mu(|a, b| one.eval(a, b), n1, n2).unwrap().is_zero());
        }
    }

    #[test]
    fn grid_matches_convolution_at_prime_powers() {
        let f = catalog::phi_product_exact();
        for p in [2u64, 3, 5, 7] {
            for e1 in 0..=3 {
                for e2 in 0..=3 {
                    let (n1, n2) = (p.pow(e1), p.pow(e2));
                    let conv = f_star_mu(|a, b| f.eval(a, b), n1, n2).unwrap();
                    assert_eq!(f.local(p, e1, e2).unwrap(), conv, "p={p} ({e1},{e2})");
                }
            }
        }
    }

    #[test]
    fn mult2_eval_examples() {
        let f = catalog::phi_product_exact();
        assert_eq!(f.mult2_eval(1, 1).unwrap(), Rational::from_integer(1));
        assert_eq!(f.mult2_eval(2, 2).unwrap(), Rational::new(1, 2));
        let s = gcd_lift(&sigma_over_id()).unwrap();
        assert_eq!(s.mult2_eval(6, 4).unwrap(), Rational::new(3, 2));
    }

    #[test]
    fn gcd_lift_grids() {
        let one = ArithFn1::multiplicative("1", |_| Rational::from_integer(1), |_, _| Rational::from_integer(0));
        let lifted = gcd_lift(&one).unwrap();
        for (p, e1, e2) in [(2, 1, 0), (3, 1, 1), (5, 2, 2), (7, 0, 3)] {
            assert!(lifted.local(p, e1, e2).unwrap().is_zero());
        }
        assert_eq!(lifted.eval(12, 18), Rational::from_integer(1));

        let phi = gcd_lift(&phi_over_id()).unwrap();
        assert_eq!(phi.local(5, 1, 1).unwrap(), Rational::new(-1, 5));
        assert!(phi.local(5, 1, 0).unwrap().is_zero());

        let sigma = gcd_lift(&sigma_over_id()).unwrap();
        for e in 1..5 {
            assert_eq!(sigma.local(3, e, e).unwrap(), inverse_power(3, e));
        }

        let plain = ArithFn1::new("id", |n| Rational::from_integer(n as i128));
        assert_eq!(gcd_lift(&plain).unwrap_err(), Error::NotMultiplicative);
    }

    #[test]
    fn gcd_lift_evaluates_on_gcd() {
        let phi = phi_over_id();
        let lifted = gcd_lift(&phi).unwrap();
        for n1 in 1..=100 {
            for n2 in 1..=100 {
                let g = phi.eval(arith::gcd(n1, n2));
                assert_eq!(lifted.eval(n1, n2), g);
                assert_eq!(lifted.mult2_eval(n1, n2).unwrap(), g);
            }
        }
    }

    #[test]
    fn one_variable_local_data_matches_differences() {
        for g in [phi_over_id(), sigma_over_id()] {
            for p in [2u64, 3, 5, 11] {
                for e in 1..6 {
                    let diff = g.eval(p.pow(e)) - g.eval(p.pow(e - 1));
                    assert_eq!(g.local(p, e).unwrap(), diff);
                    assert_eq!(g.star_mu(p.pow(e)).unwrap(), diff);
                }
            }
        }
    }

    #[test]
    fn exponent_cap_is_enforced() {
        let f = catalog::phi_product_exact().with_exponent_cap(3);
        assert!(f.local(2, 3, 3).is_ok());
        assert_eq!(
            f.local(2, 4, 0).unwrap_err(),
            Error::ExponentCap { p: 2, e1: 4, e2: 0, cap: 3 }
        );
        assert!(matches!(f.mult2_eval(16, 1), Err(Error::ExponentCap { .. })));
    }
}
