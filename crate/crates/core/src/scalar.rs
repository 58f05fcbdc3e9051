use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{ToPrimitive, Zero};

/// Exact rational values for the families whose identities must hold bit-for-bit.
pub type Rational = num_rational::Ratio<i128>;

/// Value type of an arithmetic function: exact rationals or `f64`.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(numer: i64, denom: i64) -> Self;
    fn to_f64(&self) -> f64;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }

    fn one() -> Self {
        Rational::from_integer(1)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(numer as i128, denom as i128)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| *self.numer() as f64 / *self.denom() as f64)
    }
}
