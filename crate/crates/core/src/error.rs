use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument must be a positive integer, got {0}")]
    NotPositive(u64),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("requested table size {requested} exceeds the configured cap {cap}")]
    TableTooLarge { requested: u64, cap: u64 },

    #[error("exponential sum c_{q}({n}) left imaginary residue {residue:e}")]
    ImaginaryResidue { q: u64, n: u64, residue: f64 },

    #[error("function is not multiplicative or carries no local data")]
    NotMultiplicative,

    #[error("local value at p={p}, exponents ({e1},{e2}) is beyond the exponent cap {cap}")]
    ExponentCap { p: u64, e1: u32, e2: u32, cap: u32 },

    #[error("local factor at p={p} did not stabilize before the exponent cap")]
    NonStabilizing { p: u64 },

    #[error("mean value {0:e} vanishes within tolerance; the Euler-product formula does not apply")]
    MeanValueVanishes(f64),

    #[error("full local factor vanishes at p={0}")]
    VanishingLocalFactor(u64),

    #[error("double sum for ({q1},{q2}) looks divergent: Cauchy gauges {gauges:?}")]
    DivergenceSuspected { q1: u64, q2: u64, gauges: [f64; 3] },

    #[error("unknown function family `{0}`")]
    UnknownFamily(String),

    #[error("unsupported family `{name}`: {reason}")]
    UnsupportedFamily { name: String, reason: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient table does not cover q = {0}")]
    MissingCoefficients(u64),
}
