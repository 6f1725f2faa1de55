//! Shared error type for all modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = 2 is prime but not odd; an odd prime is required")]
    EvenPrime,
    #[error("modulus {0} exceeds the dense-table limit (p must fit in 32 bits)")]
    ModulusTooLarge(u64),
    #[error("0 has no discrete logarithm")]
    ZeroElement,
    #[error("set contains 0, which multiplicative operations reject")]
    ZeroInSet,
    #[error("operation is undefined on the empty set")]
    EmptySet,
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("{what} = {got} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        got: u64,
        lo: u64,
        hi: u64,
    },
    #[error("{d} does not divide p - 1 = {pm1}")]
    NotADivisor { d: u64, pm1: u64 },
    #[error("set is not a multiplicative subgroup")]
    NotASubgroup,
    #[error("sets belong to different moduli ({0} vs {1})")]
    MismatchedModulus(u64, u64),
    #[error("{what}: instance size {got} exceeds the brute-force guard {guard}")]
    TooLargeForBrute {
        what: &'static str,
        got: u128,
        guard: u128,
    },
    #[error("convolution entry {index} is {value}, further than 1e-3 from an integer")]
    ConvolutionNotIntegral { index: usize, value: f64 },
    #[error("moment exponent k must be in 1..=4, got {0}")]
    BadMomentOrder(u32),
    #[error(
        "neither weight family sums to zero (|sum alpha| = {alpha_sum}, |sum beta| = {beta_sum})"
    )]
    MeanZeroViolated { alpha_sum: f64, beta_sum: f64 },
    #[error("|A| must not exceed |B| (got {a} > {b}); swap the sets")]
    SizeOrder { a: usize, b: usize },
    #[error("duplicate point {0:?} in scene")]
    DuplicatePoint(Vec<u64>),
    #[error("duplicate surface {0:?} after projective normalization")]
    DuplicateSurface(Vec<u64>),
    #[error("surface has all-zero coordinate coefficients")]
    DegenerateSurface,
    #[error("scene coordinates must be reduced mod q = {q}, got {got}")]
    CoordinateOutOfRange { q: u64, got: u64 },
    #[error("|P| = {points} exceeds |planes| = {planes}; set the duality flag to swap roles")]
    PointsExceedPlanes { points: usize, planes: usize },
    #[error("dual scene requires every plane to have a nonzero z coefficient")]
    DualUnsupported,
    #[error("point set is not a Cartesian grid A x B")]
    NotAGrid,
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
