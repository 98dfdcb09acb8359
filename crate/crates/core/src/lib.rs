//! Exact-arithmetic toolkit for Dedekind sums and their statistics.
//!
//! The crate computes, at desk scale and with brute-force cross-checks:
//!
//! - Dedekind sums `s(m,n)` as exact rationals, by the defining sum
//!   (`O(n)`) and by reciprocity descent (`O(log n)`), together with the
//!   normalized value `S(m,n) = 12·s(m,n)` and its fractional part;
//! - least denominators `q(n)` of the collection `{S(m,n)}`, their partial
//!   sums via a smallest-prime-factor sieve, and the mean-value constant
//!   as a truncated Euler product with a rigorous tail bound;
//! - exponential sums with Kloosterman fractions `e(b·m⁻¹/n)` over
//!   weighted grids and over windowed pair sets, including the Fourier
//!   completion of the window constraint;
//! - exact star discrepancy of finite point multisets in `[0,1)`, the
//!   Erdős–Turán upper bound with explicit constants, and evaluators for
//!   the discrepancy bounds reported by the experiments.
//!
//! # Conventions
//!
//! - `(X, 2X]` half-open ranges everywhere a set "lives at anchor X".
//! - The sawtooth `((x))` is `x − ⌊x⌋ − 1/2` for non-integer `x` and `0`
//!   on integers.
//! - Discrepancy counting uses the closed interval `[0, λ]`.
//! - Bound evaluators set every implied constant to 1 and every `o(1)`
//!   exponent to 0; they report ratios, they never assert inequalities
//!   that depend on unquantified constants.
//! - All floating accumulation is Neumaier-compensated with fixed-size
//!   blocked reduction, so results are byte-identical across thread
//!   counts.

// Divisibility tests are spelled `n % p == 0` throughout.
#![allow(clippy::manual_is_multiple_of)]

pub mod accum;
pub mod arith;
pub mod dedekind;
pub mod denominators;
pub mod discrepancy;
pub mod expsums;
pub mod generators;
pub mod sieve;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision reduced fraction; the carrier for all exact values.
///
/// `num_rational::BigRational` keeps the invariants this crate relies on:
/// the stored fraction is always reduced and the denominator is positive,
/// with zero represented as `0/1`.
pub type Rat = BigRational;

/// Shorthand for a `Rat` from an integer pair; panics on zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{m} is not invertible modulo {n}")]
    NotInvertible { m: u64, n: u64 },
    #[error("requires coprimality: gcd({m}, {n}) != 1")]
    NotCoprime { m: u64, n: u64 },
    #[error("scale factor rho must be nonzero")]
    ZeroRho,
    #[error("inverse shift b must be nonzero")]
    ZeroShift,
    #[error("zero modulus")]
    ZeroModulus,
    #[error("smoothness bound {bound} must be at least 2")]
    SmoothnessBound { bound: u64 },
    #[error("prime limit {limit} must be at least 2")]
    PrimeLimit { limit: u64 },
    #[error("n = {n} is below the asymptotic regime (need n >= 16)")]
    AsymptoticRegime { n: u64 },
    #[error("window ({start}, {start}+{len}] violates {anchor} <= K < K+L <= {}", 2 * anchor)]
    InvalidWindow { start: u64, len: u64, anchor: u64 },
    #[error("no window defined for n = {n}")]
    MissingWindow { n: u64 },
    #[error("element {value} outside ({anchor}, {}]", 2 * anchor)]
    OutOfRange { value: u64, anchor: u64 },
    #[error("anchors must satisfy M <= N, got M = {m_anchor}, N = {n_anchor}")]
    AnchorOrder { m_anchor: u64, n_anchor: u64 },
    #[error("point {value} outside [0, 1)")]
    PointOutOfRange { value: f64 },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
