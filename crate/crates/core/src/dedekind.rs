//! Dedekind sums as exact rationals.
//!
//! `definition_sum` evaluates the defining `O(n)` sum and serves as the
//! oracle; `reciprocity_sum` descends through the reciprocity identity in
//! `O(log n)` arithmetic steps and must agree exactly. `normalized_frac`
//! returns the fractional part of `S(m,n) = 12·s(m,n)` directly from the
//! normalized modular inverse, without computing the sum at all.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{frac, gcd_u64, mod_inverse};
use crate::{rat, Error, Rat, Result};

fn require_coprime(m: u64, n: u64) -> Result<()> {
    // m = 0 is rejected even against n = 1: the domain is positive.
    if m == 0 || n == 0 || gcd_u64(m, n) != 1 {
        return Err(Error::NotCoprime { m, n });
    }
    Ok(())
}

/// `s(m,n)` by the defining sum, exactly.
///
/// Each term `((km/n))((k/n))` with `0 < k < n` has the common shape
/// `(2r - n)(2k - n) / (4n^2)` where `r = km mod n` (never zero for
/// coprime inputs), so the whole sum is a single integer divided by
/// `4n^2`. The accumulator is `i128`; terms are bounded by `n^2`, so this
/// is exact for every `n` below `2^42`.
pub fn definition_sum(m: u64, n: u64) -> Result<Rat> {
    require_coprime(m, n)?;
    if n > 1 << 42 {
        return Err(Error::InvalidSpec(format!(
            "defining sum limited to n <= 2^42, got {n}; use the reciprocity path"
        )));
    }
    if n == 1 {
        return Ok(Rat::zero());
    }
    let mr = m % n;
    let ni = n as i128;
    let mut acc: i128 = 0;
    let mut r: u64 = 0;
    for k in 1..n {
        r += mr;
        if r >= n {
            r -= n;
        }
        acc += (2 * r as i128 - ni) * (2 * k as i128 - ni);
    }
    Ok(Rat::new(BigInt::from(acc), BigInt::from(4 * ni * ni)))
}

/// `s(1, n) = (n-1)(n-2) / (12n)`.
fn first_argument_one(n: u64) -> Rat {
    let n = BigInt::from(n);
    Rat::new((&n - 1) * (&n - 2), 12 * n)
}

fn descend(m: u64, n: u64) -> Rat {
    let m = m % n;
    if m == 0 {
        // Only n = 1 reaches this under coprimality.
        return Rat::zero();
    }
    if m == 1 {
        return first_argument_one(n);
    }
    // s(m,n) + s(n,m) = -1/4 + (m^2 + n^2 + 1) / (12mn)
    let mb = BigInt::from(m);
    let nb = BigInt::from(n);
    let cross = Rat::new(&mb * &mb + &nb * &nb + 1, 12 * mb * nb);
    cross - rat(1, 4) - descend(n % m, m)
}

/// `s(m,n)` by reciprocity descent; equals [`definition_sum`] exactly.
pub fn reciprocity_sum(m: u64, n: u64) -> Result<Rat> {
    require_coprime(m, n)?;
    Ok(descend(m, n))
}

/// Fractional part of `S(m,n) = 12·s(m,n)`, computed as
/// `{(m + m⁻¹ mod n) / n}` from the normalized inverse.
pub fn normalized_frac(m: u64, n: u64) -> Result<Rat> {
    require_coprime(m, n)?;
    let inv = mod_inverse(m, n)?.value();
    let num = ((m % n) as u128 + inv as u128) % n as u128;
    Ok(Rat::new(BigInt::from(num), BigInt::from(n)))
}

/// Fractional part `{rho · s(m,n)}`, exactly.
///
/// `rho` is carried as an exact rational (decimal input parses to one),
/// so the product and the reduction mod 1 are exact and boundary
/// classification needs no tolerance. For `rho = 12` this agrees with
/// [`normalized_frac`] identically.
pub fn scaled_frac(rho: &Rat, m: u64, n: u64) -> Result<Rat> {
    if rho.is_zero() {
        return Err(Error::ZeroRho);
    }
    Ok(frac(&(rho * reciprocity_sum(m, n)?)))
}

/// A computed Dedekind sum with its normalized companion `S = 12·s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DedekindValue {
    pub m: u64,
    pub n: u64,
    pub s: Rat,
    pub normalized: Rat,
}

impl DedekindValue {
    pub fn compute(m: u64, n: u64) -> Result<Self> {
        let s = reciprocity_sum(m, n)?;
        let normalized = &s * rat(12, 1);
        Ok(Self {
            m,
            n,
            s,
            normalized,
        })
    }

    /// Reduced denominator of `S(m,n)`.
    pub fn least_denominator(&self) -> BigInt {
        self.normalized.denom().clone()
    }
}
