//! Exact integer and rational primitives: gcd, normalized modular
//! inverse, sawtooth, and fractional part.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::{rat, Error, Rat, Result};

/// Greatest common divisor with `gcd(0, 0) = 0`.
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        return (a, 1, 0);
    }
    let (g, x, y) = ext_gcd(b, a % b);
    (g, y, x - (a / b) * y)
}

/// A residue normalized into `[1, n]` rather than `[0, n-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        if value < 1 || value > modulus {
            return Err(Error::InvalidSpec(format!(
                "residue {value} outside [1, {modulus}]"
            )));
        }
        Ok(Self { value, modulus })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

/// Inverse of `m` modulo `n`, normalized into `[1, n]`.
///
/// For `n = 1` the inverse is `1`. Inputs with `m > n` are reduced first.
pub fn mod_inverse(m: u64, n: u64) -> Result<Residue> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    if n == 1 {
        return Residue::new(1, 1);
    }
    let r = m % n;
    let (g, x, _) = ext_gcd(r as i128, n as i128);
    if g != 1 {
        return Err(Error::NotInvertible { m, n });
    }
    let v = x.rem_euclid(n as i128) as u64;
    // v = 0 is impossible for n > 1 since 0 is never a unit.
    Residue::new(v, n)
}

/// Sawtooth `((x))`: `x - floor(x) - 1/2` off the integers, `0` on them.
pub fn sawtooth(x: &Rat) -> Rat {
    if x.is_integer() {
        return Rat::zero();
    }
    x - x.floor() - rat(1, 2)
}

/// Fractional part `x - floor(x)`, exactly in `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

/// Floor of the integer square root.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    // Fix up the float estimate.
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Nearest `f64` to an exact rational.
pub fn rat_to_f64(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parse `"12"`, `"-3/7"`, or a decimal like `"0.25"` into an exact
/// rational. Decimal input is exact: `"0.1"` becomes `1/10`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidSpec(format!("cannot parse '{s}' as a rational"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((whole, fractional)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if fractional.is_empty() || !fractional.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if !whole_digits.is_empty() && !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int_part: BigInt = if whole_digits.is_empty() {
            BigInt::ZERO
        } else {
            whole_digits.parse().map_err(|_| bad())?
        };
        let frac_part: BigInt = fractional.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(fractional.len() as u32);
        let magnitude = Rat::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::SplitMix64;
    use num_traits::One;

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_u64(0, 7), 7);
        assert_eq!(gcd_u64(12, 18), 6);
        assert_eq!(gcd_u64(35, 64), 1);
        assert_eq!(gcd_u64(0, 0), 0);
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(1, 7).unwrap().value(), 1);
        assert_eq!(mod_inverse(3, 10).unwrap().value(), 7);
        assert_eq!(mod_inverse(2, 5).unwrap().value(), 3);
        assert_eq!(mod_inverse(5, 1).unwrap().value(), 1);
        assert_eq!(mod_inverse(6, 9), Err(Error::NotInvertible { m: 6, n: 9 }));
    }

    #[test]
    fn mod_inverse_exhaustive_up_to_1e4() {
        use rayon::prelude::*;
        (1..=10_000u64).into_par_iter().for_each(|n| {
            for m in 1..=n {
                if gcd_u64(m, n) == 1 {
                    let inv = mod_inverse(m, n).unwrap().value();
                    assert!(inv >= 1 && inv <= n);
                    assert_eq!((m as u128 * inv as u128) % n as u128, 1 % n as u128);
                }
            }
        });
    }

    #[test]
    fn sawtooth_examples() {
        assert_eq!(sawtooth(&rat(1, 2)), Rat::zero());
        assert_eq!(sawtooth(&rat(1, 3)), rat(-1, 6));
        assert_eq!(sawtooth(&rat(7, 3)), rat(-1, 6));
        assert_eq!(sawtooth(&rat(3, 1)), Rat::zero());
        assert_eq!(sawtooth(&rat(-1, 4)), rat(1, 4));
    }

    #[test]
    fn frac_examples() {
        assert_eq!(frac(&rat(5, 3)), rat(2, 3));
        assert_eq!(frac(&rat(-1, 4)), rat(3, 4));
        assert_eq!(frac(&rat(2, 1)), Rat::zero());
    }

    #[test]
    fn sawtooth_and_frac_identities_random() {
        // 10^4 seeded random rationals: oddness off the integers,
        // periodicity, and frac(x) + floor(x) = x.
        let mut rng = SplitMix64::new(0x5EED);
        for _ in 0..10_000 {
            let num = (rng.next_u64() % 2_000_001) as i64 - 1_000_000;
            let den = (rng.next_u64() % 1_000 + 1) as i64;
            let x = rat(num, den);
            if !x.is_integer() {
                assert_eq!(sawtooth(&x) + sawtooth(&-x.clone()), Rat::zero());
            }
            let shifted = &x + Rat::one();
            assert_eq!(sawtooth(&shifted), sawtooth(&x));
            assert_eq!(frac(&x) + x.floor(), x);
        }
    }

    #[test]
    fn parse_rat_forms() {
        assert_eq!(parse_rat("12").unwrap(), rat(12, 1));
        assert_eq!(parse_rat("-3/7").unwrap(), rat(-3, 7));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("10/4").unwrap(), rat(5, 2));
        assert!(parse_rat("").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
        assert!(parse_rat("1.2.3").is_err());
    }

    #[test]
    fn isqrt_exact() {
        for n in 0..2_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt(u64::MAX), (1u64 << 32) - 1);
    }
}
