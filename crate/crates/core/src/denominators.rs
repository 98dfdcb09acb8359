//! Least denominators `q(n)` of the normalized Dedekind sums
//! `{S(m,n) : gcd(m,n) = 1}`, their partial sums, and the mean-value
//! experiment.
//!
//! `q_formula` is the closed form: for odd `n` it is `q0(n)`, the product
//! of `p^{v_p(n)}` over primes `p | n` with `p ≡ 3 (mod 4)`; for even `n`
//! an extra `2^{v_2(n)-1}` factor appears. `q_bruteforce` minimizes the
//! reduced denominator of `12·s(m,n)` over all `m` coprime to `n` and is
//! the oracle the closed form is checked against.
//!
//! The partial sums obey `Σ_{n≤N} q(n) = (C + o(1)) · N² / sqrt(log N)`.
//! Writing `f(n) = q(n)/n`, `f` is multiplicative with `f(2^a) = 1/2`,
//! `f(p^a) = 1` for `p ≡ 3 (mod 4)` and `f(p^a) = p^{-a}` for
//! `p ≡ 1 (mod 4)`; the mean-value machinery for nonnegative
//! multiplicative functions (prime sums growing like `(1/2)·N/log N`)
//! plus partial summation gives
//!
//! ```text
//! C = (3·sqrt(2) / (4π)) · Π_{p≡1 (4)} (1 - p⁻²)⁻¹ · Π_{p≡3 (4)} (1 - p⁻²)^(-1/2)
//! ```
//!
//! with the Euler factor at 2 equal to `1 + Σ_{a≥1} 2^{-(a+1)} = 3/2`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::accum::Neumaier;
use crate::dedekind::DedekindValue;
use crate::sieve::{factor_with_spf, prime_table, spf_table};
use crate::{Error, Result};

/// `p`-adic valuation: the largest `e` with `p^e | n`.
pub fn valuation(p: u64, n: u64) -> u32 {
    debug_assert!(p >= 2 && n >= 1);
    let mut e = 0;
    let mut n = n;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Prime-exponent pairs of `n` in ascending prime order; the product of
/// `p^e` over the pairs recovers `n`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    debug_assert!(n >= 1);
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn q_from_factors(factors: &[(u64, u32)]) -> u64 {
    let mut q = 1u64;
    for &(p, e) in factors {
        if p == 2 {
            q <<= e - 1;
        } else if p % 4 == 3 {
            q *= p.pow(e);
        }
    }
    q
}

/// Product of `p^{v_p(n)}` over primes `p | n` with `p ≡ 3 (mod 4)`.
pub fn q0(n: u64) -> u64 {
    debug_assert!(n >= 1);
    factorize(n)
        .iter()
        .filter(|&&(p, _)| p % 4 == 3)
        .map(|&(p, e)| p.pow(e))
        .product()
}

/// Least denominator `q(n)` by the closed form.
pub fn q_formula(n: u64) -> u64 {
    debug_assert!(n >= 1);
    q_from_factors(&factorize(n))
}

/// Least denominator by direct minimization: the reduced denominator of
/// `12·s(m,n)` over every `m` coprime to `n` in `[1, n]`.
pub fn q_bruteforce(n: u64) -> u64 {
    debug_assert!(n >= 1);
    let mut best = u64::MAX;
    for m in 1..=n {
        if crate::arith::gcd_u64(m, n) != 1 {
            continue;
        }
        let den = DedekindValue::compute(m, n)
            .expect("coprime by construction")
            .least_denominator()
            .to_u64()
            .expect("denominator of 12·s(m,n) divides 2n");
        best = best.min(den);
        if best == 1 {
            break;
        }
    }
    best
}

/// `Σ_{n≤n_max} q(n)` with valuations batched through a
/// smallest-prime-factor sieve; `O(n_max log n_max)` and exact.
pub fn q_partial_sum(n_max: u64) -> BigUint {
    debug_assert!(n_max >= 1);
    let spf = spf_table(n_max);
    let chunk = 1u64 << 16;
    let starts: Vec<u64> = (1..=n_max).step_by(chunk as usize).collect();
    let partials: Vec<u128> = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + chunk - 1).min(n_max);
            let mut acc: u128 = 0;
            for n in lo..=hi {
                acc += q_from_factors(&factor_with_spf(n, &spf)) as u128;
            }
            acc
        })
        .collect();
    let mut total = BigUint::ZERO;
    for p in partials {
        total += BigUint::from(p);
    }
    total
}

/// The Euler factor of `f(n) = q(n)/n` at the prime 2:
/// `Σ_{a≥0} f(2^a)·2^{-a} = 1 + Σ_{a≥1} 2^{-(a+1)} = 3/2`.
pub const EULER_FACTOR_TWO: f64 = 1.5;

/// Prefactor of the mean-value constant: `3·sqrt(2) / (4π)`.
pub const MEAN_VALUE_PREFACTOR: f64 = 3.0 * std::f64::consts::SQRT_2 / (4.0 * std::f64::consts::PI);

/// A truncated Euler-product value with a rigorous one-sided tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerConstant {
    /// The truncated product times the prefactor.
    pub value: f64,
    /// Upper bound on `C_inf - value` (the products only grow).
    pub tail_error: f64,
    /// Largest prime included.
    pub prime_limit: u64,
}

/// The mean-value constant `C` truncated at `prime_limit`:
/// `(3·sqrt(2)/(4π)) · Π_{p≡1(4), p≤limit} (1-p⁻²)⁻¹
///  · Π_{p≡3(4), p≤limit} (1-p⁻²)^(-1/2)`.
///
/// Tail bound: for `0 < x ≤ 1/9`, `-ln(1-x) ≤ 1.2·x`, and
/// `Σ_{p>L} p⁻² < Σ_{n>L} n⁻² < 1/L`, so the missing log-mass is at most
/// `1.2/L` and `C_inf - C(L) ≤ C(L)·(e^{1.2/L} - 1)`.
pub fn mean_value_constant(prime_limit: u64) -> Result<EulerConstant> {
    if prime_limit < 2 {
        return Err(Error::PrimeLimit { limit: prime_limit });
    }
    let table = prime_table(prime_limit);
    let mut log_acc = Neumaier::new();
    for (p, &is_p) in table.iter().enumerate().skip(3) {
        if !is_p {
            continue;
        }
        let x = 1.0 / (p as f64 * p as f64);
        let term = -(-x).ln_1p();
        match p % 4 {
            1 => log_acc.add(term),
            3 => log_acc.add(0.5 * term),
            _ => unreachable!("odd prime"),
        }
    }
    let value = MEAN_VALUE_PREFACTOR * log_acc.value().exp();
    let tail_error = value * (1.2 / prime_limit as f64).exp_m1();
    Ok(EulerConstant {
        value,
        tail_error,
        prime_limit,
    })
}

/// Finite-product predictions for the mean of `f(n) = q(n)/n` and for
/// `Σ q(n)` at a given cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPrediction {
    /// Predicts `Σ_{k≤n} q(k)/k`:
    /// `(1/(e^{γ/2}·sqrt(π))) · (n/log n) · (3/2) · Q₁(n) · Q₃(n)` with
    /// `Q₁(n) = Π_{p≤n, p≡1(4)} (1-p⁻²)⁻¹` and
    /// `Q₃(n) = Π_{p≤n, p≡3(4)} (1-p⁻¹)⁻¹`.
    pub f_sum: f64,
    /// Predicts `Σ_{k≤n} q(k)` by the asymptotic form
    /// `C(n) · n² / sqrt(log n)` (partial summation of `f_sum`).
    pub q_sum: f64,
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Evaluate both mean-value predictions with products over `p ≤ n`.
pub fn mean_prediction(n: u64) -> Result<MeanPrediction> {
    if n < 16 {
        return Err(Error::AsymptoticRegime { n });
    }
    let table = prime_table(n);
    let mut log_q1 = Neumaier::new();
    let mut log_q3 = Neumaier::new();
    for (p, &is_p) in table.iter().enumerate().skip(3) {
        if !is_p {
            continue;
        }
        let pf = p as f64;
        match p % 4 {
            1 => log_q1.add(-(-1.0 / (pf * pf)).ln_1p()),
            3 => log_q3.add(-(-1.0 / pf).ln_1p()),
            _ => unreachable!(),
        }
    }
    let nf = n as f64;
    let front = 1.0 / ((EULER_GAMMA / 2.0).exp() * std::f64::consts::PI.sqrt());
    let f_sum =
        front * (nf / nf.ln()) * EULER_FACTOR_TWO * log_q1.value().exp() * log_q3.value().exp();
    let c = mean_value_constant(n)?;
    let q_sum = c.value * nf * nf / nf.ln().sqrt();
    Ok(MeanPrediction { f_sum, q_sum })
}

/// One row of the mean-value experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanValueReport {
    pub n: u64,
    /// Exact `Σ_{k≤n} q(k)`.
    pub direct_sum: BigUint,
    /// `C · n² / sqrt(log n)` with `C` from the requested prime limit.
    pub prediction: f64,
    pub ratio: f64,
}

/// Run the mean-value experiment over a list of cutoffs.
///
/// Returns the truncated constant used and one report per cutoff.
pub fn mean_value_experiment(
    n_list: &[u64],
    prime_limit: u64,
) -> Result<(EulerConstant, Vec<MeanValueReport>)> {
    for &n in n_list {
        if n < 16 {
            return Err(Error::AsymptoticRegime { n });
        }
    }
    let constant = mean_value_constant(prime_limit)?;
    let max_n = n_list.iter().copied().max().unwrap_or(1);

    // One sieve pass collecting every requested cumulative value.
    let mut wanted: Vec<u64> = n_list.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let spf = spf_table(max_n);
    let mut sums = std::collections::BTreeMap::new();
    let mut acc: u128 = 0;
    let mut next = 0usize;
    for n in 1..=max_n {
        acc += q_from_factors(&factor_with_spf(n, &spf)) as u128;
        if next < wanted.len() && wanted[next] == n {
            sums.insert(n, acc);
            next += 1;
        }
    }

    let reports = n_list
        .iter()
        .map(|&n| {
            let direct = sums[&n];
            let nf = n as f64;
            let prediction = constant.value * nf * nf / nf.ln().sqrt();
            MeanValueReport {
                n,
                direct_sum: BigUint::from(direct),
                prediction,
                ratio: direct as f64 / prediction,
            }
        })
        .collect();
    Ok((constant, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd_u64;
    use crate::generators::SplitMix64;

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(2, 12), 2);
        assert_eq!(valuation(3, 1), 0);
        assert_eq!(valuation(7, 98), 2);
    }

    #[test]
    fn factorize_reconstructs() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(98), vec![(2, 1), (7, 2)]);
        for n in 1..=3_000u64 {
            let f = factorize(n);
            assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
            for &(p, _) in &f {
                assert!(crate::sieve::is_prime_trial(p));
            }
        }
    }

    #[test]
    fn q0_examples() {
        assert_eq!(q0(5), 1);
        assert_eq!(q0(9), 9);
        assert_eq!(q0(21), 21);
        assert_eq!(q0(1), 1);
    }

    #[test]
    fn q_formula_examples() {
        assert_eq!(q_formula(3), 3);
        assert_eq!(q_formula(4), 2);
        assert_eq!(q_formula(12), 6);
        assert_eq!(q_formula(1), 1);
        // First ten values: 1,1,3,2,1,3,7,4,9,1
        let first: Vec<u64> = (1..=10).map(q_formula).collect();
        assert_eq!(first, vec![1, 1, 3, 2, 1, 3, 7, 4, 9, 1]);
    }

    #[test]
    fn q_bruteforce_examples() {
        assert_eq!(q_bruteforce(5), 1);
        assert_eq!(q_bruteforce(3), 3);
        assert_eq!(q_bruteforce(1), 1);
    }

    #[test]
    fn formula_matches_bruteforce_small() {
        for n in 1..=300u64 {
            assert_eq!(q_formula(n), q_bruteforce(n), "n = {n}");
        }
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(q_partial_sum(1), BigUint::from(1u32));
        assert_eq!(q_partial_sum(2), BigUint::from(2u32));
        assert_eq!(q_partial_sum(10), BigUint::from(32u32));
        assert_eq!(q_partial_sum(100), BigUint::from(2123u32));
    }

    #[test]
    fn partial_sum_matches_termwise() {
        let mut acc = 0u64;
        for n in 1..=5_000u64 {
            acc += q_formula(n);
        }
        assert_eq!(q_partial_sum(5_000), BigUint::from(acc));
    }

    #[test]
    fn f_is_multiplicative() {
        // f(ab) = f(a) f(b) for coprime a, b; equivalently
        // q(ab)·a·b = q(a)·q(b)·ab, checked in integers.
        let mut rng = SplitMix64::new(0xFEED);
        let mut checked = 0;
        while checked < 10_000 {
            let a = 1 + rng.next_u64() % 100_000;
            let b = 1 + rng.next_u64() % 100_000;
            if gcd_u64(a, b) != 1 {
                continue;
            }
            assert_eq!(
                q_formula(a * b) as u128,
                q_formula(a) as u128 * q_formula(b) as u128,
                "a={a} b={b}"
            );
            checked += 1;
        }
    }

    #[test]
    fn f_satisfies_mean_value_hypotheses() {
        // f(p^a) <= 1 for all prime powers up to 1e6, and f >= 0 trivially.
        let table = prime_table(1_000);
        for (p, &is_p) in table.iter().enumerate() {
            if !is_p {
                continue;
            }
            let p = p as u64;
            let mut pa = p;
            while pa <= 1_000_000 {
                assert!(q_formula(pa) <= pa, "f(p^a) > 1 at {pa}");
                match pa.checked_mul(p) {
                    Some(next) => pa = next,
                    None => break,
                }
            }
        }
        for pa in [2u64, 4, 8, 16, 1 << 19] {
            assert_eq!(2 * q_formula(pa), pa, "f(2^a) must be 1/2 at {pa}");
        }
    }

    #[test]
    fn prime_sums_grow_at_half_density() {
        // Σ_{p≤N} f(p) / (N / log N) should approach 1/2; at N = 10^6 the
        // measured ratio is ~0.543 (within 10% of 1/2).
        let n = 1_000_000u64;
        let table = prime_table(n);
        let mut acc = Neumaier::new();
        for (p, &is_p) in table.iter().enumerate() {
            if !is_p {
                continue;
            }
            let p = p as u64;
            acc.add(q_formula(p) as f64 / p as f64);
        }
        let ratio = acc.value() / (n as f64 / (n as f64).ln());
        assert!(
            (ratio / 0.5 - 1.0).abs() < 0.10,
            "prime-sum density ratio {ratio} not within 10% of 1/2"
        );
    }

    #[test]
    fn constant_prefactor_at_empty_products() {
        let c = mean_value_constant(2).unwrap();
        assert!((c.value - MEAN_VALUE_PREFACTOR).abs() < 1e-15);
        assert!((MEAN_VALUE_PREFACTOR - 0.337_618_618_6).abs() < 1e-9);
        assert!(mean_value_constant(1).is_err());
    }

    #[test]
    fn constant_is_nondecreasing_and_tail_honored() {
        let limits = [10u64, 100, 1_000, 10_000, 100_000];
        let mut prev = 0.0;
        for &l in &limits {
            let c = mean_value_constant(l).unwrap();
            assert!(c.value >= prev);
            prev = c.value;
        }
        for &l in &limits[..limits.len() - 1] {
            let c = mean_value_constant(l).unwrap();
            let c10 = mean_value_constant(10 * l).unwrap();
            assert!(
                c10.value - c.value <= c.tail_error,
                "tail bound violated at limit {l}"
            );
        }
    }

    #[test]
    fn mean_prediction_brackets_direct_sums() {
        let n = 10_000u64;
        let pred = mean_prediction(n).unwrap();
        let mut f_direct = Neumaier::new();
        let spf = spf_table(n);
        let mut q_direct = 0u64;
        for k in 1..=n {
            let q = q_from_factors(&factor_with_spf(k, &spf));
            q_direct += q;
            f_direct.add(q as f64 / k as f64);
        }
        let f_ratio = f_direct.value() / pred.f_sum;
        let q_ratio = q_direct as f64 / pred.q_sum;
        assert!((0.5..=1.5).contains(&f_ratio), "f ratio {f_ratio}");
        assert!((0.5..=1.5).contains(&q_ratio), "q ratio {q_ratio}");
        assert!(mean_prediction(15).is_err());
    }

    #[test]
    fn experiment_small() {
        let (c, reports) = mean_value_experiment(&[100, 1000], 10_000).unwrap();
        assert_eq!(reports[0].direct_sum, BigUint::from(2123u32));
        assert!(c.tail_error < 1e-4);
        for r in &reports {
            assert!(r.ratio.is_finite() && r.ratio > 0.0);
        }
    }
}
