//! Prime and smallest-prime-factor sieves shared by the denominator and
//! generator modules.

/// Primality table for `0..=limit`.
pub fn prime_table(limit: u64) -> Vec<bool> {
    let limit = limit as usize;
    let mut is_prime = vec![true; limit + 1];
    is_prime[0] = false;
    if limit >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2usize;
    while p * p <= limit {
        if is_prime[p] {
            let mut j = p * p;
            while j <= limit {
                is_prime[j] = false;
                j += p;
            }
        }
        p += 1;
    }
    is_prime
}

/// All primes up to `limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    prime_table(limit)
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| if p { Some(i as u64) } else { None })
        .collect()
}

/// Smallest prime factor for every index in `0..=limit`.
///
/// `spf[0] = 0`, `spf[1] = 1`, and `spf[n]` is the least prime dividing
/// `n` otherwise. Walking `n -> n / spf[n]` factors `n` in `O(log n)`.
pub fn spf_table(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    let mut spf = vec![0u32; limit + 1];
    if limit >= 1 {
        spf[1] = 1;
    }
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Prime-exponent factorization read off a smallest-prime-factor table.
pub fn factor_with_spf(mut n: u64, spf: &[u32]) -> Vec<(u64, u32)> {
    debug_assert!((n as usize) < spf.len());
    let mut out = Vec::new();
    while n > 1 {
        let p = spf[n as usize] as u64;
        let mut e = 0u32;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        out.push((p, e));
    }
    out
}

/// Trial-division primality check, used as an oracle in tests.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let table = prime_table(20_000);
        for n in 0..=20_000u64 {
            assert_eq!(table[n as usize], is_prime_trial(n), "n = {n}");
        }
    }

    #[test]
    fn spf_factors_correctly() {
        let spf = spf_table(10_000);
        for n in 2..=10_000u64 {
            let f = factor_with_spf(n, &spf);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            for w in f.windows(2) {
                assert!(w[0].0 < w[1].0);
            }
            for &(p, _) in &f {
                assert!(is_prime_trial(p));
            }
        }
    }

    #[test]
    fn primes_up_to_counts() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(100).len(), 25);
    }
}
