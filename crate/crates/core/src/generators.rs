//! Constructors for the pair sets and window sequences the experiments
//! run over: full intervals, primes, smooth numbers, and seeded random
//! subsets of `(X, 2X]`, plus window maps satisfying
//! `M <= K_n < K_n + L_n <= 2M`.
//!
//! Randomness comes from the SplitMix64 generator below, specified by its
//! constants, so any implementation language can reproduce the same sets
//! from the same seed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::discrepancy::Window;
use crate::sieve::{prime_table, spf_table};
use crate::{Error, Result};

/// SplitMix64: `state += 0x9E3779B97F4A7C15`, then the output is
/// `z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// How to populate a set inside `(anchor, 2·anchor]`.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    /// Every integer in the range.
    FullInterval,
    /// Primes in the range.
    Primes,
    /// Integers whose largest prime factor is at most `bound`.
    Smooth { bound: u64 },
    /// Each element kept independently with probability `density`:
    /// element `n` (scanned in increasing order, one SplitMix64 draw
    /// each, generator seeded with `seed`) is kept iff its draw `u`
    /// satisfies `u < floor(density * 2^64)`.
    Random { density: f64, seed: u64 },
    /// An explicit list; must lie inside the range.
    Explicit(Vec<u64>),
}

/// How to build the window map `n -> (K_n, L_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowSpec {
    /// `K_n = M`, `L_n = M`: the window is all of `(M, 2M]`.
    Full,
    /// The same `(K, L)` for every `n`; validated against the anchor.
    Constant { start: u64, len: u64 },
    /// Per-`n` draws: generator seeded with
    /// `seed ^ (n * 0x9E3779B97F4A7C15)` (wrapping), then
    /// `K = M + (u1 mod M)` and `L = 1 + (u2 mod (2M - K))`.
    Random { seed: u64 },
}

/// The specified subset of `(anchor, 2·anchor]`, sorted ascending.
pub fn build_set(spec: &SetSpec, anchor: u64) -> Result<Vec<u64>> {
    if !(1..=crate::discrepancy::MAX_ANCHOR).contains(&anchor) {
        return Err(Error::InvalidSpec(format!(
            "anchor {anchor} outside [1, {}]",
            crate::discrepancy::MAX_ANCHOR
        )));
    }
    let lo = anchor + 1;
    let hi = 2 * anchor;
    match spec {
        SetSpec::FullInterval => Ok((lo..=hi).collect()),
        SetSpec::Primes => {
            let table = prime_table(hi);
            Ok((lo..=hi).filter(|&n| table[n as usize]).collect())
        }
        SetSpec::Smooth { bound } => {
            if *bound < 2 {
                return Err(Error::SmoothnessBound { bound: *bound });
            }
            let spf = spf_table(hi);
            Ok((lo..=hi)
                .filter(|&n| {
                    let mut k = n;
                    while k > 1 {
                        let p = spf[k as usize] as u64;
                        if p > *bound {
                            return false;
                        }
                        while k % p == 0 {
                            k /= p;
                        }
                    }
                    true
                })
                .collect())
        }
        SetSpec::Random { density, seed } => {
            if !(0.0..=1.0).contains(density) {
                return Err(Error::InvalidSpec(format!(
                    "density {density} outside [0, 1]"
                )));
            }
            let threshold = (density * 2f64.powi(64)) as u128;
            let mut rng = SplitMix64::new(*seed);
            Ok((lo..=hi)
                .filter(|_| (rng.next_u64() as u128) < threshold)
                .collect())
        }
        SetSpec::Explicit(list) => {
            let mut v = list.clone();
            v.sort_unstable();
            v.dedup();
            for &x in &v {
                if x < lo || x > hi {
                    return Err(Error::OutOfRange { value: x, anchor });
                }
            }
            Ok(v)
        }
    }
}

/// Window map for every `n` in `set_n`, each satisfying
/// `m_anchor <= K < K + L <= 2·m_anchor`.
pub fn build_windows(
    spec: &WindowSpec,
    m_anchor: u64,
    set_n: &[u64],
) -> Result<BTreeMap<u64, Window>> {
    if !(1..=crate::discrepancy::MAX_ANCHOR).contains(&m_anchor) {
        return Err(Error::InvalidSpec(format!(
            "anchor {m_anchor} outside [1, {}]",
            crate::discrepancy::MAX_ANCHOR
        )));
    }
    let mut out = BTreeMap::new();
    for &n in set_n {
        let w = match spec {
            WindowSpec::Full => Window::new(m_anchor, m_anchor, m_anchor)?,
            WindowSpec::Constant { start, len } => Window::new(*start, *len, m_anchor)?,
            WindowSpec::Random { seed } => {
                let mut rng = SplitMix64::new(seed ^ n.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let start = m_anchor + rng.next_u64() % m_anchor;
                let len = 1 + rng.next_u64() % (2 * m_anchor - start);
                Window::new(start, len, m_anchor)?
            }
        };
        out.insert(n, w);
    }
    Ok(out)
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::FullInterval => write!(f, "full"),
            SetSpec::Primes => write!(f, "primes"),
            SetSpec::Smooth { bound } => write!(f, "smooth:{bound}"),
            SetSpec::Random { density, seed } => write!(f, "random:{density}:{seed}"),
            SetSpec::Explicit(list) => {
                write!(f, "explicit:")?;
                for (i, x) in list.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for SetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |s: &str| Error::InvalidSpec(format!("unrecognized set spec '{s}'"));
        match s {
            "full" => return Ok(SetSpec::FullInterval),
            "primes" => return Ok(SetSpec::Primes),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("smooth:") {
            let bound = rest.parse().map_err(|_| bad(s))?;
            return Ok(SetSpec::Smooth { bound });
        }
        if let Some(rest) = s.strip_prefix("random:") {
            let (d, seed) = rest.split_once(':').ok_or_else(|| bad(s))?;
            return Ok(SetSpec::Random {
                density: d.parse().map_err(|_| bad(s))?,
                seed: seed.parse().map_err(|_| bad(s))?,
            });
        }
        if let Some(rest) = s.strip_prefix("explicit:") {
            let rest = rest.trim_start_matches('[').trim_end_matches(']');
            let list = rest
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| t.trim().parse().map_err(|_| bad(s)))
                .collect::<Result<Vec<u64>>>()?;
            return Ok(SetSpec::Explicit(list));
        }
        Err(bad(s))
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::Full => write!(f, "full"),
            WindowSpec::Constant { start, len } => write!(f, "constant:{start}:{len}"),
            WindowSpec::Random { seed } => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |s: &str| Error::InvalidSpec(format!("unrecognized window spec '{s}'"));
        if s == "full" {
            return Ok(WindowSpec::Full);
        }
        if let Some(rest) = s.strip_prefix("constant:") {
            let (k, l) = rest.split_once(':').ok_or_else(|| bad(s))?;
            return Ok(WindowSpec::Constant {
                start: k.parse().map_err(|_| bad(s))?,
                len: l.parse().map_err(|_| bad(s))?,
            });
        }
        if let Some(rest) = s.strip_prefix("random:") {
            return Ok(WindowSpec::Random {
                seed: rest.parse().map_err(|_| bad(s))?,
            });
        }
        Err(bad(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::is_prime_trial;

    #[test]
    fn set_examples() {
        assert_eq!(build_set(&SetSpec::Primes, 5).unwrap(), vec![7]);
        assert_eq!(
            build_set(&SetSpec::Smooth { bound: 3 }, 8).unwrap(),
            vec![9, 12, 16]
        );
        assert_eq!(
            build_set(&SetSpec::FullInterval, 4).unwrap(),
            vec![5, 6, 7, 8]
        );
    }

    #[test]
    fn smooth_bound_below_two_errors() {
        assert!(matches!(
            build_set(&SetSpec::Smooth { bound: 1 }, 8),
            Err(Error::SmoothnessBound { bound: 1 })
        ));
    }

    #[test]
    fn containment_exhaustive_to_1e4() {
        use rayon::prelude::*;
        (1..=10_000u64).into_par_iter().for_each(|anchor| {
            for spec in [
                SetSpec::FullInterval,
                SetSpec::Primes,
                SetSpec::Smooth { bound: 7 },
                SetSpec::Random {
                    density: 0.5,
                    seed: 42,
                },
            ] {
                let s = build_set(&spec, anchor).unwrap();
                for &x in &s {
                    assert!(x > anchor && x <= 2 * anchor, "{spec} at {anchor}: {x}");
                }
                assert!(s.windows(2).all(|w| w[0] < w[1]));
            }
        });
    }

    #[test]
    fn primes_match_trial_division() {
        for anchor in (1..=256u64).chain([1000, 5000, 10_000]) {
            let got = build_set(&SetSpec::Primes, anchor).unwrap();
            let want: Vec<u64> = (anchor + 1..=2 * anchor)
                .filter(|&n| is_prime_trial(n))
                .collect();
            assert_eq!(got, want, "anchor {anchor}");
        }
    }

    #[test]
    fn smooth_matches_factorization_oracle() {
        fn largest_prime_factor(mut n: u64) -> u64 {
            let mut best = 1;
            let mut d = 2;
            while d * d <= n {
                while n % d == 0 {
                    best = d;
                    n /= d;
                }
                d += 1;
            }
            if n > 1 {
                best = n;
            }
            best
        }
        for anchor in (1..=200u64).chain([1000, 10_000]) {
            for bound in [2u64, 3, 5, 7, 13, 23, 47, 50] {
                let got = build_set(&SetSpec::Smooth { bound }, anchor).unwrap();
                let want: Vec<u64> = (anchor + 1..=2 * anchor)
                    .filter(|&n| largest_prime_factor(n) <= bound)
                    .collect();
                assert_eq!(got, want, "anchor {anchor} bound {bound}");
            }
        }
    }

    #[test]
    fn random_sets_are_reproducible() {
        let spec = SetSpec::Random {
            density: 0.3,
            seed: 777,
        };
        let a = build_set(&spec, 500).unwrap();
        let b = build_set(&spec, 500).unwrap();
        assert_eq!(a, b);
        // Density 1 keeps everything, density 0 nothing.
        let all = build_set(
            &SetSpec::Random {
                density: 1.0,
                seed: 1,
            },
            100,
        )
        .unwrap();
        assert_eq!(all.len(), 100);
        let none = build_set(
            &SetSpec::Random {
                density: 0.0,
                seed: 1,
            },
            100,
        )
        .unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn window_examples() {
        let ns = vec![5, 6, 7];
        let full = build_windows(&WindowSpec::Full, 4, &ns).unwrap();
        for n in &ns {
            let w = &full[n];
            assert_eq!((w.start(), w.len()), (4, 4));
            assert!(w.contains(5) && w.contains(8) && !w.contains(4) && !w.contains(9));
        }
        let ok = build_windows(&WindowSpec::Constant { start: 5, len: 2 }, 4, &ns);
        assert!(ok.is_ok());
        let bad = build_windows(&WindowSpec::Constant { start: 8, len: 2 }, 4, &ns);
        assert!(matches!(bad, Err(Error::InvalidWindow { .. })));
    }

    #[test]
    fn random_windows_valid_and_reproducible() {
        let ns: Vec<u64> = (101..=200).collect();
        let a = build_windows(&WindowSpec::Random { seed: 9 }, 64, &ns).unwrap();
        let b = build_windows(&WindowSpec::Random { seed: 9 }, 64, &ns).unwrap();
        assert_eq!(a, b);
        for w in a.values() {
            assert!(64 <= w.start() && w.start() < w.start() + w.len());
            assert!(w.start() + w.len() <= 128);
        }
        // Per-n derivation: dropping an n does not change the others.
        let partial = build_windows(&WindowSpec::Random { seed: 9 }, 64, &ns[1..]).unwrap();
        for (n, w) in &partial {
            assert_eq!(a[n], *w);
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in [
            "full",
            "primes",
            "smooth:7",
            "random:0.5:12345",
            "explicit:3,5,7",
        ] {
            let spec: SetSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        for s in ["full", "constant:5:2", "random:99"] {
            let spec: WindowSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("smoothish:3".parse::<SetSpec>().is_err());
    }
}
