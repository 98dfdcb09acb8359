//! Star discrepancy and the windowed pair-set statistics.
//!
//! A [`DataTuple`] bundles a scale `rho`, anchors `M <= N`, per-`n`
//! windows `(K_n, K_n + L_n] ⊆ (M, 2M]`, and two sets
//! `𝔐 ⊆ (M, 2M]`, `𝔑 ⊆ (N, 2N]`. The qualifying pairs are those
//! `(m, n) ∈ 𝔐 × 𝔑` with `m` in the window of `n` and `gcd(m, n) = 1`;
//! the statistic of interest is the star discrepancy of the multiset
//! `{rho·s(m,n) mod 1}` over those pairs.
//!
//! Counting uses the closed interval `[0, λ]` and all points are exact
//! rationals, so the supremum is computed exactly from the sorted values.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::accum::{sum_f64, Neumaier};
use crate::arith::{gcd_u64, isqrt};
use crate::dedekind::{normalized_frac, scaled_frac};
use crate::expsums::e_frac;
use crate::{rat, Error, Rat, Result};

/// Explicit constants adopted for the Erdős–Turán inequality: the count
/// term enters as `J/(H+1)` with weight 1 and the exponential-sum term
/// with weight 3. With these the inequality is assertable, not just an
/// order bound.
pub const ERDOS_TURAN_COUNT_WEIGHT: f64 = 1.0;
pub const ERDOS_TURAN_SUM_WEIGHT: f64 = 3.0;

/// Largest accepted anchor. Far beyond desk scale; keeps every
/// `2·anchor` and window-endpoint computation inside `u64`.
pub const MAX_ANCHOR: u64 = 1 << 32;

fn check_anchor(anchor: u64) -> Result<()> {
    if !(1..=MAX_ANCHOR).contains(&anchor) {
        return Err(Error::InvalidSpec(format!(
            "anchor {anchor} outside [1, {MAX_ANCHOR}]"
        )));
    }
    Ok(())
}

/// A window `(start, start + len]` inside `(anchor, 2·anchor]`.
/// `len` is at least 1 by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(clippy::len_without_is_empty)]
pub struct Window {
    start: u64,
    len: u64,
}

impl Window {
    /// Validates `anchor <= start < start + len <= 2·anchor`.
    pub fn new(start: u64, len: u64, anchor: u64) -> Result<Self> {
        check_anchor(anchor)?;
        let end = start.checked_add(len);
        if start < anchor || len == 0 || end.is_none_or(|e| e > 2 * anchor) {
            return Err(Error::InvalidWindow { start, len, anchor });
        }
        Ok(Self { start, len })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn contains(&self, m: u64) -> bool {
        self.start < m && m <= self.start + self.len
    }
}

/// The full data a windowed pair experiment runs over.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTuple {
    rho: Rat,
    m_anchor: u64,
    n_anchor: u64,
    set_m: Vec<u64>,
    set_n: Vec<u64>,
    windows: BTreeMap<u64, Window>,
}

impl DataTuple {
    /// Validates every structural invariant before anything runs:
    /// `rho != 0`, `M <= N`, both sets inside their half-open ranges and
    /// sorted, and a valid window for every `n` in the n-set.
    pub fn new(
        rho: Rat,
        m_anchor: u64,
        n_anchor: u64,
        set_m: Vec<u64>,
        set_n: Vec<u64>,
        windows: BTreeMap<u64, Window>,
    ) -> Result<Self> {
        if rho.is_zero() {
            return Err(Error::ZeroRho);
        }
        check_anchor(m_anchor)?;
        check_anchor(n_anchor)?;
        if m_anchor > n_anchor {
            return Err(Error::AnchorOrder { m_anchor, n_anchor });
        }
        let mut set_m = set_m;
        let mut set_n = set_n;
        set_m.sort_unstable();
        set_m.dedup();
        set_n.sort_unstable();
        set_n.dedup();
        for &m in &set_m {
            if m <= m_anchor || m > 2 * m_anchor {
                return Err(Error::OutOfRange {
                    value: m,
                    anchor: m_anchor,
                });
            }
        }
        for &n in &set_n {
            if n <= n_anchor || n > 2 * n_anchor {
                return Err(Error::OutOfRange {
                    value: n,
                    anchor: n_anchor,
                });
            }
            let w = windows.get(&n).ok_or(Error::MissingWindow { n })?;
            // Re-validate against this tuple's anchor.
            Window::new(w.start(), w.len(), m_anchor)?;
        }
        Ok(Self {
            rho,
            m_anchor,
            n_anchor,
            set_m,
            set_n,
            windows,
        })
    }

    /// Full sets and full windows at the given anchors.
    pub fn full(rho: Rat, m_anchor: u64, n_anchor: u64) -> Result<Self> {
        let set_m: Vec<u64> = (m_anchor + 1..=2 * m_anchor).collect();
        let set_n: Vec<u64> = (n_anchor + 1..=2 * n_anchor).collect();
        let windows = set_n
            .iter()
            .map(|&n| {
                (
                    n,
                    Window {
                        start: m_anchor,
                        len: m_anchor,
                    },
                )
            })
            .collect();
        Self::new(rho, m_anchor, n_anchor, set_m, set_n, windows)
    }

    pub fn rho(&self) -> &Rat {
        &self.rho
    }

    pub fn m_anchor(&self) -> u64 {
        self.m_anchor
    }

    pub fn n_anchor(&self) -> u64 {
        self.n_anchor
    }

    pub fn set_m(&self) -> &[u64] {
        &self.set_m
    }

    pub fn set_n(&self) -> &[u64] {
        &self.set_n
    }

    pub fn window(&self, n: u64) -> Option<&Window> {
        self.windows.get(&n)
    }

    /// `|𝔐 × 𝔑|`.
    pub fn card_product(&self) -> u64 {
        self.set_m.len() as u64 * self.set_n.len() as u64
    }
}

/// The qualifying pairs `(m, n)`, in `(n, m)` lexicographic order.
pub fn qualifying_pairs(d: &DataTuple) -> impl Iterator<Item = (u64, u64)> + '_ {
    d.set_n().iter().flat_map(move |&n| {
        let w = d.window(n).expect("validated window");
        let lo = d.set_m().partition_point(|&m| m <= w.start());
        let hi = d.set_m().partition_point(|&m| m <= w.start() + w.len());
        d.set_m()[lo..hi]
            .iter()
            .filter(move |&&m| gcd_u64(m, n) == 1)
            .map(move |&m| (m, n))
    })
}

/// Number of qualifying pairs; independent of `rho`.
pub fn pair_count(d: &DataTuple) -> u64 {
    qualifying_pairs(d).count() as u64
}

/// A sorted multiset of exact points in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracPoints {
    values: Vec<Rat>,
}

impl FracPoints {
    /// Sorts the input; rejects anything outside `[0, 1)`.
    pub fn from_rats(mut values: Vec<Rat>) -> Result<Self> {
        for v in &values {
            if v.is_negative() || *v >= Rat::one() {
                return Err(Error::PointOutOfRange {
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        values.sort_unstable();
        Ok(Self { values })
    }

    /// Exact conversion: every finite `f64` is a rational.
    pub fn from_f64s(points: &[f64]) -> Result<Self> {
        let values = points
            .iter()
            .map(|&p| {
                if !(0.0..1.0).contains(&p) {
                    return Err(Error::PointOutOfRange { value: p });
                }
                Ok(Rat::from_float(p).expect("finite by the range check"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rats(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted view of the points.
    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Closed-interval count `#{ g ≤ λ }`; this is the prefix-counting
    /// function the discrepancy is defined from.
    pub fn count_leq(&self, lambda: &Rat) -> u64 {
        self.values.partition_point(|g| g <= lambda) as u64
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v.to_f64().expect("points are in [0,1)"))
            .collect()
    }
}

/// The multiset `{rho·s(m,n) mod 1}` over the qualifying pairs.
///
/// For `rho = 12` the points come from the modular-inverse shortcut; any
/// other `rho` multiplies the exact sum. Pair generation is parallel over
/// `n` with an ordered merge, and the values are exact, so the result is
/// independent of the evaluation order.
pub fn frac_points(d: &DataTuple) -> Result<FracPoints> {
    let twelve = rat(12, 1);
    let per_n: Vec<Vec<Rat>> = d
        .set_n()
        .par_iter()
        .map(|&n| {
            let w = d.window(n).expect("validated window");
            let lo = d.set_m().partition_point(|&m| m <= w.start());
            let hi = d.set_m().partition_point(|&m| m <= w.start() + w.len());
            d.set_m()[lo..hi]
                .iter()
                .filter(|&&m| gcd_u64(m, n) == 1)
                .map(|&m| {
                    if *d.rho() == twelve {
                        normalized_frac(m, n)
                    } else {
                        scaled_frac(d.rho(), m, n)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    FracPoints::from_rats(per_n.into_iter().flatten().collect())
}

/// Exact star discrepancy `sup_{λ∈[0,1]} |#{g ≤ λ} − λ·J|`.
///
/// With sorted values `g_1 ≤ … ≤ g_J` and `g_{J+1} := 1` the supremum is
/// attained either at a point (`i − J·g_i`), approaching one from the
/// left (`J·g_{i+1} − i`), or at `λ = 0` (the number of zeros).
pub fn star_discrepancy(points: &FracPoints) -> Rat {
    let j = points.len();
    let jr = Rat::from_integer(BigInt::from(j));
    let zero = Rat::zero();
    let mut best = Rat::from_integer(BigInt::from(
        points.values().iter().take_while(|g| **g == zero).count(),
    ));
    for (idx, g) in points.values().iter().enumerate() {
        let cand = Rat::from_integer(BigInt::from(idx + 1)) - g * &jr;
        if cand > best {
            best = cand;
        }
    }
    for idx in 0..=j {
        let g_next = if idx < j {
            points.values()[idx].clone()
        } else {
            Rat::one()
        };
        let cand = g_next * &jr - Rat::from_integer(BigInt::from(idx));
        if cand > best {
            best = cand;
        }
    }
    best
}

/// Star discrepancy of the tuple's fractional parts, exactly.
pub fn tuple_discrepancy(d: &DataTuple) -> Result<Rat> {
    Ok(star_discrepancy(&frac_points(d)?))
}

/// Erdős–Turán right-hand side with the adopted explicit constants:
/// `J/(H+1) + 3·Σ_{h≤H} |Σ_j e(h·γ_j)| / h`.
pub fn erdos_turan_bound(points: &FracPoints, h_max: u64) -> f64 {
    debug_assert!(h_max >= 1);
    let j = points.len() as f64;
    if points.is_empty() {
        return 0.0;
    }
    let gammas = points.to_f64s();
    let mut terms = Vec::with_capacity(h_max as usize);
    for h in 1..=h_max {
        let mut re = Neumaier::new();
        let mut im = Neumaier::new();
        for &g in &gammas {
            let z = e_frac(h as f64 * g);
            re.add(z.re);
            im.add(z.im);
        }
        let modulus = re.value().hypot(im.value());
        terms.push(modulus / h as f64);
    }
    ERDOS_TURAN_COUNT_WEIGHT * j / (h_max as f64 + 1.0) + ERDOS_TURAN_SUM_WEIGHT * sum_f64(terms)
}

/// The harmonic cutoff used by the discrepancy experiments:
/// `max(1, ⌊sqrt(N/M)⌋)`.
pub fn harmonic_cutoff(m_anchor: u64, n_anchor: u64) -> u64 {
    debug_assert!(m_anchor >= 1);
    isqrt(n_anchor / m_anchor).max(1)
}

/// Discrepancy bound evaluator (implied constant 1, `o(1) = 0`):
/// `card^{1/2}·M^{3/10}·N^{13/20} + pair_count·(M/N)^{1/2}`.
///
/// Derived for `rho = 12`; for other scales treat the value as a
/// heuristic reference, not a bound.
pub fn discrepancy_bound(m_anchor: u64, n_anchor: u64, card: u64, pairs: u64) -> f64 {
    let m = m_anchor as f64;
    let n = n_anchor as f64;
    (card as f64).sqrt() * m.powf(0.3) * n.powf(0.65) + pairs as f64 * (m / n).sqrt()
}

/// Variant with the pair count replaced by its trivial majorant `card`.
pub fn discrepancy_bound_from_card(m_anchor: u64, n_anchor: u64, card: u64) -> f64 {
    discrepancy_bound(m_anchor, n_anchor, card, card)
}

/// Coarsest variant, sets `card = M·N`:
/// `M^{4/5}·N^{23/20} + M^{3/2}·N^{1/2}`.
pub fn discrepancy_bound_coarse(m_anchor: u64, n_anchor: u64) -> f64 {
    let m = m_anchor as f64;
    let n = n_anchor as f64;
    m.powf(0.8) * n.powf(1.15) + m.powf(1.5) * n.sqrt()
}
