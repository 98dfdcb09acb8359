//! Exponential sums with Kloosterman fractions `e(b·m⁻¹/n)`.
//!
//! Three sums are evaluated directly: the mean square over `m` of
//! weighted inner sums ([`kloosterman_square_sum`]), the bilinear sum
//! over a windowed pair set ([`pair_exponential_sum`]), and the Fourier
//! completion of the window constraint ([`completed_pair_sum`]). The
//! completion uses the full residue system `c ∈ {0, …, M−1}`: with
//! windows inside `(M, 2M]` and `m ∈ (M, 2M]` the difference `k − m`
//! stays in `(−M, M)`, so the orthogonality indicator is exact.
//!
//! The companion `*_bound` evaluators compute the reference right-hand
//! sides with every implied constant set to 1 and every `o(1)` exponent
//! set to 0; results carry the measured/bound ratio for trend reporting,
//! never an asserted inequality.

pub use num_complex::Complex64;
use rayon::prelude::*;

use crate::accum::{par_blocked_complex, par_blocked_f64, ComplexNeumaier, DEFAULT_BLOCK};
use crate::arith::{gcd_u64, mod_inverse};
use crate::discrepancy::{qualifying_pairs, DataTuple};
use crate::generators::SplitMix64;
use crate::{Error, Result};

/// `e(t) = exp(2πit)`.
pub fn e_frac(t: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * t).sin_cos();
    Complex64::new(c, s)
}

/// `e_k(t) = exp(2πit/k)`, computed from the reduced residue `t mod k`.
pub fn e_k(k: u64, t: i64) -> Complex64 {
    debug_assert!(k >= 1);
    let r = (t as i128).rem_euclid(k as i128) as u64;
    e_frac(r as f64 / k as f64)
}

fn e_k_residue(k: u64, r: u64) -> Complex64 {
    e_frac(r as f64 / k as f64)
}

/// Complex weights `β_n` indexed over `n ∈ (anchor, 2·anchor]`; missing
/// entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSeq {
    anchor: u64,
    weights: Vec<Complex64>,
}

impl WeightSeq {
    /// All-ones weights.
    pub fn ones(anchor: u64) -> Self {
        Self {
            anchor,
            weights: vec![Complex64::new(1.0, 0.0); anchor as usize],
        }
    }

    /// Unit-modulus weights with seeded random phases.
    pub fn random_unit(anchor: u64, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let weights = (0..anchor).map(|_| e_frac(rng.next_f64())).collect();
        Self { anchor, weights }
    }

    /// Weights from explicit values for `n = anchor+1, …, 2·anchor`.
    pub fn from_values(anchor: u64, weights: Vec<Complex64>) -> Result<Self> {
        if weights.len() != anchor as usize {
            return Err(Error::InvalidSpec(format!(
                "weight vector has {} entries, expected {anchor}",
                weights.len()
            )));
        }
        Ok(Self { anchor, weights })
    }

    pub fn anchor(&self) -> u64 {
        self.anchor
    }

    /// `β_n`, zero outside `(anchor, 2·anchor]`.
    pub fn get(&self, n: u64) -> Complex64 {
        if n > self.anchor && n <= 2 * self.anchor {
            self.weights[(n - self.anchor - 1) as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `‖β‖₂² = Σ |β_n|²`, compensated.
    pub fn norm_sq(&self) -> f64 {
        par_blocked_f64(&self.weights, DEFAULT_BLOCK, |w| w.norm_sqr())
    }
}

/// A directly evaluated sum together with the reference bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSumResult {
    /// The sum; imaginary part is zero for the mean-square sum.
    pub value: Complex64,
    /// Number of `(m, n)` terms that passed the coprimality/window filters.
    pub terms: u64,
    /// Reference right-hand side (constant 1, `o(1) = 0`).
    pub bound: f64,
    /// `|value| / bound`; `NaN` when the bound is zero.
    pub ratio: f64,
}

impl ExpSumResult {
    fn new(value: Complex64, terms: u64, bound: f64) -> Self {
        let ratio = if bound > 0.0 {
            value.norm() / bound
        } else {
            f64::NAN
        };
        Self {
            value,
            terms,
            bound,
            ratio,
        }
    }
}

/// Two-term reference bound for the mean-square sum (the `M ≤ N` form):
/// `‖β‖₂² · (b/(MN) + 1)^{1/2} · (N^{7/4} + M^{3/5}·N^{13/10})`.
pub fn square_sum_bound(m_anchor: u64, n_anchor: u64, b: u64, beta_norm_sq: f64) -> f64 {
    let m = m_anchor as f64;
    let n = n_anchor as f64;
    beta_norm_sq * (b as f64 / (m * n) + 1.0).sqrt() * (n.powf(1.75) + m.powf(0.6) * n.powf(1.3))
}

/// Four-term reference bound valid without the `M ≤ N` reduction:
/// `‖β‖₂² · (b/(MN) + 1)^{1/2}
///  · (M·N^{3/4} + N^{7/4} + M^{6/5}·N^{7/10} + M^{3/5}·N^{13/10})`.
pub fn square_sum_bound_general(m_anchor: u64, n_anchor: u64, b: u64, beta_norm_sq: f64) -> f64 {
    let m = m_anchor as f64;
    let n = n_anchor as f64;
    beta_norm_sq
        * (b as f64 / (m * n) + 1.0).sqrt()
        * (m * n.powf(0.75) + n.powf(1.75) + m.powf(1.2) * n.powf(0.7) + m.powf(0.6) * n.powf(1.3))
}

/// Mean square over `m ∈ (M, 2M]` of the weighted Kloosterman-fraction
/// sums: `Σ_m |Σ_{n∼N, gcd(n,m)=1} β_n·e(b·m⁻¹/n)|²`.
///
/// The value is real and nonnegative. Outer terms are reduced in fixed
/// blocks; the inner sums are sequential and compensated, so the result
/// is byte-stable across thread counts.
pub fn kloosterman_square_sum(
    m_anchor: u64,
    beta: &WeightSeq,
    b: u64,
    block: usize,
) -> ExpSumResult {
    debug_assert!(b >= 1);
    let n_anchor = beta.anchor();
    let ms: Vec<u64> = (m_anchor + 1..=2 * m_anchor).collect();

    let per_m = |&m: &u64| -> (f64, u64) {
        let mut acc = ComplexNeumaier::new();
        let mut terms = 0u64;
        for n in n_anchor + 1..=2 * n_anchor {
            if gcd_u64(n, m) != 1 {
                continue;
            }
            let inv = mod_inverse(m, n).expect("coprime").value();
            let r = ((b as u128 * inv as u128) % n as u128) as u64;
            acc.add(beta.get(n) * e_k_residue(n, r));
            terms += 1;
        }
        (acc.value().norm_sqr(), terms)
    };

    let per: Vec<(f64, u64)> = ms.par_iter().map(per_m).collect();
    let value = par_blocked_f64(&per, block, |t| t.0);
    let terms: u64 = per.iter().map(|t| t.1).sum();
    let bound = square_sum_bound(m_anchor, n_anchor, b, beta.norm_sq());
    ExpSumResult::new(Complex64::new(value, 0.0), terms, bound)
}

/// Reference bound for the windowed pair sum (constant 1, `o(1) = 0`):
/// `(|𝔐|·|𝔑|)^{1/2} · (|b|/(MN)+1)^{1/4} · (N^{7/8} + M^{3/10}·N^{13/20})
///  + |a|·J·M/N`.
pub fn pair_sum_bound(d: &DataTuple, a: i64, b: i64, pairs: u64) -> f64 {
    let m = d.m_anchor() as f64;
    let n = d.n_anchor() as f64;
    let cards = (d.set_m().len() as f64 * d.set_n().len() as f64).sqrt();
    cards
        * (b.unsigned_abs() as f64 / (m * n) + 1.0).powf(0.25)
        * (n.powf(0.875) + m.powf(0.3) * n.powf(0.65))
        + a.unsigned_abs() as f64 * pairs as f64 * m / n
}

/// Direct bilinear sum `Σ e_n(a·m + b·m⁻¹)` over the qualifying pairs of
/// the tuple, with the reference bound attached. Requires `b ≠ 0`.
pub fn pair_exponential_sum(d: &DataTuple, a: i64, b: i64, block: usize) -> Result<ExpSumResult> {
    if b == 0 {
        return Err(Error::ZeroShift);
    }
    let pairs: Vec<(u64, u64)> = qualifying_pairs(d).collect();
    let value = par_blocked_complex(&pairs, block, |&(m, n)| {
        let inv = mod_inverse(m, n)
            .expect("qualifying pairs are coprime")
            .value();
        let t = (a as i128 * m as i128 + b as i128 * inv as i128).rem_euclid(n as i128) as u64;
        e_k_residue(n, t)
    });
    let bound = pair_sum_bound(d, a, b, pairs.len() as u64);
    Ok(ExpSumResult::new(value, pairs.len() as u64, bound))
}

/// Geometric window sum `Σ_{start < k ≤ start+len} e_M(c·k)`.
///
/// Closed form: for `c ≡ 0 (mod M)` the sum is `len`; otherwise it is
/// `e(c·(2·start + len + 1)/(2M)) · sin(π·c·len/M) / sin(π·c/M)`, which
/// satisfies `|sum| ≤ min(len, M/(2|c|))` for `0 < |c| ≤ (M−1)/2`.
pub fn window_sum(modulus: u64, c: i64, start: i64, len: u64) -> Complex64 {
    debug_assert!(modulus >= 1 && len >= 1);
    let m = modulus as i128;
    let r = (c as i128).rem_euclid(m);
    if r == 0 {
        return Complex64::new(len as f64, 0.0);
    }
    let two_m = 2 * m;
    // Arguments reduced mod 2M: sin(π·x/M) and e(x/(2M)) have period 2M.
    let num_arg = (r * len as i128).rem_euclid(two_m) as f64;
    let den_arg = r as f64;
    let phase_arg = (r * (2 * start as i128 + len as i128 + 1)).rem_euclid(two_m) as f64;
    let mf = modulus as f64;
    let ratio =
        (std::f64::consts::PI * num_arg / mf).sin() / (std::f64::consts::PI * den_arg / mf).sin();
    e_frac(phase_arg / (2.0 * mf)) * ratio
}

/// The completed form of the windowed pair sum at `a = 0`.
///
/// Expands the window indicator over the full residue system:
/// `S₀ = M⁻¹ Σ_{c=0}^{M−1} Σ_{(m,n)∈𝔐×𝔑, gcd=1} e_M(−c·m)·w_n(c)·e_n(b·m⁻¹)`
/// where `w_n(c)` is the window sum for `n`'s window. Must agree with the
/// direct evaluation; the only error is floating-point.
pub fn completed_pair_sum(d: &DataTuple, b: i64, block: usize) -> Result<Complex64> {
    if b == 0 {
        return Err(Error::ZeroShift);
    }
    let m_anchor = d.m_anchor();
    // Coprime grid with inverses, computed once.
    let mut grid: Vec<(u64, u64, u64)> = Vec::new();
    for &n in d.set_n() {
        for &m in d.set_m() {
            if gcd_u64(m, n) == 1 {
                let inv = mod_inverse(m, n)?.value();
                let r = (b as i128 * inv as i128).rem_euclid(n as i128) as u64;
                grid.push((m, n, r));
            }
        }
    }
    let cs: Vec<u64> = (0..m_anchor).collect();
    let total = par_blocked_complex(&cs, block, |&c| {
        let mut acc = ComplexNeumaier::new();
        for &(m, n, r) in &grid {
            let w = d.window(n).expect("validated window");
            let beta_c = window_sum(m_anchor, c as i64, w.start() as i64, w.len());
            let alpha = e_k(
                m_anchor,
                -((c as i128 * m as i128).rem_euclid(m_anchor as i128) as i64),
            );
            acc.add(alpha * beta_c * e_k_residue(n, r));
        }
        acc.value()
    });
    Ok(total / m_anchor as f64)
}
