//! Built-in oracle suite: quick-scale versions of the cross-checks the
//! test suite runs exhaustively. Prints one line per check; any failure
//! flips the exit code to 3.

use dedesums::accum::DEFAULT_BLOCK;
use dedesums::arith::{gcd_u64, mod_inverse};
use dedesums::dedekind::{definition_sum, normalized_frac, reciprocity_sum};
use dedesums::denominators::{mean_value_constant, q_bruteforce, q_formula, q_partial_sum};
use dedesums::discrepancy::{
    erdos_turan_bound, pair_count, star_discrepancy, DataTuple, FracPoints, Window,
};
use dedesums::expsums::{
    completed_pair_sum, e_k, kloosterman_square_sum, pair_exponential_sum, window_sum, Complex64,
    WeightSeq,
};
use dedesums::generators::{build_set, SetSpec, SplitMix64};
use dedesums::{rat, Rat};

use dedesums::arith::rat_to_f64;
use std::collections::BTreeMap;

struct Harness {
    failures: usize,
}

impl Harness {
    fn check(&mut self, name: &str, result: Result<(), String>) {
        match result {
            Ok(()) => println!("ok - {name}"),
            Err(msg) => {
                println!("FAIL - {name}: {msg}");
                self.failures += 1;
            }
        }
    }
}

fn ensure(cond: bool, msg: impl Fn() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reciprocity_vs_definition() -> Result<(), String> {
    for n in 1..=100u64 {
        for m in 1..=n {
            if gcd_u64(m, n) == 1 {
                ensure(reciprocity_sum(m, n) == definition_sum(m, n), || {
                    format!("mismatch at ({m},{n})")
                })?;
            }
        }
    }
    Ok(())
}

fn inverse_shift_fractional_parts() -> Result<(), String> {
    let twelve = rat(12, 1);
    for n in 1..=80u64 {
        for m in 1..=n {
            if gcd_u64(m, n) == 1 {
                let direct = dedesums::arith::frac(&(reciprocity_sum(m, n).unwrap() * &twelve));
                ensure(direct == normalized_frac(m, n).unwrap(), || {
                    format!("fractional part mismatch at ({m},{n})")
                })?;
            }
        }
    }
    Ok(())
}

fn closed_form_vs_bruteforce() -> Result<(), String> {
    for n in 1..=200u64 {
        ensure(q_formula(n) == q_bruteforce(n), || {
            format!("q(n) mismatch at n = {n}")
        })?;
    }
    Ok(())
}

fn partial_sums() -> Result<(), String> {
    ensure(q_partial_sum(10).to_string() == "32", || {
        "sum to 10 is not 32".into()
    })?;
    ensure(q_partial_sum(100).to_string() == "2123", || {
        "sum to 100 is not 2123".into()
    })
}

fn constant_tail() -> Result<(), String> {
    let c4 = mean_value_constant(10_000).map_err(|e| e.to_string())?;
    let c5 = mean_value_constant(100_000).map_err(|e| e.to_string())?;
    ensure(c5.value >= c4.value, || "constant not monotone".into())?;
    ensure(c5.value - c4.value <= c4.tail_error, || {
        "tail bound violated".into()
    })
}

fn window_sums() -> Result<(), String> {
    let mut rng = SplitMix64::new(0x5E1F);
    for _ in 0..100 {
        let m = 1 + rng.next_u64() % 24;
        let start = m + rng.next_u64() % m;
        let len = 1 + rng.next_u64() % (2 * m - start);
        let c = (rng.next_u64() % (2 * m)) as i64 - m as i64;
        let fast = window_sum(m, c, start as i64, len);
        let direct = direct_window_sum(m, c, start, len);
        ensure((direct - fast).norm() < 1e-9, || {
            format!("window sum mismatch at M={m} c={c} K={start} L={len}")
        })?;
        if c != 0 && c.unsigned_abs() <= (m - 1) / 2 {
            let cap = (len as f64).min(m as f64 / (2.0 * c.unsigned_abs() as f64));
            ensure(fast.norm() <= cap + 1e-9, || {
                format!("window bound broken at M={m} c={c}")
            })?;
        }
    }
    Ok(())
}

fn direct_window_sum(m: u64, c: i64, start: u64, len: u64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in start + 1..=start + len {
        acc += e_k(m, c * k as i64);
    }
    acc
}

fn completion_small() -> Result<(), String> {
    let mut rng = SplitMix64::new(0xC0DE);
    for case in 0..20 {
        let m_anchor = 1 + rng.next_u64() % 16;
        let n_anchor = m_anchor + rng.next_u64() % 16;
        let set_m: Vec<u64> = (m_anchor + 1..=2 * m_anchor)
            .filter(|_| rng.next_u64() % 3 != 0)
            .collect();
        let set_n: Vec<u64> = (n_anchor + 1..=2 * n_anchor)
            .filter(|_| rng.next_u64() % 3 != 0)
            .collect();
        let windows: BTreeMap<u64, Window> = set_n
            .iter()
            .map(|&n| {
                let start = m_anchor + rng.next_u64() % m_anchor;
                let len = 1 + rng.next_u64() % (2 * m_anchor - start);
                (n, Window::new(start, len, m_anchor).unwrap())
            })
            .collect();
        let d = DataTuple::new(rat(12, 1), m_anchor, n_anchor, set_m, set_n, windows)
            .map_err(|e| e.to_string())?;
        let b = 1 + (rng.next_u64() % 16) as i64;
        let direct = pair_exponential_sum(&d, 0, b, DEFAULT_BLOCK)
            .map_err(|e| e.to_string())?
            .value;
        let completed = completed_pair_sum(&d, b, DEFAULT_BLOCK).map_err(|e| e.to_string())?;
        ensure((direct - completed).norm() < 1e-6, || {
            format!("completion mismatch in case {case}")
        })?;
    }
    Ok(())
}

fn discrepancy_oracle() -> Result<(), String> {
    let mut rng = SplitMix64::new(0xD15C);
    for case in 0..30 {
        let j = 1 + (rng.next_u64() % 40) as usize;
        let pts: Vec<f64> = (0..j).map(|_| rng.next_f64()).collect();
        let fp = FracPoints::from_f64s(&pts).map_err(|e| e.to_string())?;
        let fast = rat_to_f64(&star_discrepancy(&fp));
        let mut grid = 0.0f64;
        let mut lambdas = vec![0.0, 1.0];
        for &v in &pts {
            lambdas.push(v);
            lambdas.push((v - 1e-12).max(0.0));
        }
        for i in 0..1000 {
            lambdas.push(i as f64 / 1000.0);
        }
        for lam in lambdas {
            let count = pts.iter().filter(|&&v| v <= lam).count() as f64;
            grid = grid.max((count - lam * j as f64).abs());
        }
        ensure((fast - grid).abs() < 1e-9, || {
            format!("discrepancy mismatch in case {case}: {fast} vs {grid}")
        })?;
    }
    Ok(())
}

fn erdos_turan_holds() -> Result<(), String> {
    let mut rng = SplitMix64::new(0xE7);
    for case in 0..50 {
        let j = 1 + (rng.next_u64() % 60) as usize;
        let pts: Vec<f64> = (0..j).map(|_| rng.next_f64()).collect();
        let fp = FracPoints::from_f64s(&pts).map_err(|e| e.to_string())?;
        let delta = rat_to_f64(&star_discrepancy(&fp));
        for h in 1..=20u64 {
            ensure(delta <= erdos_turan_bound(&fp, h), || {
                format!("bound broken in case {case} at H = {h}")
            })?;
        }
    }
    Ok(())
}

fn generator_oracles() -> Result<(), String> {
    ensure(
        build_set(&SetSpec::Primes, 5).map_err(|e| e.to_string())? == vec![7],
        || "primes at anchor 5".into(),
    )?;
    ensure(
        build_set(&SetSpec::Smooth { bound: 3 }, 8).map_err(|e| e.to_string())? == vec![9, 12, 16],
        || "3-smooth at anchor 8".into(),
    )?;
    for anchor in [10u64, 100, 1000] {
        for spec in [SetSpec::Primes, SetSpec::Smooth { bound: 7 }] {
            let s = build_set(&spec, anchor).map_err(|e| e.to_string())?;
            ensure(s.iter().all(|&x| x > anchor && x <= 2 * anchor), || {
                format!("containment broken for {spec} at {anchor}")
            })?;
        }
    }
    Ok(())
}

fn modular_inverses() -> Result<(), String> {
    for n in 1..=500u64 {
        for m in 1..=n {
            if gcd_u64(m, n) == 1 {
                let v = mod_inverse(m, n).map_err(|e| e.to_string())?.value();
                ensure(
                    v >= 1 && v <= n && (m as u128 * v as u128) % n as u128 == 1 % n as u128,
                    || format!("inverse wrong at ({m},{n})"),
                )?;
            }
        }
    }
    Ok(())
}

fn blocked_reduction_thread_independence() -> Result<(), String> {
    let beta = WeightSeq::random_unit(64, 31);
    let reference = kloosterman_square_sum(64, &beta, 17, DEFAULT_BLOCK);
    for threads in [1usize, 2, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let got = pool.install(|| kloosterman_square_sum(64, &beta, 17, DEFAULT_BLOCK));
        ensure(
            got.value.re.to_bits() == reference.value.re.to_bits(),
            || format!("square sum not bit-identical at {threads} threads"),
        )?;
    }
    Ok(())
}

fn pair_statistics() -> Result<(), String> {
    let d = DataTuple::full(rat(12, 1), 8, 8).map_err(|e| e.to_string())?;
    let mut want = 0u64;
    for n in 9..=16u64 {
        for m in 9..=16u64 {
            if gcd_u64(m, n) == 1 {
                want += 1;
            }
        }
    }
    ensure(pair_count(&d) == want, || "pair count mismatch".into())?;
    let delta = dedesums::discrepancy::tuple_discrepancy(&d).map_err(|e| e.to_string())?;
    ensure(delta > Rat::new(0.into(), 1.into()), || {
        "discrepancy of a nonempty set must be positive".into()
    })
}

/// Run every check; returns the number of failures.
pub fn run() -> usize {
    let mut h = Harness { failures: 0 };
    h.check(
        "reciprocity vs definition (n <= 100)",
        reciprocity_vs_definition(),
    );
    h.check(
        "inverse-shift fractional parts (n <= 80)",
        inverse_shift_fractional_parts(),
    );
    h.check(
        "closed form vs brute force (n <= 200)",
        closed_form_vs_bruteforce(),
    );
    h.check("partial sums 10 -> 32, 100 -> 2123", partial_sums());
    h.check("euler product monotone with honored tail", constant_tail());
    h.check("window sums: closed form, direct, bound", window_sums());
    h.check("completion identity (20 random tuples)", completion_small());
    h.check("star discrepancy vs grid oracle", discrepancy_oracle());
    h.check("erdos-turan bound with weights (1,3)", erdos_turan_holds());
    h.check("set generators vs oracles", generator_oracles());
    h.check("modular inverses (n <= 500)", modular_inverses());
    h.check(
        "blocked reduction thread independence",
        blocked_reduction_thread_independence(),
    );
    h.check("pair statistics on the full 8x8 tuple", pair_statistics());
    if h.failures == 0 {
        println!("selftest: all checks passed");
    } else {
        println!("selftest: {} check(s) FAILED", h.failures);
    }
    h.failures
}
