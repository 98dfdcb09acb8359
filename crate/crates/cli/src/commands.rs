//! Implementations of the experiment subcommands. Each resolves its
//! parameters (flags over config section), validates, computes through
//! the library, and emits one tabular document (CSV or JSON).

use anyhow::{anyhow, bail, Result};
use serde::Serialize;

use dedesums::arith::{parse_rat, rat_to_f64};
use dedesums::dedekind::{definition_sum, reciprocity_sum};
use dedesums::denominators::{mean_value_experiment, q_bruteforce, q_formula};
use dedesums::discrepancy::{
    discrepancy_bound, erdos_turan_bound, frac_points, harmonic_cutoff, pair_count,
    star_discrepancy, DataTuple,
};
use dedesums::expsums::{kloosterman_square_sum, pair_exponential_sum, WeightSeq};
use dedesums::generators::{build_set, build_windows, SetSpec, WindowSpec};
use dedesums::{rat, Rat};

use crate::config::{params_fingerprint, FileConfig};
use crate::output::{fmt_f64, Format, ReportDoc};

fn pick<T: Clone>(flag: Option<T>, section: Option<T>) -> Option<T> {
    flag.or(section)
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("missing required parameter '{name}' (flag or config)"))
}

// ────────────────────────────────────────────────────────────────────
// sum
// ────────────────────────────────────────────────────────────────────

pub fn cmd_sum(m: u64, n: u64, naive: bool) -> Result<()> {
    let s = if naive {
        definition_sum(m, n)
    } else {
        reciprocity_sum(m, n)
    }?;
    let normalized = &s * rat(12, 1);
    println!("s={s} S={normalized} q={}", normalized.denom());
    Ok(())
}

// ────────────────────────────────────────────────────────────────────
// qn
// ────────────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct QnParams {
    n_max: u64,
    check_bruteforce_upto: u64,
}

pub fn cmd_qn(
    cfg: &FileConfig,
    n_max: Option<u64>,
    check_upto: Option<u64>,
    output: Option<String>,
    format: Format,
) -> Result<()> {
    let section = cfg.qn.clone().unwrap_or_default();
    let params = QnParams {
        n_max: required(pick(n_max, section.n_max), "n_max")?,
        check_bruteforce_upto: pick(check_upto, section.check_bruteforce_upto).unwrap_or(0),
    };
    let output = pick(output, section.output);
    if params.n_max < 1 {
        bail!("n_max must be at least 1");
    }

    let (hash, compact) = params_fingerprint("qn", &params);
    let with_check = params.check_bruteforce_upto > 0;
    let columns: &[&str] = if with_check {
        &["n", "q", "cumulative", "q_bruteforce", "match"]
    } else {
        &["n", "q", "cumulative"]
    };
    let mut doc = ReportDoc::new("qn", &hash, &compact, columns);
    let mut cumulative: u128 = 0;
    let mut all_match = true;
    for n in 1..=params.n_max {
        let q = q_formula(n);
        cumulative += q as u128;
        let mut fields = vec![n.to_string(), q.to_string(), cumulative.to_string()];
        if with_check {
            if n <= params.check_bruteforce_upto {
                let brute = q_bruteforce(n);
                all_match &= q == brute;
                fields.push(brute.to_string());
                fields.push((q == brute).to_string());
            } else {
                fields.push(String::new());
                fields.push(String::new());
            }
        }
        doc.row(&fields);
    }
    doc.finish(output.as_deref(), format)?;
    if !all_match {
        return Err(anyhow!(InternalInvariant(
            "closed-form q(n) disagreed with brute force".into()
        )));
    }
    Ok(())
}

// ────────────────────────────────────────────────────────────────────
// meanvalue
// ────────────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct MeanValueParams {
    n_list: Vec<u64>,
    prime_limit: u64,
}

pub fn cmd_meanvalue(
    cfg: &FileConfig,
    n_list: Option<Vec<u64>>,
    prime_limit: Option<u64>,
    output: Option<String>,
    format: Format,
) -> Result<()> {
    let section = cfg.meanvalue.clone().unwrap_or_default();
    let params = MeanValueParams {
        n_list: required(pick(n_list, section.n_list), "n_list")?,
        prime_limit: pick(prime_limit, section.prime_limit).unwrap_or(10_000_000),
    };
    let output = pick(output, section.output);

    let (constant, reports) = mean_value_experiment(&params.n_list, params.prime_limit)?;
    let (hash, compact) = params_fingerprint("meanvalue", &params);
    let mut doc = ReportDoc::new(
        "meanvalue",
        &hash,
        &compact,
        &[
            "N",
            "direct_sum",
            "prediction",
            "ratio",
            "C_value",
            "C_tail_error",
        ],
    );
    for r in &reports {
        doc.row(&[
            r.n.to_string(),
            r.direct_sum.to_string(),
            fmt_f64(r.prediction),
            fmt_f64(r.ratio),
            fmt_f64(constant.value),
            fmt_f64(constant.tail_error),
        ]);
    }
    doc.finish(output.as_deref(), format)
}

// ────────────────────────────────────────────────────────────────────
// discrepancy
// ────────────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct DiscrepancyParams {
    rho: String,
    m_anchor: u64,
    n_anchor: u64,
    set_m: String,
    set_n: String,
    windows: String,
    h_cutoff: u64,
}

pub fn build_tuple(
    rho: &Rat,
    m_anchor: u64,
    n_anchor: u64,
    set_m: &SetSpec,
    set_n: &SetSpec,
    windows: &WindowSpec,
) -> Result<DataTuple> {
    let ms = build_set(set_m, m_anchor)?;
    let ns = build_set(set_n, n_anchor)?;
    let ws = build_windows(windows, m_anchor, &ns)?;
    Ok(DataTuple::new(rho.clone(), m_anchor, n_anchor, ms, ns, ws)?)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_discrepancy(
    cfg: &FileConfig,
    rho: Option<String>,
    m_anchor: Option<u64>,
    n_anchor: Option<u64>,
    set_m: Option<String>,
    set_n: Option<String>,
    windows: Option<String>,
    h_cutoff: Option<u64>,
    output: Option<String>,
    format: Format,
) -> Result<()> {
    let section = cfg.discrepancy.clone().unwrap_or_default();
    let m_anchor = required(pick(m_anchor, section.m_anchor), "m_anchor")?;
    let n_anchor = required(pick(n_anchor, section.n_anchor), "n_anchor")?;
    let rho_str = pick(rho, section.rho).unwrap_or_else(|| "12".into());
    let set_m_str = pick(set_m, section.set_m).unwrap_or_else(|| "full".into());
    let set_n_str = pick(set_n, section.set_n).unwrap_or_else(|| "full".into());
    let windows_str = pick(windows, section.windows).unwrap_or_else(|| "full".into());
    let h = pick(h_cutoff, section.h_cutoff).unwrap_or_else(|| harmonic_cutoff(m_anchor, n_anchor));
    let output = pick(output, section.output);
    if h < 1 {
        bail!("h_cutoff must be at least 1");
    }

    let rho_rat = parse_rat(&rho_str)?;
    let set_m_spec: SetSpec = set_m_str.parse()?;
    let set_n_spec: SetSpec = set_n_str.parse()?;
    let window_spec: WindowSpec = windows_str.parse()?;
    // Canonical parameter strings, independent of input spelling.
    let params = DiscrepancyParams {
        rho: parse_rat(&rho_str)?.to_string(),
        m_anchor,
        n_anchor,
        set_m: set_m_spec.to_string(),
        set_n: set_n_spec.to_string(),
        windows: window_spec.to_string(),
        h_cutoff: h,
    };

    let tuple = build_tuple(
        &rho_rat,
        m_anchor,
        n_anchor,
        &set_m_spec,
        &set_n_spec,
        &window_spec,
    )?;
    let pairs = pair_count(&tuple);
    let points = frac_points(&tuple)?;
    let delta = rat_to_f64(&star_discrepancy(&points));
    let card = tuple.card_product();
    let bound = discrepancy_bound(m_anchor, n_anchor, card, pairs);
    let et_rhs = erdos_turan_bound(&points, h);
    let delta_ratio = if pairs > 0 {
        delta / pairs as f64
    } else {
        f64::NAN
    };
    let bound_ratio = if bound > 0.0 { delta / bound } else { f64::NAN };

    let (hash, compact) = params_fingerprint("discrepancy", &params);
    let mut doc = ReportDoc::new(
        "discrepancy",
        &hash,
        &compact,
        &[
            "rho",
            "M",
            "N",
            "set_spec",
            "pair_count",
            "delta",
            "delta_over_count",
            "bound",
            "bound_ratio",
            "H",
            "et_rhs",
        ],
    );
    doc.row(&[
        params.rho.clone(),
        m_anchor.to_string(),
        n_anchor.to_string(),
        format!("m={};n={};w={}", params.set_m, params.set_n, params.windows),
        pairs.to_string(),
        fmt_f64(delta),
        fmt_f64(delta_ratio),
        fmt_f64(bound),
        fmt_f64(bound_ratio),
        h.to_string(),
        fmt_f64(et_rhs),
    ]);
    doc.finish(output.as_deref(), format)
}

// ────────────────────────────────────────────────────────────────────
// expsum
// ────────────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct ExpSumParams {
    kind: String,
    m_anchor: u64,
    n_anchor: u64,
    b_list: Vec<i64>,
    a_list: Vec<i64>,
    beta: String,
    set_m: String,
    set_n: String,
    windows: String,
    block_size: usize,
}

fn parse_beta(spec: &str, anchor: u64) -> Result<WeightSeq> {
    if spec == "ones" {
        return Ok(WeightSeq::ones(anchor));
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| anyhow!("bad seed in beta spec '{spec}'"))?;
        return Ok(WeightSeq::random_unit(anchor, seed));
    }
    bail!("unrecognized beta spec '{spec}' (expected 'ones' or 'random:SEED')")
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_expsum(
    cfg: &FileConfig,
    kind: Option<String>,
    m_anchor: Option<u64>,
    n_anchor: Option<u64>,
    b_list: Option<Vec<i64>>,
    a_list: Option<Vec<i64>>,
    beta: Option<String>,
    set_m: Option<String>,
    set_n: Option<String>,
    windows: Option<String>,
    block_size: usize,
    output: Option<String>,
    format: Format,
) -> Result<()> {
    let section = cfg.expsum.clone().unwrap_or_default();
    let kind = pick(kind, section.kind).unwrap_or_else(|| "bigc".into());
    let m_anchor = required(pick(m_anchor, section.m_anchor), "m_anchor")?;
    let n_anchor = required(pick(n_anchor, section.n_anchor), "n_anchor")?;
    let b_list = required(pick(b_list, section.b_list), "b_list")?;
    let a_list = pick(a_list, section.a_list).unwrap_or_else(|| vec![0]);
    let beta_str = pick(beta, section.beta).unwrap_or_else(|| "ones".into());
    let set_m_str = pick(set_m, section.set_m).unwrap_or_else(|| "full".into());
    let set_n_str = pick(set_n, section.set_n).unwrap_or_else(|| "full".into());
    let windows_str = pick(windows, section.windows).unwrap_or_else(|| "full".into());
    let output = pick(output, section.output);
    if m_anchor < 1 || n_anchor < 1 {
        bail!("anchors must be at least 1");
    }

    let params = ExpSumParams {
        kind: kind.clone(),
        m_anchor,
        n_anchor,
        b_list: b_list.clone(),
        a_list: a_list.clone(),
        beta: beta_str.clone(),
        set_m: set_m_str.parse::<SetSpec>()?.to_string(),
        set_n: set_n_str.parse::<SetSpec>()?.to_string(),
        windows: windows_str.parse::<WindowSpec>()?.to_string(),
        block_size,
    };
    let (hash, compact) = params_fingerprint("expsum", &params);
    let mut doc = ReportDoc::new(
        "expsum",
        &hash,
        &compact,
        &[
            "M", "N", "b", "a", "sum_real", "sum_imag", "rhs", "ratio", "terms",
        ],
    );

    match kind.as_str() {
        "bigc" => {
            let beta_seq = parse_beta(&beta_str, n_anchor)?;
            for &b in &b_list {
                if b < 1 {
                    bail!("bigc requires positive b, got {b}");
                }
                let r = kloosterman_square_sum(m_anchor, &beta_seq, b as u64, block_size);
                doc.row(&[
                    m_anchor.to_string(),
                    n_anchor.to_string(),
                    b.to_string(),
                    String::new(),
                    fmt_f64(r.value.re),
                    fmt_f64(r.value.im),
                    fmt_f64(r.bound),
                    fmt_f64(r.ratio),
                    r.terms.to_string(),
                ]);
            }
        }
        "pairset" => {
            let tuple = build_tuple(
                &rat(12, 1),
                m_anchor,
                n_anchor,
                &set_m_str.parse()?,
                &set_n_str.parse()?,
                &windows_str.parse()?,
            )?;
            for &a in &a_list {
                for &b in &b_list {
                    let r = pair_exponential_sum(&tuple, a, b, block_size)?;
                    doc.row(&[
                        m_anchor.to_string(),
                        n_anchor.to_string(),
                        b.to_string(),
                        a.to_string(),
                        fmt_f64(r.value.re),
                        fmt_f64(r.value.im),
                        fmt_f64(r.bound),
                        fmt_f64(r.ratio),
                        r.terms.to_string(),
                    ]);
                }
            }
        }
        other => bail!("unrecognized expsum kind '{other}' (expected 'bigc' or 'pairset')"),
    }
    doc.finish(output.as_deref(), format)
}

/// Marker for failures that mean the tool's own invariants broke (exit
/// code 3), as opposed to bad input (exit code 2).
#[derive(Debug)]
pub struct InternalInvariant(pub String);

impl std::fmt::Display for InternalInvariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal invariant violated: {}", self.0)
    }
}

impl std::error::Error for InternalInvariant {}
