//! `dedesums` — experiment runner for exact Dedekind-sum statistics.
//!
//! Exit codes: 0 success, 2 invalid input, 3 internal invariant
//! violation (an oracle disagreed; the tool fails loudly).

// Divisibility tests are spelled `n % p == 0` throughout.
#![allow(clippy::manual_is_multiple_of)]

mod commands;
mod config;
mod output;
mod selftest;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use commands::InternalInvariant;
use config::{FileConfig, DEFAULT_BLOCK_SIZE};
use output::Format;

#[derive(Parser)]
#[command(
    name = "dedesums",
    version,
    about = "Exact Dedekind sums, least denominators, Kloosterman-fraction \
             exponential sums, and discrepancy experiments",
    after_help = "Outputs are CSV with a '#'-prefixed metadata header \
                  (tool version, resolved parameters, config hash, adopted \
                  constants). Identical parameters produce byte-identical \
                  files regardless of --threads."
)]
struct Cli {
    /// Worker threads for parallel sweeps (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Fixed block length for deterministic reductions.
    #[arg(long, global = true, default_value_t = DEFAULT_BLOCK_SIZE)]
    block_size: usize,

    /// TOML config file; flags override its sections field by field.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Output format for tabular commands: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print s(m,n), S(m,n) = 12·s(m,n), and the reduced denominator of S.
    Sum(SumArgs),
    /// Tabulate least denominators q(n) with cumulative sums.
    Qn(QnArgs),
    /// Mean-value experiment: direct q-sums against C·N²/sqrt(log N).
    Meanvalue(MeanValueArgs),
    /// Star discrepancy of {rho·s(m,n)} over a windowed pair set.
    Discrepancy(DiscrepancyArgs),
    /// Kloosterman-fraction exponential sums with reference-bound ratios.
    Expsum(ExpSumArgs),
    /// Run the built-in oracle suite.
    Selftest,
}

#[derive(Args)]
struct SumArgs {
    /// First argument m (periodic mod n).
    m: u64,
    /// Modulus n.
    n: u64,
    /// Evaluate by the O(n) defining sum instead of reciprocity descent.
    #[arg(long)]
    naive: bool,
}

#[derive(Args)]
struct QnArgs {
    /// Largest n to tabulate.
    #[arg(long, visible_alias = "N")]
    n_max: Option<u64>,
    /// Also run the brute-force minimization for n up to this bound and
    /// emit match flags.
    #[arg(long)]
    check_bruteforce_upto: Option<u64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args)]
struct MeanValueArgs {
    /// Comma-separated cutoffs, e.g. 10000,100000,1000000.
    #[arg(long, visible_alias = "N-list", value_delimiter = ',')]
    n_list: Option<Vec<u64>>,
    /// Euler products truncated at this prime.
    #[arg(long)]
    prime_limit: Option<u64>,
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args)]
struct DiscrepancyArgs {
    /// Scale factor: integer, fraction (a/b), or decimal; default 12.
    #[arg(long)]
    rho: Option<String>,
    /// Anchor M: the m-set lives in (M, 2M].
    #[arg(long)]
    m_anchor: Option<u64>,
    /// Anchor N: the n-set lives in (N, 2N].
    #[arg(long)]
    n_anchor: Option<u64>,
    /// m-set spec: full | primes | smooth:Q | random:D:SEED | explicit:a,b,…
    #[arg(long)]
    set_m: Option<String>,
    /// n-set spec, same grammar as --set-m.
    #[arg(long)]
    set_n: Option<String>,
    /// Window spec: full | constant:K:L | random:SEED.
    #[arg(long)]
    windows: Option<String>,
    /// Harmonic cutoff H (default floor(sqrt(N/M)), at least 1).
    #[arg(long)]
    h_cutoff: Option<u64>,
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Args)]
struct ExpSumArgs {
    /// bigc: mean square over m of weighted inner sums.
    /// pairset: direct sum over a windowed pair set.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    m_anchor: Option<u64>,
    #[arg(long)]
    n_anchor: Option<u64>,
    /// Comma-separated b values (positive for bigc, nonzero for pairset).
    #[arg(long = "b", value_delimiter = ',')]
    b_list: Option<Vec<i64>>,
    /// Comma-separated a values (pairset only; default 0).
    #[arg(long = "a", value_delimiter = ',')]
    a_list: Option<Vec<i64>>,
    /// Weights: ones | random:SEED (bigc only).
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    set_m: Option<String>,
    #[arg(long)]
    set_n: Option<String>,
    #[arg(long)]
    windows: Option<String>,
    #[arg(long, short)]
    output: Option<String>,
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let block_size = if cli.block_size > 0 {
        cli.block_size
    } else {
        cfg.block_size.unwrap_or(DEFAULT_BLOCK_SIZE)
    };
    let format: Format = cli
        .format
        .or_else(|| cfg.format.clone())
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or_default();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()?;

    pool.install(|| match cli.command {
        Command::Sum(a) => {
            let (m, n, naive) = {
                let s = cfg.sum.clone().unwrap_or_default();
                (a.m, a.n, a.naive || s.naive.unwrap_or(false))
            };
            commands::cmd_sum(m, n, naive)
        }
        Command::Qn(a) => {
            commands::cmd_qn(&cfg, a.n_max, a.check_bruteforce_upto, a.output, format)
        }
        Command::Meanvalue(a) => {
            commands::cmd_meanvalue(&cfg, a.n_list, a.prime_limit, a.output, format)
        }
        Command::Discrepancy(a) => commands::cmd_discrepancy(
            &cfg, a.rho, a.m_anchor, a.n_anchor, a.set_m, a.set_n, a.windows, a.h_cutoff, a.output,
            format,
        ),
        Command::Expsum(a) => commands::cmd_expsum(
            &cfg, a.kind, a.m_anchor, a.n_anchor, a.b_list, a.a_list, a.beta, a.set_m, a.set_n,
            a.windows, block_size, a.output, format,
        ),
        Command::Selftest => {
            let failures = selftest::run();
            if failures > 0 {
                Err(anyhow::Error::new(InternalInvariant(format!(
                    "{failures} selftest check(s) failed"
                ))))
            } else {
                Ok(())
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InternalInvariant>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
