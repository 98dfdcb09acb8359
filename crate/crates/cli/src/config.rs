//! Experiment configuration: an optional TOML file provides defaults,
//! command-line flags override field by field, and the fully resolved
//! parameter set is rendered canonically and hashed into every output
//! header.
//!
//! The hash covers exactly the values that determine the numbers in the
//! output: command parameters and the reduction block size. It excludes
//! the output path and the thread count — the same experiment written
//! elsewhere or run on a different pool must produce the same bytes.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Reduction block length used when none is configured.
pub const DEFAULT_BLOCK_SIZE: usize = 4096;

/// On-disk configuration: one optional section per command.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub block_size: Option<usize>,
    pub format: Option<String>,
    pub sum: Option<SumSection>,
    pub qn: Option<QnSection>,
    pub meanvalue: Option<MeanValueSection>,
    pub discrepancy: Option<DiscrepancySection>,
    pub expsum: Option<ExpSumSection>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SumSection {
    pub m: Option<u64>,
    pub n: Option<u64>,
    pub naive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QnSection {
    pub n_max: Option<u64>,
    pub check_bruteforce_upto: Option<u64>,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeanValueSection {
    pub n_list: Option<Vec<u64>>,
    pub prime_limit: Option<u64>,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscrepancySection {
    pub rho: Option<String>,
    pub m_anchor: Option<u64>,
    pub n_anchor: Option<u64>,
    pub set_m: Option<String>,
    pub set_n: Option<String>,
    pub windows: Option<String>,
    pub h_cutoff: Option<u64>,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpSumSection {
    pub kind: Option<String>,
    pub m_anchor: Option<u64>,
    pub n_anchor: Option<u64>,
    pub b_list: Option<Vec<i64>>,
    pub a_list: Option<Vec<i64>>,
    pub beta: Option<String>,
    pub set_m: Option<String>,
    pub set_n: Option<String>,
    pub windows: Option<String>,
    pub output: Option<String>,
}

impl FileConfig {
    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file '{path}'"))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("cannot parse config file")
    }

    /// Canonical rendering; `parse(render(c)) == c`.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn render(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Canonical rendering plus SHA-256 of any resolved parameter struct.
/// The first 16 hex digits label the output file.
pub fn params_fingerprint<T: Serialize>(command: &str, params: &T) -> (String, String) {
    let body = toml::to_string(params).expect("params serialize");
    let canonical = format!("command = \"{command}\"\n{body}");
    let digest = Sha256::digest(canonical.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let compact = body
        .lines()
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("; ");
    (hex[..16].to_string(), compact)
}
