//! Tabular output as CSV (default) or JSON, with identical metadata in
//! both: tool version, command, resolved parameters and their hash, and
//! the adopted-constants ledger. Nothing time- or host-dependent goes
//! into a document: identical parameters must give identical bytes.

use std::io::Write;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Serialize;

/// Conventions baked into every reported bound.
pub const CONSTANTS_LEDGER: &str = "erdos_turan_weights=(1,3); implied_constants=1; \
     o1_exponents=0; mean_value_prefactor=3*sqrt(2)/(4*pi)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unrecognized format '{other}' (expected 'csv' or 'json')"),
        }
    }
}

/// One tabular result document.
#[derive(Serialize)]
pub struct ReportDoc {
    tool: String,
    command: String,
    params: String,
    config_hash: String,
    constants: String,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl ReportDoc {
    pub fn new(command: &str, hash: &str, params: &str, columns: &[&str]) -> Self {
        Self {
            tool: format!("dedesums v{}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            params: params.to_string(),
            config_hash: hash.to_string(),
            constants: CONSTANTS_LEDGER.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns.len());
        self.rows.push(fields.to_vec());
    }

    fn render_csv(&self) -> String {
        let mut buf = String::new();
        buf.push_str(&format!(
            "# {}\n# command: {}\n# params: {}\n# config_hash: {}\n# constants: {}\n",
            self.tool, self.command, self.params, self.config_hash, self.constants
        ));
        buf.push_str(&self.columns.join(","));
        buf.push('\n');
        for row in &self.rows {
            let escaped: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
            buf.push_str(&escaped.join(","));
            buf.push('\n');
        }
        buf
    }

    fn render_json(&self) -> String {
        // Struct field order fixes the key order; output is deterministic.
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    /// Write to the path, or to stdout when no path is given.
    pub fn finish(self, output: Option<&str>, format: Format) -> Result<()> {
        let text = self.render(format);
        match output {
            Some(path) => std::fs::write(path, text)
                .with_context(|| format!("cannot write output file '{path}'")),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .context("cannot write to stdout"),
        }
    }
}

/// Shortest round-trip decimal form; deterministic for identical bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Quote a field when it contains a separator, quote, or newline.
fn csv_field(f: &str) -> String {
    if f.contains([',', '"', '\n']) {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportDoc {
        let mut doc = ReportDoc::new("qn", "abcd", "n_max = 3", &["n", "q"]);
        doc.row(&["1".into(), "1".into()]);
        doc
    }

    #[test]
    fn csv_header_shape() {
        let text = sample().render(Format::Csv);
        assert!(text.starts_with("# dedesums v"));
        assert!(text.contains("# command: qn\n"));
        assert!(text.contains("# config_hash: abcd\n"));
        assert!(text.ends_with("n,q\n1,1\n"));
    }

    #[test]
    fn json_carries_the_same_metadata() {
        let text = sample().render(Format::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["command"], "qn");
        assert_eq!(v["config_hash"], "abcd");
        assert_eq!(v["columns"][1], "q");
        assert_eq!(v["rows"][0][0], "1");
    }

    #[test]
    fn fields_with_separators_are_quoted() {
        let mut doc = ReportDoc::new("x", "h", "p", &["a", "b"]);
        doc.row(&["m=explicit:3,5,7".into(), "1".into()]);
        assert!(doc
            .render(Format::Csv)
            .ends_with("\"m=explicit:3,5,7\",1\n"));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert!("yaml".parse::<Format>().is_err());
    }

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-12, 12345.678901234567, f64::NAN] {
            let s = fmt_f64(x);
            if x.is_nan() {
                assert_eq!(s, "NaN");
            } else {
                assert_eq!(s.parse::<f64>().unwrap(), x);
            }
        }
    }
}
