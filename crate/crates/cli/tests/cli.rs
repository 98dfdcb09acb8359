//! End-to-end checks of the command-line surface: documented outputs,
//! exit codes, config-file merging.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dedesums"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn sum_prints_value_normalization_and_denominator() {
    let out = run(&["sum", "1", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "s=1/18 S=2/3 q=3");

    let out = run(&["sum", "1", "1"]);
    assert_eq!(stdout(&out).trim(), "s=0 S=0 q=1");

    // Naive and fast paths agree.
    let fast = run(&["sum", "17", "123"]);
    let naive = run(&["sum", "17", "123", "--naive"]);
    assert_eq!(stdout(&fast), stdout(&naive));
}

#[test]
fn sum_rejects_non_coprime_with_exit_2() {
    let out = run(&["sum", "2", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("coprimality"), "stderr: {err}");
}

#[test]
fn qn_cumulative_reaches_32_at_10() {
    let out = run(&["qn", "--n-max", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert_eq!(last, "10,1,32");
}

#[test]
fn qn_bruteforce_flags_all_match() {
    let out = run(&["qn", "--n-max", "60", "--check-bruteforce-upto", "60"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut data_rows = 0;
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[4], "true", "row: {line}");
        data_rows += 1;
    }
    assert_eq!(data_rows, 60);
}

#[test]
fn qn_single_row() {
    let out = run(&["qn", "--n-max", "1"]);
    let text = stdout(&out);
    assert!(text.ends_with("n,q,cumulative\n1,1,1\n"));
}

#[test]
fn qn_requires_n_max() {
    let out = run(&["qn"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expsum_documented_values() {
    // (M, N, b) = (2, 2, 1) with unit weights sums to 2.
    let out = run(&[
        "expsum",
        "--kind",
        "bigc",
        "--m-anchor",
        "2",
        "--n-anchor",
        "2",
        "--b",
        "1",
    ]);
    let text = stdout(&out);
    let row = text.lines().last().unwrap();
    assert!(row.starts_with("2,2,1,,2,0,"), "row: {row}");

    // (1, 1, 1): the lone pair fails the gcd filter.
    let out = run(&[
        "expsum",
        "--kind",
        "bigc",
        "--m-anchor",
        "1",
        "--n-anchor",
        "1",
        "--b",
        "1",
    ]);
    let row = stdout(&out);
    let row = row.lines().last().unwrap();
    assert!(row.starts_with("1,1,1,,0,"), "row: {row}");
    assert!(row.ends_with(",0"), "terms must be 0: {row}");

    // (1, 2, 1): single surviving pair of modulus one.
    let out = run(&[
        "expsum",
        "--kind",
        "bigc",
        "--m-anchor",
        "1",
        "--n-anchor",
        "2",
        "--b",
        "1",
    ]);
    let row = stdout(&out);
    let row = row.lines().last().unwrap();
    let value: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((value - 1.0).abs() < 1e-12, "row: {row}");
}

#[test]
fn expsum_pairset_rejects_zero_b() {
    let out = run(&[
        "expsum",
        "--kind",
        "pairset",
        "--m-anchor",
        "2",
        "--n-anchor",
        "2",
        "--b",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expsum_rejects_unknown_kind_and_beta() {
    let out = run(&[
        "expsum",
        "--kind",
        "fancy",
        "--m-anchor",
        "2",
        "--n-anchor",
        "2",
        "--b",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "expsum",
        "--kind",
        "bigc",
        "--m-anchor",
        "2",
        "--n-anchor",
        "2",
        "--b",
        "1",
        "--beta",
        "gauss",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn discrepancy_documented_row() {
    let out = run(&["discrepancy", "--m-anchor", "2", "--n-anchor", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().last().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "12");
    assert_eq!(fields[4], "2", "pair count");
    assert_eq!(fields[5], "1", "delta");
}

#[test]
fn discrepancy_rejects_invalid_specs() {
    let out = run(&[
        "discrepancy",
        "--m-anchor",
        "4",
        "--n-anchor",
        "4",
        "--windows",
        "constant:8:2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "discrepancy",
        "--m-anchor",
        "4",
        "--n-anchor",
        "4",
        "--rho",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["discrepancy", "--m-anchor", "8", "--n-anchor", "4"]);
    assert_eq!(out.status.code(), Some(2), "anchors must satisfy M <= N");
}

#[test]
fn general_rho_runs_exactly() {
    let out = run(&[
        "discrepancy",
        "--m-anchor",
        "4",
        "--n-anchor",
        "4",
        "--rho",
        "2.5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().last().unwrap();
    assert!(row.starts_with("5/2,"), "canonical rho form: {row}");
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(&cfg_path, "[qn]\nn_max = 5\n").unwrap();

    let out = run(&["qn", "--config", cfg_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().last().unwrap().starts_with("5,"));

    let out = run(&["qn", "--config", cfg_path.to_str().unwrap(), "--n-max", "3"]);
    assert!(stdout(&out).lines().last().unwrap().starts_with("3,"));
}

#[test]
fn config_file_errors_are_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    std::fs::write(&cfg_path, "totally = \"unknown\"\n").unwrap();
    let out = run(&["qn", "--n-max", "3", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["qn", "--n-max", "3", "--config", "/nonexistent/x.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&["qn", "--n-max", "4", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().last().unwrap().starts_with("4,"));
}

#[test]
fn json_format_mirrors_csv_content() {
    let csv = run(&["qn", "--n-max", "4"]);
    let json = run(&["qn", "--n-max", "4", "--format", "json"]);
    assert!(csv.status.success() && json.status.success());
    let text = stdout(&json);
    assert!(text.contains("\"command\": \"qn\""));
    assert!(text.contains("\"cumulative\""));
    // Same config hash in both renderings.
    let csv_text = stdout(&csv);
    let hash_line = csv_text
        .lines()
        .find(|l| l.starts_with("# config_hash:"))
        .unwrap();
    let hash = hash_line.rsplit(' ').next().unwrap();
    assert!(text.contains(hash));
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("selftest: all checks passed"));
    assert!(!text.contains("FAIL"));
}
