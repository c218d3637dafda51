#![allow(clippy::approx_constant)]

use std::path::Path;
use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_bellkit");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn bellkit(args: &[&str]) -> Run {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Data rows of a CSV document, split on commas, header removed.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn meta_value(text: &str, key: &str) -> f64 {
    let prefix = format!("# {key}: ");
    num(text.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap())
}

#[test]
fn scan_fine_grid_minimum() {
    let r = bellkit(&["scan", "--phi", "0", "--step", "0.0157"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (header, rows) = csv_rows(&r.stdout);
    assert_eq!(header, ["theta", "theta_prime", "margin"]);
    assert_eq!(rows.len(), 101 * 101);
    let min = rows
        .iter()
        .map(|row| (num(&row[0]), num(&row[1]), num(&row[2])))
        .fold((0.0, 0.0, f64::MAX), |best, p| if p.2 < best.2 { p } else { best });
    assert!((min.2 + 0.41421).abs() < 1e-3);
    // the margin is symmetric, so the first minimum may be the mirrored node
    let (hi, lo) = if min.0 >= min.1 { (min.0, min.1) } else { (min.1, min.0) };
    assert!((hi - 1.5708).abs() < 1e-3 && (lo - 0.7854).abs() < 1e-3);
    assert!((meta_value(&r.stdout, "min_theta") - 1.5708).abs() < 1e-3);
    assert!((meta_value(&r.stdout, "min_theta_prime") - 0.7854).abs() < 1e-3);
}

#[test]
fn scan_coarse_corners() {
    let r = bellkit(&["scan", "--phi", "0", "--step", "0.7854"]);
    assert_eq!(r.code, 0);
    let (_, rows) = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 9);
    for row in &rows {
        if row[0] == row[1] {
            assert!(num(&row[2]).abs() < 1e-12);
        }
    }
    assert!(r.stdout.starts_with("# tool: bellkit-cli\n"));
    assert!(r.stdout.contains("# seed: 0\n"));
}

#[test]
fn scan_degrees_flag() {
    let rad = bellkit(&["scan", "--step", "0.7853981633974483"]);
    let deg = bellkit(&["scan", "--step", "45", "--degrees"]);
    assert_eq!(deg.code, 0);
    assert_eq!(csv_rows(&rad.stdout).1, csv_rows(&deg.stdout).1);
}

#[test]
fn scan_json_and_domain_errors() {
    let r = bellkit(&["scan", "--step", "0.5", "--format", "json", "--seed", "12"]);
    assert_eq!(r.code, 0);
    let v = json(&r.stdout);
    assert_eq!(v["meta"]["seed"], 12);
    assert_eq!(v["meta"]["step"], 0.5);
    assert_eq!(v["data"].as_array().unwrap().len(), 16);
    assert!(v["data"][0]["margin"].is_number());

    let bad = bellkit(&["scan", "--phi", "3.2"]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("phi"));
    assert_eq!(bellkit(&["scan", "--step", "0"]).code, 2);
}

#[test]
fn unwritable_output_exits_2() {
    let r = bellkit(&["scan", "--step", "0.5", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("cannot write"));
    assert!(r.stdout.is_empty());
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let r = bellkit(&["scan", "--step", "0.3", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, bellkit(&["scan", "--step", "0.3"]).stdout);
}

#[test]
fn chsh_singlet_and_product() {
    let r = bellkit(&["chsh"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r.stdout);
    let value = v["data"]["value"].as_f64().unwrap();
    assert!((value - 2.828427).abs() < 1e-6);
    assert!(value <= 2.8284272);
    assert_eq!(v["data"]["violated"], true);
    assert_eq!(v["data"]["classical_bound"], 2.0);
    assert!((v["data"]["tsirelson_bound"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    for key in ["a", "a_prime", "b", "b_prime"] {
        let xyz: Vec<f64> = v["data"]["settings"][key]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert_eq!(xyz.len(), 3);
        assert!((xyz.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    let p = json(&bellkit(&["chsh", "--state", "product-up-up"]).stdout);
    assert!(p["data"]["value"].as_f64().unwrap() <= 2.0 + 1e-9);
    assert_eq!(p["data"]["violated"], false);
}

#[test]
fn chsh_rejects_csv_and_bad_starts() {
    assert_eq!(bellkit(&["chsh", "--format", "csv"]).code, 2);
    assert_eq!(bellkit(&["chsh", "--starts", "0"]).code, 2);
    assert_eq!(bellkit(&["chsh", "--state", "ghz"]).code, 2);
}

#[test]
fn bound_reports() {
    let chsh = json(&bellkit(&["bound", "--expr", "chsh"]).stdout);
    assert_eq!(chsh["data"]["bound"], 2.0);
    assert_eq!(chsh["data"]["strategies"], 16);
    assert_eq!(chsh["data"]["witness"]["alice"], serde_json::json!([1, 1]));
    assert_eq!(chsh["data"]["witness"]["bob"], serde_json::json!([1, 1]));

    let bell = json(&bellkit(&["bound", "--expr", "bell1964"]).stdout);
    assert_eq!(bell["data"]["bound"], 0.0);
    assert_eq!(bell["data"]["strategies"], 8);
    assert_eq!(bell["data"]["anticorrelation_constraint"], true);

    let r = bellkit(&["bound", "--expr", "mermin"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("mermin"));
}

#[test]
fn bound_witness_round_trip() {
    use bellkit::inequalities::{evaluate, BellExpression};
    use bellkit::lhv::DeterministicStrategy;

    for (name, expr) in [("chsh", BellExpression::chsh()), ("bell1964", BellExpression::bell1964())] {
        let v = json(&bellkit(&["bound", "--expr", name]).stdout);
        let outcomes = |key: &str| -> Vec<i8> {
            v["data"]["witness"][key]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_i64().unwrap() as i8)
                .collect()
        };
        let st = DeterministicStrategy::new(outcomes("alice"), outcomes("bob")).unwrap();
        let report = evaluate(&expr, &st.correlator_table()).unwrap();
        assert_eq!(report.value, v["data"]["bound"].as_f64().unwrap());
    }
}

#[test]
fn simulate_singlet_aligned() {
    let r = bellkit(&["simulate", "--settings", "zz", "--n", "100000"]);
    assert_eq!(r.code, 0);
    let (header, rows) = csv_rows(&r.stdout);
    assert_eq!(header, ["pair", "mean", "stderr", "n"]);
    assert_eq!(rows, vec![vec!["A0B0", "-1", "0", "100000"]]);
}

fn chsh_from_rows(rows: &[Vec<String>]) -> (f64, f64) {
    let get = |label: &str| {
        let row = rows.iter().find(|r| r[0] == label).unwrap();
        (num(&row[1]), num(&row[2]))
    };
    let (e00, s00) = get("A0B0");
    let (e01, s01) = get("A0B1");
    let (e10, s10) = get("A1B0");
    let (e11, s11) = get("A1B1");
    let value = (e00 + e01 + e10 - e11).abs();
    let se = (s00 * s00 + s01 * s01 + s10 * s10 + s11 * s11).sqrt();
    (value, se)
}

#[test]
fn simulate_singlet_violates_chsh() {
    let r = bellkit(&["simulate", "--n", "100000", "--seed", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (_, rows) = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 4);
    let (value, se) = chsh_from_rows(&rows);
    assert!(value > 2.0 + 5.0 * se, "{value} ± {se}");
    assert!((meta_value(&r.stdout, "chsh_estimate") - value).abs() < 1e-12);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_mixture_respects_chsh() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "mix.txt",
        "# a, a', b, b', weight\n+1 +1 +1 +1 0.4\n+1 -1 +1 -1 0.35\n-1 -1 +1 -1 0.25\n",
    );
    let r = bellkit(&["simulate", "--mixture", &file, "--n", "100000", "--seed", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (_, rows) = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 4);
    let (value, se) = chsh_from_rows(&rows);
    assert!(value <= 2.0 + 5.0 * se);
}

#[test]
fn malformed_mixture_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.txt", "+1 +1 +1 +1 0.5\n+1 2 +1 +1 0.5\n");
    let r = bellkit(&["simulate", "--mixture", &file]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);

    let off = write(dir.path(), "off.txt", "+1 +1 +1 +1 0.5\n");
    assert_eq!(bellkit(&["simulate", "--mixture", &off]).code, 2);
    assert_eq!(bellkit(&["simulate", "--mixture", "/no/such/file"]).code, 2);
    assert_eq!(bellkit(&["simulate", "--n", "0"]).code, 2);
}

#[test]
fn spin_model_rows() {
    let n = 100_000;
    let r = bellkit(&["spin-model", "--step", "90", "--degrees", "--n", &n.to_string()]);
    assert_eq!(r.code, 0);
    let (header, rows) = csv_rows(&r.stdout);
    assert_eq!(header, ["theta", "empirical_mean", "quantum_expectation", "abs_error"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][1], "1");
    assert_eq!(rows[2][1], "-1");
    assert_eq!(rows[2][2], "-1");
    assert!(num(&rows[1][1]).abs() <= 4.0 / (n as f64).sqrt());
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(bellkit(&["--help"]).code, 0);
    assert_eq!(bellkit(&["--version"]).code, 0);
    assert_eq!(bellkit(&[]).code, 2);
    assert_eq!(bellkit(&["teleport"]).code, 2);
}

#[test]
fn consistency_errors_map_to_exit_1() {
    use bellkit_cli::CliError;
    let e: CliError = bellkit::Error::Consistency("x".into()).into();
    assert_eq!(e.exit_code(), 1);
    let e: CliError = bellkit::Error::NoSamples.into();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = bellkit_cli::run(["bellkit", "bound", "--expr", "chsh"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), bellkit(&["bound", "--expr", "chsh"]).stdout);
}
