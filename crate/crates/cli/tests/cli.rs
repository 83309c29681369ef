//! End-to-end runs of the `paraself` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use paraself::bell::{j_value, BellExpression, CorrelationTable, SchemeKind};
use paraself::certify::certify_theorem1;
use paraself::io::{self, Provenance};
use paraself::strategies::{chsh_reference, compose, compose_tables};
use tempfile::TempDir;

const SQRT8: f64 = 2.828_427_124_746_190_1;

fn paraself(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paraself"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_table(p: &Path) -> CorrelationTable {
    io::table_from_json(&std::fs::read_to_string(p).unwrap())
        .unwrap()
        .0
}

fn simulate(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut args = vec!["simulate", "--out", s(&out)];
    args.extend_from_slice(extra);
    let run = paraself(&args);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    out
}

fn assert_single_error_line(out: &Output, code_want: i32, needle: &str) {
    assert_eq!(code(out), code_want, "stderr: {}", stderr(out));
    let err = stderr(out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error["), "{err}");
    assert!(err.contains(needle), "{err:?} lacks {needle:?}");
}

#[test]
fn simulate_writes_normalized_two_copy_table() {
    let dir = TempDir::new().unwrap();
    let file = simulate(
        &dir,
        "t.json",
        &[
            "--strategy",
            "chsh",
            "--copies",
            "2",
            "--scheme",
            "broadcast",
        ],
    );
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.contains("\"encoding\": \"mixed-radix-copy1-lsd\""));
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let probs = json["probs"].as_array().unwrap();
    assert_eq!(probs.len(), 2);
    for px in probs {
        for pxy in px.as_array().unwrap() {
            let rows = pxy.as_array().unwrap();
            assert_eq!(rows.len(), 4);
            let sum: f64 = rows
                .iter()
                .flat_map(|r| r.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()))
                .sum();
            assert!((sum - 1.0).abs() <= 1e-12);
        }
    }
    assert_eq!(
        json["provenance"]["strategies"],
        serde_json::json!(["chsh", "chsh"])
    );
}

#[test]
fn simulate_adversary_forces_equal_outputs() {
    let dir = TempDir::new().unwrap();
    let file = simulate(
        &dir,
        "adv.json",
        &["--strategy", "adversary-copy", "--copies", "2"],
    );
    let t = read_table(&file);
    // joint a = (a1, a2) = (0, 1) has index 2
    for x in 0..2 {
        for y in 0..2 {
            for b in 0..4 {
                assert_eq!(t.get(x, y, 2, b), 0.0);
            }
        }
    }
}

#[test]
fn simulate_with_noise_scales_first_copy() {
    let dir = TempDir::new().unwrap();
    let file = simulate(
        &dir,
        "noisy.json",
        &["--strategy", "chsh", "--copies", "2", "--noise", "0.9"],
    );
    let j1 = j_value(&read_table(&file), &BellExpression::chsh(), 1).unwrap();
    assert!((j1 - 2.545_584).abs() <= 1e-6);
    assert!((j1 - 0.9 * SQRT8).abs() <= 1e-12);
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["--strategy", "tilted-chsh(0.5)", "--copies", "2"];
    let a = std::fs::read(simulate(&dir, "a.json", &args)).unwrap();
    let b = std::fs::read(simulate(&dir, "b.json", &args)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn file_round_trip_certifies_like_memory() {
    let dir = TempDir::new().unwrap();
    let table = simulate(&dir, "t.json", &["--strategy", "chsh", "--copies", "3"]);
    let report = path(&dir, "r.json");
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem1",
        "--bell",
        "chsh",
        "--beta",
        "2.8284271247",
        "--out",
        s(&report),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));

    let s1 = chsh_reference();
    let memory = compose(&[s1.clone(), s1.clone(), s1], SchemeKind::Broadcast).unwrap();
    let expected = io::report_to_json(&certify_theorem1(
        &memory,
        &BellExpression::chsh(),
        2.8284271247,
        1e-8,
    ));
    assert_eq!(std::fs::read_to_string(&report).unwrap(), expected);
}

#[test]
fn certify_rejects_adversary_naming_copy_two() {
    let dir = TempDir::new().unwrap();
    let table = simulate(
        &dir,
        "adv.json",
        &["--strategy", "adversary-shared-randomness", "--copies", "2"],
    );
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem1",
        "--bell",
        "chsh",
        "--beta",
        "2.8284271247",
    ]);
    assert_eq!(code(&run), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&run)).unwrap();
    assert_eq!(report["verdict"], "fail");
    assert!(report["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .any(|d| d.as_str().unwrap().starts_with("copy 2")));
}

#[test]
fn certify_zero_prefix_is_exit_four() {
    let dir = TempDir::new().unwrap();
    let det = CorrelationTable::deterministic(2, 2, &[0, 0], &[0, 0]).unwrap();
    let t = compose_tables(&[det.clone(), det], SchemeKind::Broadcast).unwrap();
    let file = path(&dir, "zero.json");
    std::fs::write(&file, io::table_to_json(&t, &Provenance::default())).unwrap();
    let report = path(&dir, "r.json");
    let run = paraself(&[
        "certify",
        "--table",
        s(&file),
        "--protocol",
        "theorem1",
        "--bell",
        "chsh",
        "--beta",
        "2",
        "--out",
        s(&report),
    ]);
    assert_eq!(code(&run), 4, "{}", stderr(&run));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["verdict"], "precondition-violated");
}

#[test]
fn certify_malformed_table_points_at_defect() {
    let dir = TempDir::new().unwrap();
    let table = simulate(&dir, "t.json", &["--strategy", "chsh", "--copies", "2"]);
    let mut json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&table).unwrap()).unwrap();
    json["probs"][1][0][3][2] = serde_json::json!("oops");
    std::fs::write(&table, json.to_string()).unwrap();
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem1",
        "--bell",
        "chsh",
        "--beta",
        "2.8284271247",
    ]);
    assert_single_error_line(&run, 2, "/probs/1/0/3/2");

    json["probs"][1][0][3][2] = serde_json::json!(0.5);
    std::fs::write(&table, json.to_string()).unwrap();
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem1",
        "--bell",
        "chsh",
        "--beta",
        "2.8284271247",
    ]);
    assert_single_error_line(&run, 2, "/probs/1/0");
}

#[test]
fn certify_theorem3_with_oracle_target() {
    let dir = TempDir::new().unwrap();
    let table = simulate(
        &dir,
        "t.json",
        &["--strategy", "chsh", "--strategy", "tilted-chsh(0.5)"],
    );
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem3",
        "--bell",
        "chsh",
        "--bell",
        "tilted-chsh(0.5)",
        "--beta",
        "oracle",
    ]);
    assert_eq!(code(&run), 0, "{}{}", stdout(&run), stderr(&run));
    let report: serde_json::Value = serde_json::from_str(&stdout(&run)).unwrap();
    let beta2 = report["copies"][1]["target"].as_f64().unwrap();
    assert!((beta2 - 8.5f64.sqrt()).abs() <= 1e-6);
}

#[test]
fn certify_theorem2_against_preset_reference() {
    let dir = TempDir::new().unwrap();
    let table = simulate(
        &dir,
        "t.json",
        &["--strategy", "fullstats(pi/4,pi/6)", "--copies", "2"],
    );
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem2",
        "--reference-strategy",
        "fullstats(pi/4,pi/6)",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(code(&run), 0, "{}{}", stdout(&run), stderr(&run));
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem2",
        "--reference-strategy",
        "fullstats(pi/5,pi/6)",
    ]);
    assert_eq!(code(&run), 1);
}

#[test]
fn certify_theorem4_per_copy() {
    let dir = TempDir::new().unwrap();
    let table = simulate(
        &dir,
        "t.json",
        &[
            "--strategy",
            "chsh",
            "--copies",
            "2",
            "--scheme",
            "per-copy",
        ],
    );
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem4",
        "--bell",
        "chsh",
        "--beta",
        "oracle",
    ]);
    assert_eq!(code(&run), 0, "{}{}", stdout(&run), stderr(&run));
}

#[test]
fn certify_config_errors_are_exit_two() {
    let dir = TempDir::new().unwrap();
    let table = simulate(&dir, "t.json", &["--strategy", "chsh", "--copies", "2"]);
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem9",
        "--bell",
        "chsh",
        "--beta",
        "1",
    ]);
    assert_single_error_line(&run, 2, "--protocol");
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem1",
        "--bell",
        "nope",
        "--beta",
        "1",
    ]);
    assert_single_error_line(&run, 2, "--bell");
    let run = paraself(&[
        "certify",
        "--table",
        s(&table),
        "--protocol",
        "theorem1",
        "--bell",
        "chsh",
        "--beta",
        "x",
    ]);
    assert_single_error_line(&run, 2, "--beta");
    let run = paraself(&["certify", "--protocol", "theorem1"]);
    assert_single_error_line(&run, 2, "--table");
}

#[test]
fn bounds_prints_ten_significant_digits() {
    let run = paraself(&["bounds", "--bell", "chsh"]);
    assert_eq!(code(&run), 0);
    assert_eq!(stdout(&run), "classical: 2\nquantum: 2.828427125\n");
    let run = paraself(&["bounds", "--bell", "chsh-game"]);
    assert!(stdout(&run).starts_with("classical: 0.75\n"));
}

#[test]
fn bounds_of_zero_expression_file() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "zero.json");
    std::fs::write(&file, io::expression_to_json(&BellExpression::zero(2, 2))).unwrap();
    let witness = path(&dir, "w.json");
    let run = paraself(&[
        "bounds",
        "--bell",
        s(&file),
        "--witness",
        "--out",
        s(&witness),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert_eq!(stdout(&run), "classical: 0\nquantum: 0\n");
    let w: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&witness).unwrap()).unwrap();
    assert_eq!(w["classical"]["kind"], "deterministic");
    assert_eq!(w["quantum"]["kind"], "eigenvector");
}

#[test]
fn bounds_enumeration_too_large_is_exit_three() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "big.json");
    std::fs::write(&file, io::expression_to_json(&BellExpression::zero(5, 10))).unwrap();
    let run = paraself(&["bounds", "--bell", s(&file)]);
    assert_single_error_line(&run, 3, "classical bound");
}

#[test]
fn sweep_rows() {
    let run = paraself(&[
        "sweep",
        "--strategy",
        "chsh",
        "--copies",
        "2",
        "--nus",
        "1.0",
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let text = stdout(&run);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "nu,J1,J2");
    assert_eq!(lines.len(), 2);
    let fields: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
    assert!(fields[1..]
        .iter()
        .all(|j| (j - 2.828_427_125).abs() <= 1e-9));

    let run = paraself(&[
        "sweep",
        "--strategy",
        "chsh",
        "--copies",
        "2",
        "--nus",
        "0.5,0.0",
    ]);
    let text = stdout(&run);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[0][1], 0.0);
    assert_eq!(rows[1][0], 0.5);
    assert!((rows[1][1] - std::f64::consts::SQRT_2).abs() <= 1e-9);
}

#[test]
fn sweep_malformed_range_is_exit_two() {
    let run = paraself(&["sweep", "--strategy", "chsh", "--nus", "0:1"]);
    assert_single_error_line(&run, 2, "--nus");
    let run = paraself(&["sweep", "--strategy", "chsh", "--nus", "0:2:0.5"]);
    assert_single_error_line(&run, 2, "--nus");
}

#[test]
fn thread_cap_is_validated_and_output_independent() {
    let dir = TempDir::new().unwrap();
    let one = path(&dir, "one.json");
    let run = Command::new(env!("CARGO_BIN_EXE_paraself"))
        .env("PARASELF_THREADS", "1")
        .args([
            "simulate",
            "--strategy",
            "chsh",
            "--copies",
            "3",
            "--out",
            s(&one),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&run), 0);
    let many = simulate(&dir, "many.json", &["--strategy", "chsh", "--copies", "3"]);
    assert_eq!(std::fs::read(one).unwrap(), std::fs::read(many).unwrap());

    let run = Command::new(env!("CARGO_BIN_EXE_paraself"))
        .env("PARASELF_THREADS", "zero")
        .args(["bounds", "--bell", "chsh"])
        .output()
        .unwrap();
    assert_single_error_line(&run, 2, "PARASELF_THREADS");
}
