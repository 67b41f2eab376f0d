//! End-to-end checks of the `tgrid` binary: output shapes, exit codes and
//! determinism across worker counts.

use std::io::Write;
use std::process::{Command, Output};

fn tgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tgrid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn count_prints_f_and_t() {
    let out = tgrid(&["count", "--m", "2", "--n", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "f=12 t=14");
}

#[test]
fn count_oracle_prints_t() {
    let out = tgrid(&["count", "--m", "3", "--n", "3", "--method", "oracle"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "t=58");
}

#[test]
fn count_q_prints_f_q() {
    let out = tgrid(&["count", "--m", "2", "--n", "2", "--q", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "f_2=0");
    let out = tgrid(&["count", "--m", "3", "--n", "3", "--q", "2", "--method", "naive"]);
    assert_eq!(stdout(&out).trim(), "f_2=16");
}

#[test]
fn count_json_format() {
    let out = tgrid(&["count", "--m", "2", "--n", "3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["f"], "26");
    assert_eq!(v["t"], "28");
}

#[test]
fn count_rejects_bad_flags_with_exit_2() {
    let out = tgrid(&["count", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tgrid(&["count", "--m", "1", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tgrid(&["count", "--m", "3", "--n", "3", "--method", "oracle", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn count_oracle_cap_gives_exit_3() {
    let out = tgrid(&["count", "--m", "5", "--n", "5", "--method", "oracle"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_small_budget_passes() {
    let out = tgrid(&["verify", "--max-cells", "12"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("2x2"));
    assert!(text.contains("3x4"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_cap_exceeded_gives_exit_2() {
    let out = tgrid(&["verify", "--max-cells", "30"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cap exceeded"));
    // 21..=24 requires the explicit opt-in
    let out = tgrid(&["verify", "--max-cells", "21"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn error_study_emits_schema_csv() {
    let out = tgrid(&["error-study", "--shape", "square", "--max-n", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "m,n,t_exact,main_term,residual,norm_mn2,norm_n3,norm_conj"
    );
    assert_eq!(lines.count(), 9);
    assert!(stderr(&out).contains("max|norm_n3|"));
}

#[test]
fn error_study_fixed_m_requires_m() {
    let out = tgrid(&["error-study", "--shape", "fixed-m", "--max-n", "50"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn error_study_fixed_m_bounded_norm() {
    let out = tgrid(&["error-study", "--shape", "fixed-m", "--m", "2", "--max-n", "100"]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let norm_mn2: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!(norm_mn2.abs() <= 10.0, "line: {line}");
    }
}

#[test]
fn error_study_out_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = tgrid(&[
        "error-study",
        "--shape",
        "square",
        "--max-n",
        "30",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("slope="));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 30); // header + 29 records
}

#[test]
fn error_study_synthetic_power_law_slope() {
    let out = tgrid(&[
        "error-study",
        "--shape",
        "square",
        "--max-n",
        "50",
        "--synthetic-power",
        "1.5",
    ]);
    assert!(out.status.success());
    let summary = stderr(&out);
    assert!(summary.contains("slope=1.5000"), "summary: {summary}");
}

#[test]
fn error_study_deterministic_across_workers() {
    let a = tgrid(&["error-study", "--shape", "square", "--max-n", "60", "--workers", "1"]);
    let b = tgrid(&["error-study", "--shape", "square", "--max-n", "60", "--workers", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_threshold_and_not() {
    let dir = tempfile::tempdir().unwrap();

    let zeros = dir.path().join("zeros.txt");
    std::fs::File::create(&zeros)
        .and_then(|mut f| f.write_all(b"2 2\n00\n00"))
        .unwrap();
    let out = tgrid(&["check", zeros.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("THRESHOLD a="));

    let xor = dir.path().join("xor.txt");
    std::fs::File::create(&xor)
        .and_then(|mut f| f.write_all(b"2 2\n01\n10"))
        .unwrap();
    let out = tgrid(&["check", xor.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "NOT-THRESHOLD");

    let diag = dir.path().join("diag.txt");
    std::fs::File::create(&diag)
        .and_then(|mut f| f.write_all(b"3 3\n001\n011\n111"))
        .unwrap();
    let out = tgrid(&["check", diag.to_str().unwrap()]);
    assert!(stdout(&out).starts_with("THRESHOLD"));
}

#[test]
fn check_parse_error_gives_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::File::create(&bad)
        .and_then(|mut f| f.write_all(b"2 2\n0x\n00"))
        .unwrap();
    let out = tgrid(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = tgrid(&["check", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_json_has_exactly_five_keys() {
    let out = tgrid(&["bench", "--m", "2", "--n", "2", "--reps", "1"]);
    assert!(out.status.success());
    let reports: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 2);
    for r in &reports {
        let obj = r.as_object().unwrap();
        assert_eq!(obj.len(), 5);
        for key in ["method", "m", "n", "reps", "seconds"] {
            assert!(obj.contains_key(key), "missing {key}");
        }
    }
    assert_eq!(reports[0]["method"], "naive");
    assert_eq!(reports[1]["method"], "moebius");
}
