use std::fs;
use std::path::{Path, PathBuf};

use logsens::cli::{main_with_args, REPORT_FILE, TRACE_FILE, TRACE_HEADER};
use serde_json::Value;

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("logsens").chain(args.iter().copied()))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn run_writes_trace_and_report() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config_dir().join("spring_mass.json");
    let code = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--out-dir",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let csv = fs::read_to_string(out.path().join(TRACE_FILE)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(TRACE_HEADER));
    assert_eq!(csv.lines().count(), 5002);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    let lower = csv.to_ascii_lowercase();
    assert!(!lower.contains("nan") && !lower.contains("inf"));

    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.path().join(REPORT_FILE)).unwrap()).unwrap();
    let keys: Vec<&str> = report
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(
        keys,
        [
            "classification",
            "deviations",
            "empirical",
            "oracle_check",
            "provenance"
        ]
    );
    assert_eq!(report["classification"]["kind"], "LinearReal");
    let slope = report["empirical"]["fitted_slope"].as_f64().unwrap();
    assert!((slope - 4.0 / 3.0).abs() < 1e-3);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cfg = config_dir().join("rlc_real.json");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(
            run(&[
                "run",
                cfg.to_str().unwrap(),
                "--out-dir",
                d.path().to_str().unwrap()
            ]),
            0
        );
    }
    for f in [TRACE_FILE, REPORT_FILE] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn spin_chain_spikes_at_transfer_times() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config_dir().join("spin_chain_n2.json");
    assert_eq!(
        run(&[
            "run",
            cfg.to_str().unwrap(),
            "--out-dir",
            out.path().to_str().unwrap()
        ]),
        0
    );

    let csv = fs::read_to_string(out.path().join(TRACE_FILE)).unwrap();
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        if fields[6] == "1" {
            assert!(fields[4].is_empty() && fields[5].is_empty(), "{line}");
        } else {
            assert_eq!(fields[6], "0");
            fields[4].parse::<f64>().unwrap();
        }
    }

    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.path().join(REPORT_FILE)).unwrap()).unwrap();
    let spikes: Vec<f64> = report["empirical"]["detected_spikes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(spikes.len(), 3, "{spikes:?}");
    for (got, want) in spikes.iter().zip([5.0, 15.0, 25.0]) {
        assert!((got - want).abs() <= 1e-3, "{got} vs {want}");
    }
    assert_eq!(report["classification"]["kind"], "PeriodicComplex");
}

#[test]
fn grid_and_method_flags_override_config() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config_dir().join("spring_mass.json");
    let code = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--out-dir",
        out.path().to_str().unwrap(),
        "--grid",
        "0:2:0.5",
        "--method",
        "blockaug",
    ]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(out.path().join(TRACE_FILE)).unwrap();
    assert_eq!(csv.lines().count(), 6);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(out.path().join(REPORT_FILE)).unwrap()).unwrap();
    assert_eq!(report["provenance"]["config"]["method"], "blockaug");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let cases = [
        r#"{"schema_version": 1, "kind": "rlc", "parameters": {"poles": [-1, -2]}}"#,
        r#"{"schema_version": 2, "kind": "rlc"}"#,
        r#"{"schema_version": 1, "kind": "pendulum"}"#,
        r#"{"schema_version": 1, "kind": "rlc", "grid": {"start": 0, "end": 1, "step": 0}}"#,
        r#"{"schema_version": 1, "kind": "spring_mass", "parameters": {"poles": [[-1, 1], -2]}}"#,
        r#"{"schema_version": 1, "kind": "spring_mass", "parameters": {"poles": [1, -2]}}"#,
        r#"{"schema_version": 1, "kind": "rlc""#,
    ];
    for (i, body) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.json"), body);
        assert_eq!(run(&["run", &cfg, "--out-dir", out]), 2, "{body}");
    }
    assert!(!Path::new(out).exists());
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["run", missing.to_str().unwrap()]), 2);
    let good = config_dir().join("spring_mass.json");
    assert_eq!(run(&["run", good.to_str().unwrap(), "--grid", "0:1"]), 2);
    assert_eq!(
        run(&["run", good.to_str().unwrap(), "--method", "euler"]),
        2
    );
    assert_eq!(run(&["frobnicate"]), 2);
    assert_eq!(run(&["table1", "--chain", "n4"]), 2);
}

#[test]
fn numerical_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // companion matrix of (s + 1)², not marked as a Jordan block
    let cfg = write_config(
        dir.path(),
        "defective.json",
        r#"{"schema_version": 1, "kind": "custom", "parameters": {
            "a1": [[0, 1], [-1, -2]], "s": [[0, 0], [1, 0]], "c": [1, 0], "xi0": 0, "v": [1, 0]},
            "grid": {"start": 0, "end": 5, "step": 0.5}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(run(&["run", &cfg, "--out-dir", out.to_str().unwrap()]), 1);
}

#[test]
fn table1_writes_csv() {
    let out = tempfile::tempdir().unwrap();
    let code = run(&[
        "table1",
        "--chain",
        "n3",
        "--out-dir",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(out.path().join("table1_n3.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "fidelity,abs_logsens");
    assert_eq!(rows.len(), 6);
    let last: Vec<f64> = rows[5].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 0.90008);
    assert!((last[1] - 5.6196).abs() / 5.6196 < 5e-3);
}

#[test]
fn check_and_validate_succeed() {
    let cfg = config_dir().join("jordan_custom.json");
    assert_eq!(run(&["check", cfg.to_str().unwrap(), "--samples", "4"]), 0);
    for entry in fs::read_dir(config_dir()).unwrap() {
        let p = entry.unwrap().path();
        assert_eq!(
            run(&["validate", p.to_str().unwrap()]),
            0,
            "{}",
            p.display()
        );
    }
}

#[test]
fn binary_honours_out_dir_env_and_exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config_dir().join("spring_mass.json");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_logsens"))
        .args(["run", cfg.to_str().unwrap(), "--grid", "0:5:0.1"])
        .env("LOGSENS_OUT_DIR", out.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(out.path().join(TRACE_FILE).exists());
    assert!(out.path().join(REPORT_FILE).exists());

    let bad = std::process::Command::new(env!("CARGO_BIN_EXE_logsens"))
        .args(["run", "/definitely/not/here.json"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("cannot read"));
}
