use std::path::Path;
use std::process::{Command, Output};

fn algocool(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algocool"))
        .args(args)
        .env("ALGOCOOL_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn compile_writes_program_and_listing() {
    let dir = tempfile::tempdir().unwrap();
    let o = algocool(&["compile", "--algorithm", "pac1", "--jf", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("time steps: 22"));
    let jsonl = std::fs::read_to_string(dir.path().join("pac1_jf3.jsonl")).unwrap();
    let p = algocool::Program::from_jsonl(&jsonl).unwrap();
    assert_eq!(
        (p.n_bits, p.cost.total_time_steps, p.cost.reset_steps),
        (14, 22, 9)
    );
    assert!(dir.path().join("pac1_jf3.txt").exists());
}

#[test]
fn run_writes_ledger_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = algocool(
        &["run", "--algorithm", "pac2", "--jf", "3", "--dump-state"],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("pac2_jf3_ledger.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "step,op,bias_0,bias_1,bias_2,bias_3,bias_4,bias_5,bias_6,H_total,resets,time,wall_time"
    );
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("pac2_jf3_summary.json")).unwrap(),
    )
    .unwrap();
    assert!(summary["summary"]["bypass_margin"].as_f64().unwrap() > 0.007);
    assert_eq!(summary["shannon"]["bypassed"], true);
    let state: algocool::StateSnapshot = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("pac2_jf3_state.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(state.probs.len(), 128);
}

#[test]
fn json_config_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"algorithm":"pac2","jf":2,"eps0":0.1}"#).unwrap();
    let from_file = algocool(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    let from_flags = algocool(
        &["run", "--algorithm", "pac2", "--jf", "2", "--eps0", "0.1"],
        dir.path(),
    );
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(stdout(&from_file), stdout(&from_flags));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        algocool(&["run", "--algorithm", "pac1"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        algocool(&["run", "--bogus"], dir.path()).status.code(),
        Some(2)
    );
    let big = algocool(&["run", "--algorithm", "pac1", "--jf", "8"], dir.path());
    assert_eq!(big.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&big.stderr).contains("tracker"));
    let tracked = algocool(
        &["run", "--algorithm", "pac1", "--jf", "8", "--tracker-only"],
        dir.path(),
    );
    assert_eq!(tracked.status.code(), Some(0));
    let slow = algocool(
        &[
            "run",
            "--algorithm",
            "pac2",
            "--jf",
            "2",
            "--mode",
            "finite",
            "--t1-comp",
            "1",
            "--t1-reset",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(slow.status.code(), Some(2));
}

#[test]
fn finite_mode_warns_on_small_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let o = algocool(
        &[
            "run",
            "--algorithm",
            "pac2",
            "--jf",
            "2",
            "--mode",
            "finite",
            "--t1-comp",
            "1",
            "--t1-reset",
            "0.1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("below 100"));
}

#[test]
fn tables_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = stdout(&algocool(&["tables"], dir.path()));
    let b = stdout(&algocool(&["tables"], dir.path()));
    assert_eq!(a, b);
    assert!(a.contains("×25: RPC 625, PAC1 34, PAC2 17"));
    let csv = stdout(&algocool(&["tables", "--format", "csv"], dir.path()));
    assert!(csv.contains("7.6,5,30,4040"));
}

#[test]
fn sweep_is_monotone_in_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let o = algocool(&["sweep", "--ratio", "10,100,1000,10000"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let bytes = std::fs::read(dir.path().join("pac2_jf2_sweep.csv")).unwrap();
    let mut rd = csv::Reader::from_reader(bytes.as_slice());
    let rel: Vec<f64> = rd
        .records()
        .map(|r| r.unwrap()[6].parse().unwrap())
        .collect();
    assert_eq!(rel.len(), 4);
    assert!(rel.windows(2).all(|w| w[0] < w[1]), "{rel:?}");
    assert!(rel[2].abs() < 0.01);
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = algocool(&["verify", "--trials", "50"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn single_point_sweep_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = algocool(&["sweep", "--ratio", "1000"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let bytes = std::fs::read(dir.path().join("pac2_jf2_sweep.csv")).unwrap();
    let mut rd = csv::Reader::from_reader(bytes.as_slice());
    let swept: f64 = rd.records().next().unwrap().unwrap()[4].parse().unwrap();

    let o = algocool(
        &[
            "run",
            "--algorithm",
            "pac2",
            "--jf",
            "2",
            "--mode",
            "finite",
            "--t1-comp",
            "1",
            "--t1-reset",
            "0.001",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("pac2_jf2_summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["summary"]["target_bias"].as_f64().unwrap(), swept);
}
