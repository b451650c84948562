use std::path::Path;
use std::process::{Command, Output};

use photon_arena::circuits::{run_pd, run_zs, Strategy};
use photon_arena::StateVector;
use serde_json::Value;
use tempfile::tempdir;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photon-arena"))
        .args(args)
        .env_remove("PHOTON_ARENA_SEED")
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn first_line(args: &[&str]) -> String {
    stdout(args).lines().next().unwrap().to_string()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn pd_expected_examples() {
    assert_eq!(first_line(&["pd-expected", "--x", "1", "--y", "1"]), "2 2");
    assert_eq!(first_line(&["pd-expected", "--x", "0", "--y", "0"]), "4 4");
    assert_eq!(first_line(&["pd-expected", "--x", "1", "--y", "0"]), "5 1");
    let text = stdout(&["pd-expected", "--x", "0.5", "--y", "0.5"]);
    assert_eq!(text, "3 3\nHH 0.25\nHV 0.25\nVH 0.25\nVV 0.25\n");
}

#[test]
fn zs_prob_examples() {
    assert_eq!(first_line(&["zs-prob", "--pa", "1", "--pc", "1"]), "1 0");
    assert_eq!(first_line(&["zs-prob", "--pa", "1", "--pc", "0"]), "0 1");
    assert_eq!(first_line(&["zs-prob", "--pa", "0.5", "--pc", "0.5"]), "0.5 0.5");
}

#[test]
fn pd_sample_pure_cooperation() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("report.json");
    stdout(&["pd-sample", "--x", "1", "--y", "1", "--trials", "100", "--seed", "7", "--out", path.to_str().unwrap()]);
    let v = json_file(&path);
    assert_eq!(v["mean_payoff"], serde_json::json!([2.0, 2.0]));
    assert_eq!(v["inconclusive"], 0);
    assert_eq!(v["seed"], 7);
}

#[test]
fn zs_sample_balanced_win_frequency() {
    let text = stdout(&["zs-sample", "--pa", "0.5", "--pc", "0.5", "--trials", "100000", "--seed", "7"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let fa = v["win_freq"]["A"].as_f64().unwrap();
    let kept = v["post_selected"].as_f64().unwrap();
    // trials counts attempts; only post-selected runs decide a winner
    let bound = 3.0 * (0.25 / kept).sqrt();
    assert!((fa - 0.5).abs() <= bound, "A wins {fa} over {kept} runs");
}

#[test]
fn detector_loss_makes_runs_inconclusive() {
    let text = stdout(&["zs-sample", "--pa", "0.5", "--pc", "0.5", "--trials", "2000", "--seed", "1", "--eta", "0.9"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert!(v["inconclusive"].as_u64().unwrap() > 0);
}

#[test]
fn sample_reports_are_byte_identical_per_seed() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        stdout(&[
            "pd-sample", "--x", "0.3", "--y", "0.8", "--trials", "5000", "--seed", "11", "--eta", "0.9", "--dark", "0.01",
            "--out", p.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seed_comes_from_environment_when_not_given() {
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_photon-arena"));
        cmd.args(["pd-sample", "--trials", "10"]).env_remove("PHOTON_ARENA_SEED");
        if let Some(s) = env {
            cmd.env("PHOTON_ARENA_SEED", s);
        }
        let out = cmd.output().unwrap();
        serde_json::from_slice::<Value>(&out.stdout).unwrap()["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None), 0);
    assert_eq!(run(Some("42")), 42);
}

#[test]
fn flags_override_config_file() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"x": 0, "y": 0, "seed": 5, "trials": 20}"#).unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(first_line(&["--config", c, "pd-expected"]), "4 4");
    assert_eq!(first_line(&["--config", c, "pd-expected", "--x", "1", "--y", "1"]), "2 2");
    let v: Value = serde_json::from_str(&stdout(&["--config", c, "pd-sample"])).unwrap();
    assert_eq!((v["seed"].as_u64(), v["trials"].as_u64()), (Some(5), Some(20)));
    let v: Value = serde_json::from_str(&stdout(&["--config", c, "pd-sample", "--seed", "9"])).unwrap();
    assert_eq!(v["seed"], 9);
}

#[test]
fn config_accepts_amplitude_strategies() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"amplitudes": {"alice": [[0, 1], [0, 0]], "bob": [[0, 0], [1, 0]]}}"#).unwrap();
    let v: Value = serde_json::from_str(&stdout(&["--config", cfg.to_str().unwrap(), "circuit-dump"])).unwrap();
    let state: StateVector = serde_json::from_value(v["post_selection"].clone()).unwrap();
    let expected = run_pd(
        &Strategy::new(photon_arena::Complex64::new(0.0, 1.0), 0.0.into()).unwrap(),
        &Strategy::v(),
    )
    .unwrap()
    .output
    .unwrap();
    assert_eq!(state, expected);
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(cli(&["--config", cfg.to_str().unwrap(), "pd-expected"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(cli(&["--config", missing.to_str().unwrap(), "pd-expected"]).status.code(), Some(3));
}

#[test]
fn usage_and_validation_errors_exit_2() {
    let out = cli(&["pd-sample", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(cli(&["scan", "--n", "1"]).status.code(), Some(2));
    assert_eq!(cli(&["pd-expected", "--x", "1.5"]).status.code(), Some(2));
    assert_eq!(cli(&["zs-sample", "--eta", "2"]).status.code(), Some(2));
    assert_eq!(cli(&["circuit-dump", "--game", "chess"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("no/such/dir/report.json");
    assert_eq!(cli(&["pd-sample", "--trials", "5", "--out", path.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn help_lists_every_flag() {
    let help = stdout(&["zs-sample", "--help"]);
    for flag in ["--pa", "--pc", "--ancilla-a", "--ancilla-b", "--trials", "--seed", "--eta", "--dark", "--non-resolving", "--channel-eta", "--out", "--config"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
    let help = stdout(&["scan", "--help"]);
    for flag in ["--n", "--strict", "--weak", "--out", "--svg", "--svg-cell"] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn scan_writes_reports() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("scan");
    let svg = dir.path().join("vv.svg");
    stdout(&["scan", "--n", "100", "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    let csv = std::fs::read_to_string(out.join("scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 100 * 100);
    let regions = json_file(&out.join("regions.json"));
    assert_eq!(regions["n"], 100);
    assert_eq!(regions["regions"][0]["predicate"], "VV nash+pareto");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn scan_n20_matches_fixture() {
    let dir = tempdir().unwrap();
    stdout(&["scan", "--n", "20", "--strict", "--out", dir.path().to_str().unwrap()]);
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/scan_n20.csv");
    assert_eq!(std::fs::read(dir.path().join("scan.csv")).unwrap(), std::fs::read(fixture).unwrap());
}

#[test]
fn scan_n1000_reproduces_defection_square() {
    let v: Value = serde_json::from_str(&stdout(&["scan", "--n", "1000"])).unwrap();
    let vv = &v["regions"][0];
    assert_eq!(vv["intervals"][0][1].as_f64().unwrap(), 443.0 / 999.0);
    assert_eq!(vv["agreement"][0], true);
    assert!(v["regions"][1]["agreement"].is_array());
}

#[test]
fn circuit_dump_round_trips() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("pd.json");
    stdout(&["circuit-dump", "--game", "pd", "--x", "0.5", "--y", "0.5", "--out", path.to_str().unwrap()]);
    let v = json_file(&path);
    let state: StateVector = serde_json::from_value(v["pre_selection"].clone()).unwrap();
    let b = Strategy::balanced();
    assert_eq!(state, run_pd(&b, &b).unwrap().pre_selection);
    assert_eq!(state.len(), 4);
    for (_, z) in state.terms() {
        assert!((z.re - 0.5).abs() <= 1e-12 && z.im == 0.0);
    }
}

#[test]
fn circuit_dump_zero_sum_metadata() {
    let all_h = ["circuit-dump", "--game", "zs", "--pa", "1", "--pc", "1", "--ancilla-a", "1", "--ancilla-b", "1"];
    let v: Value = serde_json::from_str(&stdout(&all_h)).unwrap();
    assert_eq!(v["success_probability"], 1.0);
    assert_eq!(v["post_selection"]["terms"].as_array().unwrap().len(), 1);

    let v: Value = serde_json::from_str(&stdout(&["circuit-dump", "--game", "zs"])).unwrap();
    assert!((v["success_probability"].as_f64().unwrap() - 0.25).abs() <= 1e-12);
    let post: StateVector = serde_json::from_value(v["post_selection"].clone()).unwrap();
    let b = Strategy::balanced();
    assert_eq!(post, run_zs(&b, &b, &b, &b).unwrap().output.unwrap());
}

#[test]
fn circuit_dump_is_deterministic() {
    let args = ["circuit-dump", "--game", "zs", "--pa", "0.3", "--pc", "0.9"];
    assert_eq!(stdout(&args), stdout(&args));
}
