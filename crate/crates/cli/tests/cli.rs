use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn tumordde(args: &[&str], env_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tumordde"));
    cmd.args(args).env_remove("TUMORDDE_OUT_DIR");
    if let Some(d) = env_dir {
        cmd.env("TUMORDDE_OUT_DIR", d);
    }
    cmd.output().unwrap()
}

fn config(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_owned()
}

#[test]
fn equilibria_json_on_stdout() {
    let out = tumordde(&["equilibria", "--config", &config("chemo.json")], None);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let list = v["equilibria"].as_array().unwrap();
    assert_eq!(list[0]["kind"], "tumor_free");
    assert!(list.iter().any(|e| e["kind"] == "interior"));
}

#[test]
fn tau_critical_reports_hopf_delay() {
    let out = tumordde(&["tau-critical", "--config", &config("hopf.json")], None);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eq = &v["equilibria"][0];
    assert_eq!(eq["outcome"], "hopf");
    let tau_c = eq["tau_c"].as_f64().unwrap();
    assert!(tau_c > 0.9 && tau_c < 1.1, "{v}");
}

#[test]
fn simulate_honors_env_dir_and_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = tumordde(
        &[
            "simulate",
            "--config",
            &config("chemo.json"),
            "--t-end",
            "20",
        ],
        Some(dir.path()),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,T,E"));
    let side: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("trajectory.json")).unwrap())
            .unwrap();
    assert!(side["diagnostics"].is_array());
    assert_eq!(side["positivity"]["violations"], 0);

    // The flag wins over the environment.
    let flag_dir = tempfile::tempdir().unwrap();
    let out = tumordde(
        &[
            "simulate",
            "--config",
            &config("chemo.json"),
            "--t-end",
            "5",
            "--out-dir",
            flag_dir.path().to_str().unwrap(),
        ],
        Some(dir.path()),
    );
    assert!(out.status.success());
    assert!(flag_dir.path().join("trajectory.csv").exists());
}

#[test]
fn continuation_beyond_smallness_is_a_domain_error() {
    let out = tumordde(
        &[
            "continue-periodic",
            "--config",
            &config("chemo.json"),
            "--eps",
            "0.5",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = tumordde(&["equilibria", "--config", "/nonexistent/run.json"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = tumordde(&["frobnicate"], None);
    assert_eq!(out.status.code(), Some(2));
}
