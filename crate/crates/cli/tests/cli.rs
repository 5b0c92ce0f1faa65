use std::path::Path;
use std::process::{Command, Output};

fn greenprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greenprop"))
        .args(args)
        .env("GREENPROP_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn lattice_info_reports_geometry() {
    let o = greenprop(&["lattice-info", "--n", "32", "--box-length", "12.566370614359172"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 32);
    assert!((v["nyquist"].as_f64().unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn invalid_input_exits_with_two() {
    assert_eq!(greenprop(&["lattice-info", "--n", "31", "--box-length", "1"]).status.code(), Some(2));
    assert_eq!(greenprop(&["lattice-info", "--n", "32", "--box-length", "-1"]).status.code(), Some(2));
    assert_eq!(greenprop(&["lemma22", "--part", "HS", "--p", "4"]).status.code(), Some(2));
    assert_eq!(greenprop(&["lemma22", "--k", "3"]).status.code(), Some(2));
    assert_eq!(greenprop(&["oracle-compare", "--t", "1", "--xi", "1,2"]).status.code(), Some(2));
}

#[test]
fn oracle_compare_passes_near_double_root() {
    let o = greenprop(&["oracle-compare", "--t", "0.7", "--xi", "0.6,0.8,0.00001"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_entry_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn symbol_check_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = greenprop(&["symbol-check", "--samples", "100", "--confluent", "10", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("manifest.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["command"], "symbol-check");
    assert_eq!(lines[0]["seeds"][0], 7);
    assert_eq!(lines[1]["pass"], true);

    // a second run must not clobber the first
    let again = greenprop(&["symbol-check", "--samples", "10", "--output", out.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(2));
}

#[test]
fn lemma22_low_part_l2_gradient() {
    let dir = tempfile::tempdir().unwrap();
    let o = greenprop(&[
        "lemma22",
        "--part",
        "L",
        "--p",
        "2",
        "--k",
        "1",
        "--samples",
        "40",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let norms = std::fs::read_to_string(dir.path().join("norms.csv")).unwrap();
    assert!(norms.starts_with("label,t,value,pipeline,truncation_quality"));
    assert_eq!(norms.lines().count(), 41);
}

#[test]
fn lemma22_singular_part_rate() {
    let o = greenprop(&["lemma22", "--part", "HS", "--p", "2", "--fields", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.ends_with(",true")).count(), 4);
}

const SMALL_RUN: &str = r#"
[params]
mu = 1.0
lambda_bulk = 0.0
alpha = 1.0
gamma = 1.4

[grid]
n = 16
box_length = 37.69911184307752

[time]
dt = 0.2
t_end = 10.0
cadence = 2

[init]
kind = "gaussian_bump"
amplitude = 0.001
width_or_wavenumber = 3.0

[output]
formats = ["norms", "decay_report", "final_state"]
"#;

fn write_config(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, SMALL_RUN).unwrap();
    p
}

#[test]
fn simulate_then_decay_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = dir.path().join("out");
    let o = greenprop(&["simulate", "--quiet", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("termination: Completed"));
    for f in ["manifest.jsonl", "norms.csv", "final_state.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let header: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(out.join("manifest.jsonl")).unwrap().lines().next().unwrap())
            .unwrap();
    assert_eq!(header["command"], "simulate");

    let report = dir.path().join("again.csv");
    let r = greenprop(&["decay-report", "--input", out.to_str().unwrap(), "--output", report.to_str().unwrap()]);
    assert!(matches!(r.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&r.stderr));
    let rebuilt = std::fs::read_to_string(report).unwrap();
    assert!(rebuilt.starts_with("quantity,p,k,"));
    assert_eq!(rebuilt, std::fs::read_to_string(out.join("decay_report.csv")).unwrap());
}

#[test]
fn decay_report_without_manifest_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = greenprop(&["decay-report", "--input", dir.path().to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("manifest"));
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, SMALL_RUN.replace("cadence = 2", "cadence = 2\nbogus = 1")).unwrap();
    let o = greenprop(&["simulate", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
