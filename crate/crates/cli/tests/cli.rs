use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fcs-entropy"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_owned()).collect()
}

#[test]
fn every_committed_config_runs() {
    for cmd in ["noise", "spectral", "schedule", "entropy"] {
        let cfg = configs().join(format!("{cmd}.json"));
        let out = run(&[cmd, "--config", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.lines().count() >= 2, "{cmd}: header plus rows");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("spectral.json");
    let mut files = vec![];
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.csv"));
        let st = run(&["spectral", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(st.status.success());
        files.push((
            std::fs::read(&out).unwrap(),
            std::fs::read(dir.path().join(format!("run{k}_density.csv"))).unwrap(),
        ));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn spectral_rows_cover_unit_and_gap_cases() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", r#"{"g": 1.0, "transmission": [0.5, 0.75, 1.0], "samples": 0}"#);
    let out = run(&["spectral", "--config", &cfg]);
    let text = String::from_utf8(out.stdout).unwrap();
    let f: Vec<f64> = column(&text, "F").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(f[2], 1.0);
    assert!(f[0] < f[1] && f[1] < f[2]);
    assert_eq!(column(&text, "z_minus")[1].parse::<f64>().unwrap(), 0.25);
    assert_eq!(column(&text, "z_plus")[2].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn noise_boundary_width_gives_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    let (nu, tau) = (500e6f64, 20e-12f64);
    let w0 = (std::f64::consts::PI * nu * tau).asin() / (std::f64::consts::PI * nu);
    let cfg = write(
        dir.path(),
        "n.json",
        &format!(r#"{{"frequency": {nu:e}, "tau": {tau:e}, "pulse_width": [{w0:e}, 1e-9]}}"#),
    );
    let out = run(&["noise", "--config", &cfg, "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["rows"][0]["S2"].as_f64().unwrap().abs() < 1e-40);
    let s2 = doc["rows"][1]["S2"].as_f64().unwrap();
    assert!((s2 - 4.50e-30).abs() / 4.50e-30 < 0.01);
}

#[test]
fn schedule_reads_interval_document() {
    let cfg = configs().join("schedule.json");
    let out = run(&["schedule", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["rows"][0]["intervals"], 3);
    assert!(doc["rows"][0]["G"].as_f64().unwrap() > 0.0);
}

#[test]
fn never_connected_lattice_has_zero_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "l.json",
        r#"{"sites_per_lead": 40, "bond": 1.0, "protocol": {"intervals": []}, "times": [1, 5, 10]}"#,
    );
    let out = run(&["lattice", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for s in column(&text, "S") {
        assert!(s.parse::<f64>().unwrap().abs() < 1e-10);
    }
}

#[test]
fn weak_bond_eigenvalue_dump_shows_gap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "l.json",
        r#"{"sites_per_lead": 200, "bond": 0.5, "protocol": {"intervals": [[0, 90]]}, "times": [90], "dump_eigenvalues": true}"#,
    );
    let out_path = dir.path().join("lat.csv");
    let out = run(&["lattice", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let dump = std::fs::read_to_string(dir.path().join("lat_eigenvalues.csv")).unwrap();
    let zs: Vec<f64> = column(&dump, "z").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(zs.len(), 200);
    assert!(zs.iter().all(|&z| !(z > 0.25 && z < 0.75)));
}

#[test]
fn lattice_beyond_horizon_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "l.json",
        r#"{"sites_per_lead": 20, "bond": 1.0, "protocol": {"intervals": [[0, 5]]}, "times": [4, 12]}"#,
    );
    let out = run(&["lattice", "--config", &cfg]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));
    assert_eq!(column(&String::from_utf8(out.stdout).unwrap(), "beyond_horizon"), ["false", "true"]);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // Missing config.
    assert_eq!(run(&["lattice"]).status.code(), Some(2));
    // Field-level validation message.
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"sites_per_lead": 41, "bond": 1.0, "protocol": {"intervals": []}, "times": [1]}"#,
    );
    let out = run(&["lattice", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sites_per_lead"));
    // Decreasing grid.
    let cfg = write(dir.path(), "g.json", r#"{"g": 1.0, "transmission": [0.5, 0.4]}"#);
    assert_eq!(run(&["spectral", "--config", &cfg]).status.code(), Some(2));
    // Unwritable output.
    let out = run(&["noise", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown flag value.
    assert_eq!(run(&["noise", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn quick_verification_passes_and_prints_discrepancies() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&["verify", "--level", "quick", "--format", "json", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("pi^4/15") && text.contains("pi^4/45"));
    assert!(text.contains("25 mK") && text.contains("24.0 mK"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(doc["all_passed"], true);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 5);
}
