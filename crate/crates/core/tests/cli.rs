use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cantorlab"))
}

#[test]
fn unknown_system_is_rejected_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        r#"
[[system]]
kind = "middle_alpha"
name = "C"
alpha = 0.3333333333333333

[dim]
systems = ["Nope"]
depths = [2]
"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["dim", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Nope"), "{err}");
    assert!(!out_dir.exists() || std::fs::read_dir(&out_dir).unwrap().next().is_none());
}

#[test]
fn dim_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        r#"
[[system]]
kind = "two_ratio"
name = "T"
r1 = 0.5
r2 = 0.25

[dim]
systems = ["T"]
depths = [2, 4]
"#,
    )
    .unwrap();
    let out = bin()
        .args(["dim", "--timings", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("dim.csv")).unwrap();
    assert!(csv.starts_with("# "));
    assert!(csv.contains("wall_ms"));
    assert!(csv.lines().last().unwrap().starts_with("T,4,0.694241913631"));
}

#[test]
fn extract_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        r#"
[[system]]
kind = "middle_alpha"
name = "C"
alpha = 0.3333333333333333
"#,
    )
    .unwrap();
    let out = bin()
        .args(["extract", "--system", "C", "--a", "0.3", "--b", "0.45", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sys = std::fs::read_to_string(dir.path().join("extract_system.toml")).unwrap();
    assert!(cantorlab::config::ExperimentConfig::parse(&sys).is_ok());
}
