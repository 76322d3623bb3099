use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mpersuade"))
}

fn scenario(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

#[test]
fn trajectory_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["trajectory", "--config"])
        .arg(scenario("appendixA_trajectory.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("appendixA_trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("instance,delta,phi,psi"));
    assert!(header.ends_with("tolerance"));
    assert_eq!(lines.count(), 5);
    assert!(csv.ends_with('\n'));
    let summary = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("overall: PASS"));
    assert!(summary.contains("seed=42"));
}

#[test]
fn overrides_are_stamped_and_output_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = bin()
            .args([
                "gamma", "--seed", "7", "--trials", "5000", "--grid", "400", "--config",
            ])
            .arg(scenario("appendixA_gamma.toml"))
            .arg("--out")
            .arg(d.path())
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let read = |d: &tempfile::TempDir, f: &str| fs::read(d.path().join(f)).unwrap();
    assert_eq!(
        read(&a, "appendixA_gamma.csv"),
        read(&b, "appendixA_gamma.csv")
    );
    assert_eq!(
        read(&a, "appendixA_gamma.checks.csv"),
        read(&b, "appendixA_gamma.checks.csv")
    );
    let summary = String::from_utf8(read(&a, "summary.txt")).unwrap();
    assert!(
        summary.contains("seed=7 grid=400") && summary.contains("trials=5000"),
        "{summary}"
    );
}

#[test]
fn bad_config_and_wrong_verb_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        "schema_version = 1\nname = \"bad\"\nexperiment = \"trajectory\"\ninstance = \"appendixA\"\ndeltas = [1.0]\n",
    )
    .unwrap();
    let out = bin()
        .args(["trajectory", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5") && err.contains("deltas"), "{err}");

    let out = bin()
        .args(["solve", "--config"])
        .arg(scenario("sorin.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.toml");
    fs::write(
        &cfg,
        "schema_version = 1\nname = \"p\"\nexperiment = \"trajectory\"\ninstance = \"periodic\"\ngrid = 200\ndeltas = [0.5, 0.9]\nchecks = [\"rate\"]\n",
    )
    .unwrap();
    let out = bin()
        .args(["trajectory", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let checks = fs::read_to_string(dir.path().join("p.checks.csv")).unwrap();
    assert!(
        checks.contains("rate_ratio") && checks.contains("rejected"),
        "{checks}"
    );
}

#[test]
fn sorin_and_parallel_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["sorin", "--parallel", "--config"])
        .arg(scenario("sorin.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("sorin.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 300);
}
