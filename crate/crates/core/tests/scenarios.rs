use std::fs;
use std::path::Path;

use markov_persuasion::scenario::{builtin_scenarios, parse_config, run_scenario, write_summary};

#[test]
fn scenario_files_match_builtins() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    for (name, text) in builtin_scenarios() {
        let on_disk = fs::read_to_string(dir.join(format!("{name}.toml"))).unwrap();
        assert_eq!(on_disk, text, "{name}");
    }
}

#[test]
fn appendix_trajectory_report() {
    let (_, text) = builtin_scenarios()
        .into_iter()
        .find(|(n, _)| *n == "appendixA_trajectory")
        .unwrap();
    let r = run_scenario(&parse_config(text).unwrap(), None).unwrap();
    for name in [
        "phi_non_increasing",
        "psi_non_decreasing",
        "phi_constant",
        "psi_at_zero",
        "psi_strictly_increasing",
    ] {
        let row = r
            .rows
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("{name} missing"));
        assert!(row.pass, "{row:?}");
    }
    assert!(r.pass());
}

#[test]
fn claim1_row_carries_mean_and_target() {
    let cfg = parse_config(
        "schema_version = 1\nname = \"c\"\nexperiment = \"gamma\"\ninstance = \"appendixA\"\nx = 0.5\ntrials = 20000\n",
    )
    .unwrap();
    let r = run_scenario(&cfg, None).unwrap();
    let row = &r.rows[0];
    assert_eq!(row.name, "claim1_x0.5");
    assert!(row.pass && row.tolerance > 0.0);
    assert!(row.note.contains("mean") && row.note.contains("target"));
    let mut lines = r.csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "label,x,y,N,trials,mean,stderr,bound,target_value,pass,seed"
    );
    assert!(lines.next().unwrap().starts_with("claim1,0.5,"));
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let a = tempfile_dir("a");
    let b = tempfile_dir("b");
    let cfg = parse_config(
        "schema_version = 1\nname = \"e\"\nexperiment = \"gamma\"\ninstance = \"appendixA\"\nx = 0.5\nhorizon = 500\ntrials = 64\ngrid = 400\nchecks = [\"prop1\", \"gaps\"]\n",
    )
    .unwrap();
    for d in [&a, &b] {
        let r = run_scenario(&cfg, Some(d)).unwrap();
        write_summary(d, &[r]).unwrap();
    }
    for f in ["e.csv", "e.checks.csv", "summary.txt"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let _ = fs::remove_dir_all(a.parent().unwrap());
}

fn tempfile_dir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir()
        .join(format!("mp-scenarios-{}", std::process::id()))
        .join(tag);
    fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn mcgame_scenario_rejects_non_invariant_prior_monotonicity() {
    let cfg = parse_config(
        "schema_version = 1\nname = \"g\"\nexperiment = \"mcgame\"\nmatrix = [[0.9, 0.1], [0.2, 0.8]]\ngames = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]\nprior = [0.5, 0.5]\ngrid = 20\nstrategy_res = 10\ndeltas = [0.0, 0.5]\nchecks = [\"monotone\"]\n",
    )
    .unwrap();
    let r = run_scenario(&cfg, None).unwrap();
    let row = r
        .rows
        .iter()
        .find(|c| c.name == "value_non_increasing")
        .unwrap();
    assert!(!row.pass && row.note.contains("not invariant"));
}
