use std::path::Path;
use std::process::{Command, Output};

use talagrand_kit::run::RunReport;

fn talagrand(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_talagrand"));
    cmd.args(args).env_remove("TALAGRAND_OUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("TALAGRAND_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn read_report(path: &Path) -> RunReport {
    RunReport::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn lemma_sweep_passes_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lemma.json");
    let o = talagrand(
        &["verify-lemma", "--L", "1.12", "--m", "8", "--trials", "2000", "--seed", "42", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_report(&out);
    assert!(r.pass);
    assert_eq!(r.summary["systems"], 2000.0);
}

#[test]
fn counterexample_search_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ce.json");
    let o = talagrand(
        &["search-counterexample", "--L", "1.07", "--m", "2", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    let r = read_report(&out);
    let first = r.items.iter().find(|i| i.label == "first_violation").unwrap();
    assert!(!first.pass);
    assert!(first.values["relative_violation"] > 0.0);
    assert!(first.notes["p"].contains(','));
}

#[test]
fn theorem1_sweep_on_two_atoms() {
    let o = talagrand(&["verify-theorem1", "--atoms", "0.5,0.5", "--n", "2", "--L", "1.12"], None);
    assert_eq!(o.status.code(), Some(0));
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.summary["subsets"], 15.0);
}

#[test]
fn invalid_input_exits_two_and_names_field() {
    for (args, field) in [
        (vec!["verify-lemma", "--L", "-1"], "L"),
        (vec!["verify-theorem1", "--atoms", "0.7,0.7"], "atoms"),
        (vec!["simulate-empirical", "--trials", "10"], "trials"),
        (vec!["phi-scan", "--grid", "100"], "grid"),
        (vec!["search-counterexample", "--m", "1"], "m"),
    ] {
        let o = talagrand(&args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(&format!("`{field}`")), "{args:?}: {err}");
    }
    assert_eq!(talagrand(&["bogus-command"], None).status.code(), Some(2));
    assert_eq!(talagrand(&["verify-lemma", "--L", "abc"], None).status.code(), Some(2));
    assert_eq!(talagrand(&[], None).status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"command": "verify-lemma", "params": {"L": 0.3, "trials": 500, "seed": 9}}"#,
    )
    .unwrap();
    // L = 0.3 from the file fails the inequality.
    let o = talagrand(&["--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    let o = talagrand(&["--config", cfg.to_str().unwrap(), "--L", "1.12"], None);
    assert_eq!(o.status.code(), Some(0));
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.config.params.l, Some(1.12));
    assert_eq!(r.config.params.seed, Some(9));
    assert_eq!(r.config.params.trials, Some(500));
}

#[test]
fn report_config_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    let o = talagrand(
        &["simulate-empirical", "--atoms", "0.1,0.9", "--n", "10", "--trials", "10000", "--seed", "5", "--out", first.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let second = dir.path().join("b.json");
    let o = talagrand(
        &["--config", first.to_str().unwrap(), "--out", second.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let (mut a, mut b) = (read_report(&first), read_report(&second));
    a.config.params.out = None;
    b.config.params.out = None;
    assert_eq!(a.without_timing(), b.without_timing());
}

#[test]
fn csv_output_and_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = talagrand(
        &["phi-scan", "--l-grid", "1.05,1.12", "--grid", "1000", "--format", "csv"],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("phi-scan.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "label,L,phi_max,p_star,t_star,pass");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("L=1.05,1.05,1.00"));
    assert!(lines[2].ends_with("true"));
}

#[test]
fn unwritable_output_exits_two() {
    let o = talagrand(&["critical-l", "--grid", "20", "--out", "/nonexistent-dir/x.json"], None);
    assert_eq!(o.status.code(), Some(2));
}
