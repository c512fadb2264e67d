use std::path::Path;
use std::process::{Command, Output};

fn autov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let o = autov(&[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn unknown_subcommand_and_flag_are_usage_errors() {
    assert_eq!(autov(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(autov(&["run", "--bogus"]).status.code(), Some(1));
    assert_eq!(autov(&["show-operator"]).status.code(), Some(1));
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(autov(&["--help"]).status.code(), Some(0));
    let o = autov(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(autov_core::VERSION));
}

#[test]
fn check_de_passes_everything() {
    let o = autov(&[
        "check",
        "--operator",
        "de",
        "--dim",
        "10",
        "--trials",
        "50",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let json: serde_json::Value = serde_json::from_str(&out[out.find('{').unwrap()..]).unwrap();
    for key in ["translation", "scale", "rotation"] {
        assert_eq!(json[key], "pass");
    }
    for key in ["operator", "residuals", "trials", "tolerance", "seed"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    let err = stderr(&o);
    assert!(err.contains("master seed 1") && err.contains(autov_core::VERSION));
}

#[test]
fn check_sbx_fails_rotation_only() {
    let o = autov(&[
        "check",
        "--operator",
        "sbx",
        "--dim",
        "5",
        "--trials",
        "20",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["translation"], "pass");
    assert_eq!(json["scale"], "pass");
    assert_eq!(json["rotation"], "fail");
}

#[test]
fn show_published_has_ten_branches() {
    let o = autov(&["show-operator", "--published"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.contains(" if ")).count(), 10);
    assert!(out.contains("if p < 0.219"));
    assert!(out.contains("if p >= 0.999"));
}

#[test]
fn show_json_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = autov(&["show-operator", "--published", "--json"]);
    let path = dir.path().join("m.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let again = autov(&[
        "show-operator",
        "--matrix",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(o.stdout, again.stdout);
    let missing = autov(&["show-operator", "--matrix", "/nonexistent/m.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn run_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let o = autov(&[
        "run",
        "--algorithm",
        "de",
        "--problem",
        "Sphere:3",
        "--population",
        "10",
        "--budget",
        "110",
        "--seed",
        "4",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("generation,best,algorithm,problem,seed")
    );
    assert_eq!(text.lines().count(), 1 + 11);
}

#[test]
fn run_rejects_bad_inputs_at_runtime() {
    let small = autov(&[
        "run",
        "--algorithm",
        "de",
        "--problem",
        "Sphere:3",
        "--population",
        "10",
        "--budget",
        "5",
    ]);
    assert_eq!(small.status.code(), Some(2));
    let unknown = autov(&["run", "--algorithm", "shade", "--problem", "Sphere:3"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(stderr(&unknown).contains("shade"));
    let bad_problem = autov(&["run", "--algorithm", "de", "--problem", "Nope:3"]);
    assert_eq!(bad_problem.status.code(), Some(2));
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("exp.cfg");
    std::fs::write(
        &path,
        "[experiment]\nalgorithms = sbx, de\npopulation = 10\nbudget = 200\nruns = 4\nseed = 5\noutput = out\n\n\
         [problem]\nname = Sphere\ndim = 3\n\n[problem]\nname = Rastrigin\ndim = 3\nrotate_seed = 2\n",
    )
    .unwrap();
    path
}

#[test]
fn compare_from_config_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let o = autov(&[
            "--config",
            cfg.to_str().unwrap(),
            "--threads",
            threads,
            "compare",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("+/-/≈"));
        let out = dir.path().join("out");
        let files: Vec<Vec<u8>> = ["trajectories.csv", "comparison.csv", "comparison.json"]
            .iter()
            .map(|f| std::fs::read(out.join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn compare_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let o = autov(&[
        "--config",
        cfg.to_str().unwrap(),
        "compare",
        "--algorithms",
        "cmaes,pso",
        "--problem",
        "Ackley:2",
        "--runs",
        "3",
        "--output",
        dir.path().join("other").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("cmaes (ref)") && out.contains("Ackley"));
    assert!(!out.contains("Rastrigin"));
    let one = autov(&["compare", "--algorithms", "de", "--problem", "Sphere:2"]);
    assert_eq!(one.status.code(), Some(2));
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "[experiment]\nruns = 2\nwhat = 1\n").unwrap();
    let o = autov(&["--config", path.to_str().unwrap(), "compare"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"));
}

#[test]
fn tiny_search_writes_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("best.json");
    let o = autov(&[
        "search",
        "--seed",
        "2",
        "--kind",
        "h1",
        "--k",
        "2",
        "--meta-population",
        "4",
        "--meta-generations",
        "2",
        "--population",
        "6",
        "--generations",
        "3",
        "--max-run",
        "1",
        "--problem",
        "Sphere:2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = autov_core::autov::OperatorMatrix::from_json(&std::fs::read_to_string(&path).unwrap())
        .unwrap();
    assert_eq!(m.k(), 2);
    assert!(stdout(&o).contains("final best"));
}
