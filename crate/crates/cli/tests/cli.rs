use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layoutcn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_temp(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    std::io::Write::write_all(&mut f, text.as_bytes()).unwrap();
    f
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn derive_prints_skewed_layouts() {
    let skewed = fixture("skewed_pair.json");
    let o = run(&["derive", path(&skewed)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(
        rows,
        vec![
            vec!["n1", "i2", "Q1", "[(1,-1)]"],
            vec!["n1", "i2", "Q2", "[(0,1)]"],
            vec!["n1", "i1", "Q1", "[(0,1)]"],
            vec!["n1", "i1", "Q2", "[(1,-1)]"],
        ]
    );

    let o = run(&["derive", path(&skewed), "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["innermost"], "i2");
    assert_eq!(v[0]["layouts"][0]["layout"], serde_json::json!([[1, -1]]));
}

#[test]
fn malformed_input_exits_2() {
    let bad = write_temp(r#"{"arrays": ["#);
    let o = run(&["derive", path(bad.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let o = run(&["derive", "/nonexistent/program.json"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["compare", path(&fixture("skewed_pair.json")), "--cache", "8000,2,32"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn one_dimensional_arrays_show_trivial_layout() {
    let p = write_temp(
        r#"{"arrays": [{"name": "V", "dims": 1, "extents": [16]}],
            "nests": [{"name": "n", "loops": [{"index": "i", "lower": 0, "upper": 15}],
                       "references": [{"array": "V", "matrix": [[1]], "offset": [0]}]}]}"#,
    );
    let o = run(&["derive", path(p.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("trivial"));
}

#[test]
fn solve_network_fixture_is_sat() {
    let o = run(&["solve", "--network", path(&fixture("four_array_network.json")), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "sat");
    assert_eq!(v["assignment"]["Q1"], serde_json::json!([[1, 0]]));
    assert_eq!(v["assignment"]["Q2"], serde_json::json!([[1, 1]]));
    assert_eq!(v["assignment"]["Q3"], serde_json::json!([[0, 1]]));
    assert_eq!(v["assignment"]["Q4"], serde_json::json!([[1, 0]]));
}

#[test]
fn seeded_runs_are_reproducible() {
    let net = fixture("four_array_network.json");
    let strip = |o: &Output| {
        stdout(o)
            .lines()
            .filter(|l| !l.contains("elapsed_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = run(&["solve", "--network", path(&net), "--scheme", "base", "--seed", "7", "--json"]);
    let b = run(&["solve", "--network", path(&net), "--scheme", "base", "--seed", "7", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn no_backjump_reports_zero_backjumps() {
    let o = run(&["solve", "--network", path(&fixture("four_array_network.json")), "--no-backjump", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["stats"]["backjumps"], 0);
}

#[test]
fn contradictory_flags_exit_2() {
    let net = fixture("four_array_network.json");
    let o = run(&["solve", "--network", path(&net), "--scheme", "base", "--no-val-order"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve", "--network", path(&net), "--scheme", "heuristic"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unsat_network_exits_3() {
    let net = write_temp(
        r#"{"variables": ["A", "B"],
            "domains": {"A": [[[1, 0]]], "B": [[[0, 1]]]},
            "constraints": [{"pair": ["A", "B"], "allowed": []}]}"#,
    );
    let o = run(&["solve", "--network", path(net.path()), "--json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "unsat");
}

#[test]
fn compare_ranks_solver_above_original() {
    let o = run(&["compare", path(&fixture("skewed_pair.json")), "--cache", "8192,2,32", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let row = |name: &str| rows.iter().find(|r| r["scheme"] == name).unwrap();
    assert_eq!(row("original")["locality"]["score"], 0.0);
    for scheme in ["base", "enhanced"] {
        assert_eq!(row(scheme)["status"], "sat");
        assert_eq!(row(scheme)["locality"]["score"], 1.0);
    }
    assert_ne!(row("heuristic")["status"], "unsat");
    let misses = |r: &Value| r["locality"]["cache"]["L1"]["misses"].as_u64().unwrap();
    assert!(misses(row("enhanced")) < misses(row("original")));
}

#[test]
fn eval_scores_given_assignment() {
    let skewed = fixture("skewed_pair.json");
    let solved = run(&["solve", path(&skewed), "--json"]);
    let file = write_temp(&stdout(&solved));
    let o = run(&["eval", path(&skewed), "--assignment", path(file.path()), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["score"], 1.0);

    let o = run(&["eval", path(&skewed), "--innermost", "n1=i2", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["score"], 0.0);

    let o = run(&["eval", path(&skewed), "--innermost", "n1=zz"]);
    assert_eq!(o.status.code(), Some(2));
}
