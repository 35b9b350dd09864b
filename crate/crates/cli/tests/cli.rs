use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use loopkit::io::{load_table, parse_table, TableFile};
use loopkit::structure::are_isomorphic;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn loopkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn table1_is_flexible() {
    let t1 = fixture("table1.loop");
    let o = loopkit(&["check", path(&t1), "--identity", "FLEX"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "FLEX holds");
}

#[test]
fn table1_fails_right_semi_flexibility_with_a_witness() {
    let t1 = fixture("table1.loop");
    let o = loopkit(&["check", "--semi", "right", path(&t1), "--identity", "FLEX"]);
    assert_eq!(code(&o), 1);
    let line = stdout(&o);
    assert!(line.starts_with("right-SUF(FLEX) fails: a=0 b="), "{line}");
    let left = loopkit(&["check", "--semi", "left", path(&t1), "--identity", "FLEX"]);
    assert_eq!(code(&left), 0);
}

#[test]
fn table2_universal_witness_is_in_file_symbols() {
    let o = loopkit(&["check", "--universal", path(&fixture("table2.loop")), "--identity", "FLEX"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "UF(FLEX) fails: a=0 b=8 x=2 y=0");
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    assert_eq!(code(&loopkit(&["report", "missing.loop"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let ragged = dir.path().join("ragged.loop");
    std::fs::write(&ragged, "loop 3\n0 1 2\n1 2\n2 0 1\n").unwrap();
    let o = loopkit(&["check", path(&ragged), "--identity", "FLEX"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(code(&loopkit(&["check", path(&fixture("table1.loop")), "--identity", "NOPE"])), 2);
    assert_eq!(code(&loopkit(&["frobnicate"])), 2);
    assert_eq!(code(&loopkit(&["isotope", path(&fixture("table1.loop"))])), 2);
    assert_eq!(code(&loopkit(&["isotope", path(&fixture("table1.loop")), "--a", "9", "--b", "0"])), 2);
}

#[test]
fn json_report_lists_every_property_once() {
    let o = loopkit(&["report", path(&fixture("table1.loop")), "--json"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let props = doc["properties"].as_array().unwrap();
    let mut names: Vec<&str> = props.iter().map(|p| p["property"].as_str().unwrap()).collect();
    for (name, _) in loopkit::identity::catalog() {
        assert_eq!(names.iter().filter(|n| *n == name).count(), 1, "{name}");
    }
    let total = names.len();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), total);
    let right = props.iter().find(|p| p["property"] == "right-SUF(FLEX)").unwrap();
    assert_eq!(right["holds"], false);
    assert!(right["witness"]["b"].is_u64());
    // deterministic
    assert_eq!(stdout(&o), stdout(&loopkit(&["report", path(&fixture("table1.loop")), "--json"])));
}

#[test]
fn isotope_output_parses_back() {
    let t3 = fixture("table3.loop");
    let o = loopkit(&["isotope", path(&t3), "--a", "1", "--b", "3"]);
    assert_eq!(code(&o), 0);
    let iso = parse_table(&stdout(&o)).unwrap();
    assert_eq!(iso.table.order(), 32);
    assert!(!iso.table.is_commutative());
    let classes = loopkit(&["isotope", path(&t3), "--classes"]);
    assert!(stdout(&classes).starts_with("2 isotope classes"));
}

#[test]
fn constructions_from_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ext.toml");
    std::fs::write(&cfg, "base = \"cyclic:2\"\nfiber = \"cyclic:2\"\ncocycle = [[0, 0], [0, 1]]\n").unwrap();
    let out = dir.path().join("ext.loop");
    assert_eq!(code(&loopkit(&["construct", "central-ext", path(&cfg), "-o", path(&out)])), 0);
    let ext = load_table(&out).unwrap();
    assert!(are_isomorphic(&ext.table, &loopkit::table::LoopTable::cyclic(4)).is_some());

    // table references resolve against the config's directory
    std::fs::copy(fixture("table1.loop"), dir.path().join("t1.loop")).unwrap();
    let mb = dir.path().join("mb.toml");
    std::fs::write(&mb, "input = \"t1.loop\"\n").unwrap();
    let o = loopkit(&["construct", "middle-bol", path(&mb)]);
    assert_eq!(code(&o), 2, "Table 1 is not left Bol");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "p = 3\nd = 3\ncolour = 1\n").unwrap();
    assert_eq!(code(&loopkit(&["construct", "wedge", path(&bad)])), 2);
    assert_eq!(code(&loopkit(&["construct", "pyramid", path(&bad)])), 2);
}

#[test]
fn search_writes_models_and_checks_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    std::fs::write(
        &spec,
        "order = 6\nrequired = [\"left-SUF(FLEX)\"]\nforbidden = [\"right-SUF(FLEX)\"]\n",
    )
    .unwrap();
    let models = dir.path().join("models");
    let o = loopkit(&["--jobs", "2", "search", path(&spec), "--output-dir", path(&models), "--expect", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(summary["models"], 1);
    assert_eq!(summary["exhausted"], true);
    let found: TableFile = load_table(models.join("model-001.loop")).unwrap();
    let t1 = load_table(fixture("table1.loop")).unwrap();
    assert!(are_isomorphic(&found.table, &t1.table).is_some());

    assert_eq!(code(&loopkit(&["search", path(&spec), "--expect", "2"])), 1);

    let budget = dir.path().join("budget.toml");
    std::fs::write(&budget, "order = 7\n[limits]\nnodes = 50\n").unwrap();
    assert_eq!(code(&loopkit(&["search", path(&budget)])), 1);
}

#[test]
fn structure_queries() {
    let t1 = fixture("table1.loop");
    let o = loopkit(&["structure", path(&t1), "--nuclei"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("center         {0}"));
    let normal = stdout(&loopkit(&["structure", path(&t1), "--normal"]));
    assert_eq!(normal.lines().count(), 2, "Table 1 is simple");
    assert_eq!(code(&loopkit(&["structure", path(&t1), "--diassoc"])), 1);
    assert_eq!(code(&loopkit(&["structure", path(&t1), "--isomorphic", path(&t1)])), 0);

    let dir = tempfile::tempdir().unwrap();
    let opp = dir.path().join("opp.loop");
    let t = load_table(&t1).unwrap();
    std::fs::write(&opp, TableFile::new(t.table.opposite()).to_text()).unwrap();
    let o = loopkit(&["structure", path(&t1), "--isomorphic", path(&opp)]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "not isomorphic");
    assert_eq!(code(&loopkit(&["structure", path(&t1)])), 2);
}
