use std::process::{Command, Output};

use serde_json::Value;

fn fockpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockpart"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("fockpart-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn gallery_json_report() {
    let o = fockpart(&["--gallery", "tmsv", "--param", "lambda=0.5", "--nmax", "8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["version"], "report_v1");
    assert_eq!(doc["name"], "tmsv(lambda=0.5,nmax=8)");
    assert_eq!(doc["config"]["stats"], "distinguishable");
    assert_eq!(doc["config"]["seed"], 42);
    assert_eq!(doc["config"]["tol_rel"].as_f64(), Some(1e-8));
    assert_eq!(doc["verdicts"]["field"]["status"], "entangled");
    assert_eq!(doc["verdicts"]["particle_dist"]["status"], "factorizable");
    assert_eq!(doc["verdicts"]["particle_fermion"]["status"], "not_applicable");
    assert_eq!(doc["gallery"]["expected"]["field"], "entangled");
    let ranks = doc["verdicts"]["field"]["witness"]["ranks"].as_array().unwrap();
    assert!(ranks.iter().any(|r| r["rank"] == 9));
    assert_eq!(doc["per_component"].as_array().unwrap().len(), 9);
    assert!(stdout(&o).contains("\"tol_rel\":1.0000000000000000e-8"));
}

#[test]
fn nmax_flag_only_reaches_entries_that_take_it() {
    let o = fockpart(&["--gallery", "x_state", "--nmax", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = fockpart(&["--gallery", "phi_product", "--nmax", "3", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["gallery"]["params"]["nmax"], 3);
}

#[test]
fn run_program_as_table() {
    let o = fockpart(&["run", "examples/chi.fp", "--format", "table"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("chi  [boson, 3 modes"), "{text}");
    let row = text.lines().find(|l| l.trim_start().starts_with("particle_identical_boson")).unwrap();
    assert!(row.contains("entangled"), "{row}");
}

#[test]
fn run_program_as_json_array() {
    let o = fockpart(&["run", "examples/gallery_refs.fp", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let docs: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let docs = docs.as_array().unwrap();
    assert_eq!(docs.len(), 3);
    assert_eq!(docs[0]["name"], "x_state");
    assert_eq!(docs[2]["statistics"], "fermion");
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("fockpart-out-{}.json", std::process::id()));
    let o = fockpart(&["--gallery", "boson_psi", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["verdicts"]["particle_identical_boson"]["status"], "entangled");
    let _ = std::fs::remove_file(path);
}

#[test]
fn strict_turns_indeterminate_into_exit_one() {
    // The second amplitude sits just above the rank cutoff.
    let path = scratch("marginal.fp", "classify fock(1, 0) + 0.00000003*fock(0, 1) stats=boson;\n");
    let p = path.to_str().unwrap();
    let o = fockpart(&["run", p, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let docs: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(docs[0]["verdicts"]["field"]["status"], "indeterminate");
    assert_eq!(docs[0]["verdicts"]["field"]["marginal"], true);
    let o = fockpart(&["run", p, "--strict"]);
    assert_eq!(o.status.code(), Some(1));
    let o = fockpart(&["--gallery", "tmsv", "--strict"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn errors_exit_two() {
    for args in [
        &["--gallery", "nonesuch"][..],
        &["--gallery", "tmsv", "--param", "lambda=2"],
        &["--gallery", "tmsv", "--param", "colour=red"],
        &["--gallery", "all", "--param", "lambda=0.5"],
        &["run", "examples/missing.fp"],
        &["--format", "xml", "--gallery", "tmsv"],
        &["--tol", "2", "--gallery", "tmsv"],
        &[],
    ] {
        let o = fockpart(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&o).is_empty(), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn language_errors_are_reported_with_locations() {
    let path = scratch("bad.fp", "let a = ket(0);\nclassify a stats=boson\n");
    let o = fockpart(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("3:1: syntax error"), "{}", stderr(&o));

    let path = scratch("zero.fp", "let z = adag(ket(0))^2 |vac>;\nclassify z stats=fermion;\n");
    let o = fockpart(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("statement 1 (line 1)"), "{}", stderr(&o));
    assert!(stderr(&o).contains("zero norm"), "{}", stderr(&o));
}

#[test]
fn help_exits_zero() {
    let o = fockpart(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("--gallery"));
}
