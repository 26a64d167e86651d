use std::path::Path;

use diagflow::cli::{run_from, EXIT_ERROR, EXIT_MINIMAL, EXIT_NOT_APPLICABLE, EXIT_NOT_MINIMAL};

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let record = dir.join("runs.jsonl");
    let mut argv = vec!["diagflow", "--record-file", record.to_str().unwrap()];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_from(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn last_json(out: &str) -> serde_json::Value {
    serde_json::from_str(out.lines().last().unwrap()).unwrap()
}

#[test]
fn classify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(dir.path(), &["classify", "--d", "2", "--a", "3", "--b", "1"]);
    assert_eq!(code, EXIT_NOT_MINIMAL);
    let j = last_json(&out);
    assert_eq!(j["verdict"], "NotMinimal");
    assert_eq!(j["pell_k"], 3);
    assert_eq!(j["real_power_n"], 6);
    assert_eq!(j["disc"], "5184");
    assert_eq!(j["disc_is_square"], true);

    let (code, _, _) = run(dir.path(), &["classify", "--d", "2", "--a", "1", "--b", "1"]);
    assert_eq!(code, EXIT_MINIMAL);
    let (code, _, _) = run(dir.path(), &["classify", "--d", "2", "--a", "-3", "--b", "-1"]);
    assert_eq!(code, EXIT_NOT_MINIMAL);
    let (code, _, _) = run(dir.path(), &["classify", "--d", "2", "--a", "1", "--b", "0"]);
    assert_eq!(code, EXIT_NOT_APPLICABLE);
    let (code, _, err) = run(dir.path(), &["classify", "--d", "4", "--a", "1", "--b", "1"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("d not squarefree"), "{err}");

    let records: Vec<serde_json::Value> = std::fs::read_to_string(dir.path().join("runs.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 5);
    assert_eq!(records[0]["command"], "classify");
    assert_eq!(records[0]["params"]["d"], 2);
    assert_eq!(records[4]["exit_code"], EXIT_ERROR);
}

#[test]
fn classify_from_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = r#"{"d":2,"entries":[[[3,1],[1,0]],[[-1,0],[0,0]]]}"#;
    let (code, out, err) = run(dir.path(), &["classify", "--matrix", m]);
    assert_eq!(code, EXIT_NOT_MINIMAL, "{err}");
    assert_eq!(last_json(&out)["pell_k"], 3);
}

#[test]
fn scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let (code, out, err) = run(
        dir.path(),
        &["scan", "--d", "2", "--amax", "5", "--bmax", "2", "--out", "csv", "--output", path.to_str().unwrap()],
    );
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("d,a,b,verdict,pell_k,real_power_n,disc,disc_is_square\n"));
    assert!(csv.contains("\n2,3,1,NotMinimal,3,6,5184,true\n"));
    let j = last_json(&out);
    assert_eq!(j["rows"].as_u64().unwrap() as usize, csv.lines().count() - 1);
}

#[test]
fn escape_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.jsonl");
    let (code, out, err) = run(
        dir.path(),
        &["escape", "--vector", "1,1,0", "--udir", "2", "--eps", "1e-3", "--tmax", "20", "--output", path.to_str().unwrap()],
    );
    assert_eq!(code, 0, "{err}");
    assert_eq!(last_json(&out)["unipotent_steps"], 1);
    let lines = std::fs::read_to_string(&path).unwrap();
    assert_eq!(lines.lines().count(), 2);
}

#[test]
fn escape_accepts_lattice_file() {
    let dir = tempfile::tempdir().unwrap();
    let lat = dir.path().join("lat.json");
    std::fs::write(&lat, r#"{"dim":3,"basis":[2,0,0,0,1,0,0,0,0.5]}"#).unwrap();
    let out_path = dir.path().join("t.jsonl");
    let (code, out, err) = run(
        dir.path(),
        &["escape", "--lattice", lat.to_str().unwrap(), "--vector", "0,-1,0", "--output", out_path.to_str().unwrap()],
    );
    assert_eq!(code, 0, "{err}");
    assert!(last_json(&out)["final_systole"].as_f64().unwrap() < 1e-3);
}

#[test]
fn probe_and_forms() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run(
        dir.path(),
        &["probe", "--cubic", "1,-2,-1", "--grid-radius", "1", "--grid-step", "0.5", "--eps", "0.1"],
    );
    assert_eq!(code, 0, "{err}");
    assert_eq!(last_json(&out)["verdict"], "stays-above-eps");

    let (code, out, err) = run(dir.path(), &["forms", "--cubic", "1,-2,-1", "--radius", "3"]);
    assert_eq!(code, 0, "{err}");
    let j = last_json(&out);
    assert_eq!(j["argmin_nonzero"], serde_json::json!([1, 0, 0]));
    assert_eq!(j["rational_multiple"], true);

    let (code, out, _) = run(dir.path(), &["forms", "--coeff", "[[1,0],[0,1]]", "--radius", "2"]);
    assert_eq!(code, 0);
    assert_eq!(last_json(&out)["min_abs"], 0.0);
}

#[test]
fn bad_arguments_fail() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(dir.path(), &["classify", "--d", "2"]);
    assert_eq!(code, EXIT_ERROR);
    let (code, _, _) = run(dir.path(), &["frobnicate"]);
    assert_eq!(code, EXIT_ERROR);
}
