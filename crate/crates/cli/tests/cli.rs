use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sepsos(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepsos"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn emit(dir: &Path, name: &str) -> PathBuf {
    let file = format!("{name}.json");
    let o = sepsos(&["fixtures", "emit", name, "--out", &file], dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir.join(file)
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn fixtures_list_names_every_fixture() {
    let d = TempDir::new().unwrap();
    let o = sepsos(&["fixtures", "list"], d.path());
    assert_eq!(code(&o), 0);
    let names: Vec<String> = String::from_utf8(o.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names.len(), 12);
    assert!(names.contains(&"hakye-map".to_string()));
}

#[test]
fn hakye_map_emits_exact_choi_matrix() {
    let d = TempDir::new().unwrap();
    let o = sepsos(&["fixtures", "emit", "hakye-map"], d.path());
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["in_dim"], 2);
    assert_eq!(v["out_dim"], 4);
    assert_eq!(v["dim"], 8);
    let e11: Vec<Vec<String>> = (0..4)
        .map(|a| (0..4).map(|b| v["entries"][a][b]["re"].as_str().unwrap().to_string()).collect())
        .collect();
    let want = [["4", "-2", "0", "0"], ["-2", "2", "0", "0"], ["0", "0", "0", "0"], ["0", "0", "0", "4"]];
    assert_eq!(e11, want.map(|r| r.map(String::from).to_vec()).to_vec());
}

#[test]
fn paper_certificate_verifies() {
    let d = TempDir::new().unwrap();
    let q = emit(d.path(), "appendix-q");
    let c = emit(d.path(), "appendix-q-certificate");
    let o = sepsos(&["sos", "verify", q.to_str().unwrap(), c.to_str().unwrap()], d.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["establishes"], "sos");
}

#[test]
fn sos_check_emits_gram_certificate_that_reverifies() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "appendix-q");
    let o = sepsos(&["sos", "check", "appendix-q.json", "--mode", "exact"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let cert = d.path().join("appendix-q.cert.json");
    assert_eq!(read(&cert)["type"], "gram");
    let o = sepsos(&["sos", "verify", "appendix-q.json", "appendix-q.cert.json"], d.path());
    assert_eq!(code(&o), 0);
}

#[test]
fn choi_polynomial_is_refuted_with_moment_certificate() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "choi-polynomial");
    let o = sepsos(&["sos", "check", "choi-polynomial.json", "--mode", "exact"], d.path());
    assert_eq!(code(&o), 1);
    let cert = read(&d.path().join("choi-polynomial.cert.json"));
    assert_eq!(cert["type"], "moment");
    assert!(cert["value_on_p"].as_str().unwrap().starts_with('-'));
    let o = sepsos(&["sos", "verify", "choi-polynomial.json", "choi-polynomial.cert.json"], d.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["establishes"], "not-sos");
}

#[test]
fn certificate_for_another_polynomial_is_rejected() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "appendix-p");
    emit(d.path(), "appendix-q-certificate");
    let o = sepsos(&["sos", "verify", "appendix-p.json", "appendix-q-certificate.json"], d.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn zero_curve_prover_refutes_appendix_p() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "appendix-p");
    emit(d.path(), "zero-curve");
    let o = sepsos(
        &["notsos-zeros", "appendix-p.json", "zero-curve.json", "--certificate", "p.moment.json"],
        d.path(),
    );
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["contradiction"]["diagonal"], "x4*conj(x4)");
    assert_eq!(v["contradiction"]["coefficient"], "4");
    let o = sepsos(&["sos", "verify", "appendix-p.json", "p.moment.json"], d.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["establishes"], "not-sos");
}

#[test]
fn zero_curve_prover_is_indeterminate_on_sos_input() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "appendix-q");
    emit(d.path(), "zero-curve");
    let o = sepsos(&["notsos-zeros", "appendix-q.json", "zero-curve.json"], d.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn bell_state_fails_ppt() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "bell-state");
    let o = sepsos(&["ppt", "bell-state.json", "--dims", "2,2"], d.path());
    assert_eq!(code(&o), 1);
    let m = stdout_json(&o)["min_eigenvalue_partial_transpose"].as_f64().unwrap();
    assert!((m + 0.5).abs() <= 1e-10);
}

#[test]
fn maximally_mixed_state_passes_ppt() {
    let d = TempDir::new().unwrap();
    let q = |s: &str| serde_json::json!({"re": s, "im": "0"});
    let entries: Vec<Vec<Value>> = (0..4)
        .map(|i| (0..4).map(|j| if i == j { q("1/4") } else { q("0") }).collect())
        .collect();
    let state = serde_json::json!({"dims": [2, 2], "dim": 4, "entries": entries});
    std::fs::write(d.path().join("mixed.json"), state.to_string()).unwrap();
    let o = sepsos(&["ppt", "mixed.json"], d.path());
    assert_eq!(code(&o), 0);
}

#[test]
fn choi_conversions_round_trip() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "hakye-map");
    let w = emit(d.path(), "hakye-w");
    let o = sepsos(&["choi", "to-poly", "hakye-map.json", "--out", "w.json"], d.path());
    assert_eq!(code(&o), 0);
    assert_eq!(read(&d.path().join("w.json")), read(&w));
    let o = sepsos(&["choi", "from-poly", "w.json", "--orientation", "output-first"], d.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o), read(&d.path().join("hakye-map.json")));
}

#[test]
fn bad_inputs_map_to_usage_and_io_codes() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&sepsos(&["fixtures", "emit", "nope"], d.path())), 64);
    assert_eq!(code(&sepsos(&["frobnicate"], d.path())), 64);
    std::fs::write(d.path().join("bad.json"), "{not json").unwrap();
    assert_eq!(code(&sepsos(&["sos", "check", "bad.json"], d.path())), 64);
    std::fs::write(d.path().join("shape.json"), r#"{"nvars": 1, "terms": [{"u": [1, 0], "v": [1], "re": "1"}]}"#).unwrap();
    assert_eq!(code(&sepsos(&["sos", "check", "shape.json"], d.path())), 64);
    assert_eq!(code(&sepsos(&["sos", "check", "missing.json"], d.path())), 74);
    let o = sepsos(&["repro", "--only", "zero-curve", "--out", "no/such/dir/r.json"], d.path());
    assert_eq!(code(&o), 74);
}

#[test]
fn float_input_rejects_exact_mode() {
    let d = TempDir::new().unwrap();
    std::fs::write(
        d.path().join("f.json"),
        r#"{"nvars": 1, "terms": [{"u": [1], "v": [1], "re": "0.5", "im": "0"}]}"#,
    )
    .unwrap();
    assert_eq!(code(&sepsos(&["sos", "check", "f.json", "--mode", "exact"], d.path())), 64);
    let o = sepsos(&["sos", "check", "f.json"], d.path());
    assert_eq!(code(&o), 0);
    let o = sepsos(&["sos", "verify", "f.json", "f.cert.json"], d.path());
    assert_eq!(code(&o), 0);
}

fn strip_wall_time(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time");
            m.values_mut().for_each(strip_wall_time);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}

#[test]
fn repro_report_matches_golden_file() {
    let d = TempDir::new().unwrap();
    let o = sepsos(
        &["repro", "--only", "appendix-q-sos", "--only", "zero-curve", "--out", "r.json"],
        d.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(d.path().join("r.txt").exists());
    let mut got = read(&d.path().join("r.json"));
    strip_wall_time(&mut got);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/repro-cheap.json");
    if std::env::var_os("SEPSOS_BLESS").is_some() {
        std::fs::write(&golden, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    assert_eq!(got, read(&golden));
}

#[test]
fn repro_single_claim_report() {
    let d = TempDir::new().unwrap();
    let o = sepsos(&["repro", "--only", "appendix-q-sos", "--out", "r.json"], d.path());
    assert_eq!(code(&o), 0);
    let v = read(&d.path().join("r.json"));
    assert_eq!(v["claims"].as_array().unwrap().len(), 1);
    assert_eq!(v["claims"][0]["id"], "appendix-q-sos");
}

#[test]
fn tampered_certificate_fails_its_claim() {
    let d = TempDir::new().unwrap();
    let fx = d.path().join("fx");
    std::fs::create_dir(&fx).unwrap();
    let c = emit(&fx, "appendix-q-certificate");
    let mut v = read(&c);
    assert_eq!(v["A"][0][0], "36");
    v["A"][0][0] = Value::String("37".into());
    std::fs::write(&c, v.to_string()).unwrap();
    let o = sepsos(
        &["repro", "--only", "appendix-q-sos", "--fixtures", "fx", "--out", "r.json"],
        d.path(),
    );
    assert_eq!(code(&o), 1);
    let r = read(&d.path().join("r.json"));
    assert_eq!(r["claims"][0]["status"], "fail");
}
