use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_descent-wb"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("descent-wb-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

fn code(c: &mut Command) -> i32 {
    c.output().unwrap().status.code().unwrap()
}

#[test]
fn bundled_causal_lemmas_pass() {
    let out = tmp("lemmas.json");
    assert_eq!(code(bin().arg("run").arg(scenario("causal-lemmas.scn")).arg("--report").arg(&out)), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["format"], "descent-report/1");
    assert!(v["records"].as_array().unwrap().iter().all(|r| r["verdict"] == "pass"));
}

#[test]
fn bundled_prestack_failure_reports_expected_failures() {
    let out = tmp("prestack.json");
    assert_eq!(code(bin().arg("run").arg(scenario("prestack-failure.scn")).arg("--report").arg(&out)), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rec = &v["records"][0];
    assert_eq!(rec["verdict"], "fail");
    for row in rec["detail"]["variants"].as_array().unwrap() {
        assert_eq!((row["site_homs"].as_str(), row["descent_homs"].as_str()), (Some("4"), Some("1")));
    }
}

#[test]
fn malformed_input_exits_2() {
    let p = tmp("truncated.scn");
    std::fs::write(&p, "{\"schema\": 1, \"name\": \"x\", \"checks\": [\"kg.prop").unwrap();
    let o = bin().arg("run").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    std::fs::write(&p, "{\"schema\": 1, \"name\": \"x\", \"checks\": [\"no.such-check\"]}").unwrap();
    assert_eq!(code(bin().arg("run").arg(&p)), 2);
    std::fs::write(&p, "{\"schema\": 2, \"name\": \"x\", \"checks\": [\"kg.properties\"]}").unwrap();
    assert_eq!(code(bin().arg("run").arg(&p)), 2);
    assert_eq!(code(bin().arg("demo").arg("nope")), 2);
    assert_eq!(code(bin().arg("run").arg(scenario("causal-lemmas.scn")).args(["--window", "5..1"])), 2);
    assert_eq!(code(bin().arg("run").arg(scenario("causal-lemmas.scn")).env("DESCENT_WB_MARGIN", "x")), 2);
}

#[test]
fn unexpected_failure_exits_1() {
    let p = tmp("red.scn");
    std::fs::write(&p, "{\"schema\": 1, \"name\": \"red\", \"universe\": {\"hulls\": 20}, \"checks\": [\"causality.double-complement\"]}").unwrap();
    assert_eq!(code(bin().arg("run").arg(&p).arg("--report").arg(tmp("red.json"))), 1);
}

#[test]
fn check_causality_on_one_backend() {
    let o = bin()
        .args(["check-causality", "--backend", "plane", "--window", "0..5", "--span", "0..5", "--seed", "3"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 3);
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(recs[1]["verdict"], "pass");
}
