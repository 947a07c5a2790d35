use std::path::PathBuf;
use std::process::{Command, Output};

fn dwf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwf")).args(args).output().unwrap()
}

fn specs(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name).display().to_string()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dwf-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn expected_failures_exit_zero() {
    let o = dwf(&["verify", "--fixture", "FIX-R", "--seed", "3", "--points", "4", "--suite", "reinhart", "--suite", "homogeneity"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("expected-fail") && text.contains("X=∂v^1"), "{text}");
}

#[test]
fn undeclared_failure_exits_one() {
    let dir = scratch("fail");
    let doc = std::fs::read_to_string(specs("fix-r.json")).unwrap().replace(r#""expected_failures": ["reinhart", "kahler"]"#, r#""expected_failures": ["kahler"]"#);
    let path = dir.join("spec.json");
    std::fs::write(&path, doc).unwrap();
    let o = dwf(&["verify", "--spec", path.to_str().unwrap(), "--points", "3", "--suite", "reinhart"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("unexpected verdicts: reinhart"));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn unexpected_pass_exits_one() {
    let o = dwf(&["verify", "--fixture", "FIX-E", "--points", "3", "--suite", "reinhart", "--suite", "kahler", "--tol", "kahler=10"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("UNEXPECTED-PASS"));
}

#[test]
fn usage_and_spec_errors_exit_two() {
    for args in [
        &["verify", "--fixture", "FIX-Q"][..],
        &["verify", "--fixture", "FIX-E", "--suite", "bogus"],
        &["verify", "--fixture", "FIX-E", "--tol", "hermitian.bogus=1"],
        &["verify", "--fixture", "FIX-E", "--tol", "nonsense"],
        &["verify", "--spec", "/nonexistent/spec.json"],
        &["verify"],
        &["eval", "--fixture", "FIX-E", "--at", "0;0;1;1"],
        &["eval", "--fixture", "FIX-E", "--tensor", "nope"],
        &["report", "/nonexistent/report.json"],
    ] {
        let o = dwf(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn bad_spec_document_reports_path() {
    let dir = scratch("spec");
    let doc = std::fs::read_to_string(specs("fix-1d.json")).unwrap().replace(r#""seed": 1"#, r#""seed": 1, "sead": 2"#);
    let path = dir.join("spec.json");
    std::fs::write(&path, doc).unwrap();
    let o = dwf(&["verify", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sampling.sead"));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn shipped_specs_verify_as_expected() {
    for name in ["fix-1d.json", "fix-r.json", "curved-product.json"] {
        let o = dwf(&["verify", "--spec", &specs(name), "--points", "20"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn report_round_trip_keeps_the_exit_code() {
    let dir = scratch("report");
    let json = dir.join("r.json");
    let o = dwf(&["verify", "--fixture", "FIX-R", "--points", "3", "--suite", "reinhart", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let again = dwf(&["report", json.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(stdout(&again), stdout(&o));
    let as_json = dwf(&["report", json.to_str().unwrap(), "--as-json"]);
    let v: serde_json::Value = serde_json::from_slice(&as_json.stdout).unwrap();
    assert_eq!(v["diffable"]["config_id"], "FIX-R");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn eval_prints_requested_tensors() {
    let o = dwf(&["eval", "--fixture", "FIX-1D", "--at", "0;1;1;1", "--tensor", "spray", "--tensor", "f2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let t = &v["results"][0]["tensors"];
    assert!(t["f2"].as_f64().is_some());
    assert!(t.get("spray").is_some());
}

#[test]
fn fixtures_lists_all_four() {
    let o = dwf(&["fixtures"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["FIX-1D", "FIX-E", "FIX-P", "FIX-R"] {
        assert!(text.contains(name));
    }
}
