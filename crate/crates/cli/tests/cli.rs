use std::process::{Command, Output};

use serde_json::Value;

fn ruq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = ruq(&all);
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn all_pass(v: &Value) -> bool {
    v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true)
}

#[test]
fn hom_from_tau_into_regular() {
    let v = json(&["hom", "--support", "divisors:12", "--source", "tauRU", "--target", "regular"]);
    assert_eq!(v["dims"]["dimension"], 4);
    assert_eq!(v["witnesses"]["morphisms"].as_array().unwrap().len(), 4);
    assert!(all_pass(&v));
}

#[test]
fn ext_of_re_q_over_two_primes() {
    let o = ruq(&["ext", "--support", "1,2,3", "--source", "atomic:1:1", "--max-degree", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Ext dims: [0,1,0]"), "{}", stdout(&o));
    let v = json(&["ext", "--support", "1,2,3", "--source", "atomic:1:1", "--max-degree", "2"]);
    assert_eq!(v["dims"]["Ext dims"], serde_json::json!([0, 1, 0]));
}

#[test]
fn lim_reports_a_witness() {
    let v = json(&["lim", "--support", "1,2,3", "--source", "atomic:1:1", "--max-degree", "2"]);
    assert_eq!(v["dims"]["lim dims"], serde_json::json!([0, 1, 0]));
    assert_eq!(v["witnesses"]["lim^1"].as_array().unwrap().len(), 1);
    assert!(v["conventions"]["nerve"].is_string());
}

#[test]
fn normal_basis_over_divisors_of_60() {
    let o = ruq(&["normal-basis", "--support", "divisors:60"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("isomorphism: true"), "{text}");
    assert!(text.contains("ranks: [1,1,2,2,4,2,4,4,8,8,8,16]"), "{text}");
    assert!(text.contains("quotient basis"));
}

#[test]
fn unscaled_family_fails_with_nonzero_exit() {
    let o = ruq(&["normal-basis", "--support", "divisors:4", "--unscaled"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("isomorphism: false"));
}

#[test]
fn resolution_reports_the_contraction_sign() {
    let o = ruq(&["resolution", "--primes", "2,3,5", "--support", "divisors:30"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("contraction sign: OneBased"));
    let v = json(&["resolution", "--primes", "2,3,5", "--support", "divisors:30"]);
    assert_eq!(v["witnesses"]["xi"].as_array().unwrap().len(), 2);
}

#[test]
fn tau_ru_dimensions_are_totients() {
    let v = json(&["tau-ru", "--support", "upto:10"]);
    assert_eq!(v["dims"]["level dims"], serde_json::json!([1, 1, 2, 2, 4, 2, 6, 4, 6, 4]));
    assert!(all_pass(&v));
}

#[test]
fn report_over_small_battery() {
    let v = json(&["report", "--support", "divisors:12", "--random", "3", "--seed", "5"]);
    assert!(all_pass(&v));
    assert_eq!(v["dims"]["modules"], 3 + 6 + 1 + 3);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["report", "--support", "upto:6", "--random", "4", "--format", "json"];
    let a = ruq(&args);
    let b = ruq(&args);
    let mut par = args.to_vec();
    par.push("--parallel");
    let c = ruq(&par);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn written_module_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tau.json");
    let p = path.to_str().unwrap();
    let o = ruq(&["validate", "--support", "divisors:12", "--source", "tauRU", "--write", p]);
    assert!(o.status.success(), "{}", stdout(&o));
    let first = std::fs::read(&path).unwrap();
    let again = dir.path().join("again.json");
    let o = ruq(&["validate", "--source", p, "--write", again.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(first, std::fs::read(&again).unwrap());
    let v = json(&["hom", "--source", p, "--support", "divisors:12"]);
    assert_eq!(v["dims"]["dimension"], 4);
}

#[test]
fn builtin_names_shadow_files_unless_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let o = ruq(&["validate", "--support", "1,2", "--source", "atomic:1:1", "--write", dir.path().join("m.json").to_str().unwrap()]);
    assert!(o.status.success());
    std::fs::copy(dir.path().join("m.json"), dir.path().join("regular")).unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["validate", "--support", "1,2", "--source", "regular", "--format", "json"];
        args.extend(extra);
        let o = Command::new(env!("CARGO_BIN_EXE_ruq")).current_dir(dir.path()).args(&args).output().unwrap();
        serde_json::from_slice::<Value>(&o.stdout).unwrap()
    };
    assert_eq!(run(&[])["dims"]["level dims"], serde_json::json!([1, 1]));
    assert_eq!(run(&["--override"])["dims"]["level dims"], serde_json::json!([1, 0]));
}

#[test]
fn invalid_module_file_fails_its_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let o = ruq(&["validate", "--support", "divisors:4", "--source", "regular", "--write", path.to_str().unwrap()]);
    assert!(o.status.success());
    let mut v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    v["restrictions"]["2->4"] = serde_json::json!([["1"], ["0"]]);
    std::fs::write(&path, v.to_string()).unwrap();
    let o = ruq(&["validate", "--source", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn errors_exit_with_code_two() {
    assert_eq!(ruq(&["hom", "--support", "2,4", "--source", "regular"]).status.code(), Some(2));
    assert_eq!(ruq(&["hom", "--support", "divisors:12", "--source", "missing.json"]).status.code(), Some(2));
    let o = ruq(&["lim", "--support", "divisors:360", "--source", "regular"]);
    assert_eq!(o.status.code(), Some(0));
    let o = ruq(&["hom", "--support", "divisors:360", "--source", "regular"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--max-entries"));
}
