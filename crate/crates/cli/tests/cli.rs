use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const ELECTION: &str = r#"{"n": 4, "ballots": [
  {"ranking": [2,3,4,1], "count": "8"}, {"ranking": [1,3,2,4], "count": "5"},
  {"ranking": [4,3,2,1], "count": "10"}, {"ranking": [2,3,1,4], "count": "8"},
  {"ranking": [4,1,3,2], "count": "7"}]}"#;

const TARGETS: &str = r#"{
  "weights": [["3","1","-1","-3"], ["1","1","1","-3"], ["17","1","-7","-11"]],
  "results": [["-2","-11","4","9"], ["4","5","3","-12"], ["13","-2","-6","-5"]]}"#;

fn posvote(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posvote")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn strs(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect()
}

#[test]
fn tally_borda_and_plurality() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", ELECTION);
    let borda = write(dir.path(), "b.json", r#"{"weights": ["3/2","1/2","-1/2","-3/2"]}"#);
    let v = json_of(&posvote(&["tally", "-p", p.to_str().unwrap(), "-w", borda.to_str().unwrap()]));
    assert_eq!(strs(&v["results"]), ["-20", "6", "12", "2"]);
    assert_eq!(v["ranking"], serde_json::json!([[3], [2], [4], [1]]));

    let plurality = write(dir.path(), "pl.json", r#"{"weights": ["3/4","-1/4","-1/4","-1/4"]}"#);
    let v = json_of(&posvote(&["tally", "-p", p.to_str().unwrap(), "-w", plurality.to_str().unwrap()]));
    assert_eq!(strs(&v["results"]), ["-9/2", "13/2", "-19/2", "15/2"]);
    assert_eq!(v["ranking"], serde_json::json!([[4], [2], [1], [3]]));
}

#[test]
fn pick_weights_and_unreachable() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", ELECTION);
    let v = json_of(&posvote(&["pick-weights", "-p", p.to_str().unwrap(), "-r", "2,4,3,1"]));
    assert_eq!(v["ranking"], serde_json::json!([[2], [4], [3], [1]]));
    assert_eq!(strs(&v["b"]).len(), 3);

    let uniform = write(
        dir.path(),
        "u.json",
        r#"{"n": 3, "ballots": [{"ranking": [1,2,3], "count": "1"}, {"ranking": [2,3,1], "count": "1"}, {"ranking": [3,1,2], "count": "1"}]}"#,
    );
    let out = posvote(&["pick-weights", "-p", uniform.to_str().unwrap(), "-r", "1,2,3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "unreachable");
    let tie = json_of(&posvote(&["pick-weights", "-p", uniform.to_str().unwrap(), "-r", "1,2,3;"]));
    assert_eq!(tie["ranking"], serde_json::json!([[1, 2, 3]]));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", ELECTION);
    let missing = dir.path().join("missing.json");
    assert_eq!(posvote(&["reachable", "-p", missing.to_str().unwrap()]).status.code(), Some(2));
    let garbage = write(dir.path(), "g.json", "{not json");
    assert_eq!(posvote(&["reachable", "-p", garbage.to_str().unwrap()]).status.code(), Some(2));
    let bad_weights = write(dir.path(), "w.json", r#"{"weights": ["0","1","0","-1"]}"#);
    let out = posvote(&["tally", "-p", p.to_str().unwrap(), "-w", bad_weights.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(posvote(&["pick-weights", "-p", p.to_str().unwrap(), "-r", "1,x,3,4"]).status.code(), Some(2));
    let dependent = write(
        dir.path(),
        "t.json",
        r#"{"weights": [["1","0","-1"], ["2","0","-2"]], "results": [["0","0","0"], ["0","0","0"]]}"#,
    );
    assert_eq!(posvote(&["synthesize", "-s", dependent.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(posvote(&["saari", "-n", "7"]).status.code(), Some(1));
    let unequal = write(dir.path(), "m.json", r#"{"matrix": [["1","2"],["3","4"]]}"#);
    assert_eq!(posvote(&["decompose", "-m", unequal.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(posvote(&["explore", "-p", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn synthesize_worked_targets() {
    let dir = TempDir::new().unwrap();
    let t = write(dir.path(), "t.json", TARGETS);
    let v = json_of(&posvote(&["synthesize", "-s", t.to_str().unwrap()]));
    assert_eq!(v["verified"], Value::Bool(true));
    assert_eq!(strs(&v["q"][0]), ["27/8", "-8", "51/8", "-3/4"]);
    let alt = json_of(&posvote(&["synthesize", "-s", t.to_str().unwrap(), "--perturb-seed", "3"]));
    assert_eq!(alt["verified"], Value::Bool(true));
    assert_ne!(alt["profile"], v["profile"]);
}

#[test]
fn decompose_matrix() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", r#"{"matrix": [["1/2","1/2","0"],["0","1/2","1/2"],["1/2","0","1/2"]]}"#);
    let v = json_of(&posvote(&["decompose", "-m", m.to_str().unwrap()]));
    let terms = v.as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert!(terms.iter().all(|t| t["coeff"] == "1/2"));
}

#[test]
fn saari_and_reachable_agree() {
    let dir = TempDir::new().unwrap();
    let cert = json_of(&posvote(&["saari", "-n", "3"]));
    assert_eq!(cert["entries"].as_array().unwrap().len(), 4);
    let p = write(dir.path(), "s.json", &cert["profile"].to_string());
    let report = json_of(&posvote(&["reachable", "-p", p.to_str().unwrap()]));
    assert_eq!(report["strict_count"], 4);
    assert_eq!(report["bound"]["attained"], Value::Bool(true));
    let mut from_cert: Vec<&Value> = cert["entries"].as_array().unwrap().iter().map(|e| &e["ranking"]).collect();
    let mut from_lp: Vec<&Value> = report["reachable"].as_array().unwrap().iter().map(|e| &e["ranking"]).collect();
    from_cert.sort_by_key(|v| v.to_string());
    from_lp.sort_by_key(|v| v.to_string());
    assert_eq!(from_cert, from_lp);
}

#[test]
fn decimal_rendering() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", ELECTION);
    let pl = write(dir.path(), "pl.json", r#"{"weights": ["3/4","-1/4","-1/4","-1/4"]}"#);
    let v = json_of(&posvote(&["tally", "-p", p.to_str().unwrap(), "-w", pl.to_str().unwrap(), "--decimal", "2"]));
    assert_eq!(strs(&v["results"]), ["~-4.50", "~6.50", "~-9.50", "~7.50"]);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", ELECTION);
    for args in [
        vec!["explore", "-p", p.to_str().unwrap(), "--trials", "2000", "--seed", "42"],
        vec!["reachable", "-p", p.to_str().unwrap()],
        vec!["saari", "-n", "4"],
    ] {
        let a = posvote(&args);
        let b = posvote(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let out = dir.path().join("out.json");
    let status = posvote(&["reachable", "-p", p.to_str().unwrap(), "-o", out.to_str().unwrap()]).status;
    assert!(status.success());
    assert_eq!(fs::read(&out).unwrap(), posvote(&["reachable", "-p", p.to_str().unwrap()]).stdout);
}

#[test]
fn explore_finds_worked_ranking() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", ELECTION);
    let v = json_of(&posvote(&["explore", "-p", p.to_str().unwrap(), "--seed", "42"]));
    let found = v["rankings"].as_array().unwrap();
    assert!(found.contains(&serde_json::json!([[2], [4], [3], [1]])));
}
