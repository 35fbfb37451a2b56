use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(cache: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cyarith"))
        .args(args)
        .env("CYARITH_CACHE", cache)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(cache: &Path, args: &[&str]) -> Value {
    let (code, out, err) = run(cache, args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn spec_examples() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(dir.path(), &["ap", "--family", "4", "--twist", "1", "--bound", "7"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["request"]["subcommand"], "ap");
    assert_eq!(v["result"]["coefficients"], serde_json::json!({"3": 0, "5": -2, "7": 0}));
    let v = json(dir.path(), &["threefold", "--family", "4", "--twists", "1,1,1", "--bound", "5"]);
    assert_eq!(v["result"]["coefficients"]["5"], 22);
    let v = json(dir.path(), &["qexp", "--family", "7", "--power", "3", "--bound", "50"]);
    assert_eq!(v["result"]["level"], 49);
    let v = json(dir.path(), &["hodge", "--family", "4", "--gens", "1,3,0;1,0,3"]);
    assert_eq!((v["result"]["h11"].as_u64(), v["result"]["h21"].as_u64()), (Some(90), Some(0)));
    assert_eq!(v["result"]["rigid"], true);
    let v = json(dir.path(), &["yui", "--family", "6", "--twists", "2,2,2"]);
    assert_eq!(v["result"]["holds"], true);
    assert_eq!(v["result"]["total_twist"], 8);
    let v = json(dir.path(), &["classify", "--family", "6"]);
    assert_eq!(v["result"]["classes"].as_array().unwrap().len(), 9);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["hodge", "--family", "6", "--gens", "3,3,0"]).0, 3);
    assert_eq!(run(dir.path(), &["threefold", "--family", "4", "--twists", "1,1", "--bound", "5"]).0, 2);
    assert_eq!(run(dir.path(), &["threefold", "--family", "4", "--twists", "0,1,1", "--bound", "5"]).0, 2);
    assert_eq!(run(dir.path(), &["nonsense"]).0, 2);
    assert_eq!(run(dir.path(), &["yui", "--family", "4", "--twists", "2", "--n", "6"]).0, 3);
    assert_eq!(run(dir.path(), &["waldspurger", "--dlist", "9"]).0, 0);
    let (code, _, err) = run(dir.path(), &["ap", "--family", "5", "--bound", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("family"));
}

#[test]
fn deterministic_and_cache_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["threefold", "--family", "6", "--twists", "2^1,-3^2,1", "--bound", "400"];
    let (_, cold, _) = run(dir.path(), &args);
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let (_, warm, _) = run(dir.path(), &args);
    let nocache = tempfile::tempdir().unwrap();
    let (_, bypass, _) = run(nocache.path(), &[&args[..], &["--no-cache"]].concat());
    assert_eq!(cold, warm);
    assert_eq!(cold, bypass);
    assert_eq!(std::fs::read_dir(nocache.path()).unwrap().count(), 0);
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(dir.path(), &["threefold", "--family", "4", "--bound", "5", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "# weight=3 level=32");
    assert_eq!(lines[1], "n,a_n");
    assert_eq!(lines[6], "5,22");
    assert_eq!(run(dir.path(), &["yui", "--family", "4", "--twists", "1,1,1", "--format", "csv"]).0, 2);
}

#[test]
fn lvalue_and_waldspurger() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(dir.path(), &["lvalue", "--family", "4", "--power", "1", "--twists", "1", "--s", "1"]);
    let re = v["result"]["values"][0]["value"]["re"].as_f64().unwrap();
    assert!((re - 0.655_514_388_57).abs() < 1e-10);
    let v = json(dir.path(), &["waldspurger", "--dlist", "3,11,19"]);
    assert!(v["result"]["f2"]["max_relative_deviation"].as_f64().unwrap() < 1e-10);
}
