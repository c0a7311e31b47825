use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name).to_string_lossy().into_owned()
}

fn run_in(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitchin-count"))
        .args(args)
        .env("HITCHIN_COUNT_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn euler_prints_both_paths() {
    let o = run(&["euler", "2", "2", "2", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.matches("-32").count(), 2, "{out}");
    let j = json(&run(&["--json", "euler", "2", "2", "2", "1"]));
    assert_eq!(j["schema"], "hitchin-count/v1");
    assert_eq!(j["from_betti"], "-32");
    assert_eq!(j["closed_form"], "-32");
}

#[test]
fn universal_rank_one_genus_zero() {
    let o = run(&["universal", "0", "1", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "z^2");
}

#[test]
fn selfcheck_quick_is_green() {
    let o = run(&["selfcheck", "--level", "quick"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("[PASS]")));
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        &["--json", "universal", "2", "2", "1"][..],
        &["--json", "twisted", "2", "2", "1", "2", "1", "--quotient"][..],
        &["--json", "poincare", "1", "2", "1", "1"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

fn cache_files(dir: &Path) -> Vec<PathBuf> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect()
}

#[test]
fn cache_round_trip_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--json", "universal", "1", "2", "1"];
    let first = run_in(dir.path(), &args);
    assert!(first.status.success());
    let files = cache_files(dir.path());
    assert_eq!(files.len(), 1);
    let second = run_in(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout);
    assert!(run_in(dir.path(), &["--verify-cache", "universal", "1", "2", "1"]).status.success());

    // a well-formed entry holding the wrong polynomial
    let mut entry: Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
    entry["value"]["terms"][0]["c"] = Value::String("7".into());
    let hash = hex::encode(Sha256::digest(entry["value"].to_string().as_bytes()));
    entry["hash"] = Value::String(hash);
    std::fs::write(&files[0], entry.to_string()).unwrap();
    let stale = run_in(dir.path(), &args);
    assert_ne!(stale.stdout, first.stdout);
    let verified = run_in(dir.path(), &["--verify-cache", "universal", "1", "2", "1"]);
    assert_eq!(verified.status.code(), Some(2));
}

#[test]
fn explicit_cache_dir_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let other = tempfile::tempdir().unwrap();
    let dir_arg = dir.path().to_string_lossy().into_owned();
    let o = run_in(other.path(), &["--cache-dir", &dir_arg, "twisted", "1", "2", "1", "2", "0"]);
    assert!(o.status.success());
    assert_eq!(cache_files(dir.path()).len(), 1);
    assert!(cache_files(other.path()).is_empty());
}

#[test]
fn counts_from_fixtures() {
    let o = run(&["count-m", &fixture("elliptic_f2.json"), "1", "0", "1", "1"]);
    assert_eq!(stdout(&o).trim(), "6");
    let j = json(&run(&["--json", "count-m", &fixture("elliptic_f2.json"), "2", "1", "1", "2", "--numeric"]));
    let exact = json(&run(&["--json", "count-m", &fixture("elliptic_f2.json"), "2", "1", "1", "2"]));
    assert_eq!(j["count"]["value"], exact["count"]["value"]);
    assert_eq!(j["count"]["exact"], false);

    let (w, c) = (fixture("genus1_f7.json"), fixture("genus1_f7_rank2_cover.json"));
    let j = json(&run(&["--json", "count-n", &w, &c, "2", "1", "1", "1"]));
    assert_eq!(j["fixed_determinant"]["value"], "3087");
    assert_eq!(j["trace_zero"]["value"], "441");
    let o = run(&["--json", "compare", &w, &c, "2", "1", "2", "1"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["agree"], true);
}

#[test]
fn oracle_subcommand() {
    let j = json(&run(&["--json", "oracle", "p1", "--q", "2", "--n", "2", "--e", "1", "--degD", "0"]));
    let u = json(&run(&["universal", "0", "2", "2", "--json"]));
    assert!(j["total"].is_string());
    assert!(u["poly"].is_object());
    assert_eq!(stdout(&run(&["oracle", "p1", "--q", "2", "--n", "1", "--e", "0", "--degD", "-1"])).trim(), "1");
}

#[test]
fn validation_errors_exit_with_one() {
    let o = run(&["count-m", &fixture("elliptic_f2.json"), "2", "2", "1", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(o.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"]["kind"], "invalid_input");

    let o = run(&["--json", "count-m", "/nonexistent/weil.json", "1", "0", "1", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"]["kind"], "io");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"q":2,"g":1,"zeta_numerator":[1,3,2]}"#).unwrap();
    let o = run(&["--json", "count-m", &bad.to_string_lossy(), "1", "0", "1", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"]["kind"], "root_modulus_violated");

    assert_eq!(
        run(&["--prec-bits", "32", "count-m", &fixture("elliptic_f2.json"), "1", "0", "1", "1"]).status.code(),
        Some(1)
    );
}
