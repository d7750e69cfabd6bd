use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rectangulations::fixtures;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rectangulations"));
    cmd.env_remove("RECTANGULATIONS_CACHE_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn enumerate_small_sets() {
    let one = run(&["enumerate", "--perm", "1"]);
    assert_eq!(one.status.code(), Some(0));
    let lines: Vec<_> = stdout(&one).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2], r#"{"summary":{"count":2,"perm":[1]}}"#);

    let two = run(&["enumerate", "--perm", "1 2"]);
    assert_eq!(stdout(&two).lines().count(), 7);
}

#[test]
fn filter_finds_the_pinwheel() {
    let out = run(&["enumerate", "--perm", "2 4 1 3", "--filter", "d2=0"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    let pin = fixtures::pinwheel().canonical_key();
    let d2_zero: Vec<&str> = lines[..lines.len() - 1].to_vec();
    assert!(d2_zero.contains(&pin.as_str()));
    // each windmill segment stops on exactly one other segment
    for key in &d2_zero {
        assert_eq!(key.matches("seg:").count(), 4, "{key}");
    }
    assert_eq!(run(&["enumerate", "--perm", "1", "--filter", "deg"]).status.code(), Some(2));
}

#[test]
fn oracle_matches_enumerate() {
    for perm in ["2 4 1 3", "3 1 2"] {
        let a = run(&["enumerate", "--perm", perm]);
        let b = run(&["oracle", "--perm", perm]);
        assert_eq!(a.stdout, b.stdout);
    }
    assert_eq!(run(&["oracle", "--perm", "1 2 3 4 5"]).status.code(), Some(3));
}

#[test]
fn verify_eq2_on_two_points() {
    let out = run(&["verify", "--perm", "1 2", "--eq2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["checks"]["eq2"]["lhs"], 8);
    assert_eq!(r["checks"]["eq2"]["rhs"], 8);
    assert_eq!(r["pass"], true);
}

#[test]
fn verify_oracle_crosscheck() {
    let out = run(&["verify", "--all-perms", "3", "--oracle-crosscheck"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["checks"]["oracle_crosscheck"]["checked"], 6);
}

#[test]
fn verify_scheme_a_with_ledger_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("ledger.csv");
    let sweep = dir.path().join("sweep.csv");
    let out = run(&[
        "verify",
        "--all-perms",
        "4",
        "--scheme",
        "A",
        "--ledger",
        ledger.to_str().unwrap(),
        "--sweep",
        sweep.to_str().unwrap(),
        "--witness-dir",
        dir.path().join("w").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let r = report(&out);
    assert_eq!(r["checks"]["scheme"]["maxCharge"], "9");
    let ledger = fs::read_to_string(&ledger).unwrap();
    assert!(ledger.starts_with("rectKey,point,stage,charge\n"));
    let sweep = fs::read_to_string(&sweep).unwrap();
    assert!(sweep.starts_with(
        "perm,rc,d2sum,dhat2_num,dhat2_den,eq2_lhs,eq2_rhs,maxChargeA_num,maxChargeA_den,maxChargeB_num,maxChargeB_den,eq2_pass,schemeA_pass,schemeB_pass\n"
    ));
    assert_eq!(sweep.lines().count(), 25);
    assert!(!dir.path().join("w").exists());
}

#[test]
fn verify_scheme_b_reports_its_violations() {
    // The quarter move keeps the maximum at 17/2 for n = 4, but charge-9
    // donors with an extendability of 1 exist, so the run must fail loudly.
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w");
    let out = run(&["verify", "--all-perms", "4", "--scheme", "B", "--witness-dir", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["checks"]["scheme"]["maxCharge"], "17/2");
    let failures = r["checks"]["scheme"]["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    assert_eq!(failures[0]["violations"][0]["kind"], "donor_extendability");
    assert!(w.join("scheme-B-1-2-3-4.json").exists());
}

#[test]
fn recurrence_needs_a_sweep() {
    assert_eq!(run(&["verify", "--perm", "1 2", "--recurrence"]).status.code(), Some(2));
    let out = run(&["verify", "--all-perms", "4", "--recurrence"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = report(&out)["checks"]["recurrence"]["rows"].as_array().unwrap().clone();
    let maxima: Vec<u64> = rows.iter().map(|r| r["max_rc"].as_u64().unwrap()).collect();
    assert_eq!(maxima, [2, 6, 22, 93]);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["enumerate"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--perm", "1 1"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--points-file", "/nonexistent/points"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--perm", "1", "--all-perms", "2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--perm", "1"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--all-perms", "9"]).status.code(), Some(3));
    assert_eq!(run(&["count", "--perm", "1 2 3 4", "--max-n", "3"]).status.code(), Some(3));
    assert_eq!(run(&["enumerate", "--perm", "1", "--seed", "7"]).status.code(), Some(0));
}

#[test]
fn points_file_forms() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pts.json");
    fs::write(&file, r#"{"points":[[0.5, 10.0], [2.25, -3.0], [9.0, 4.0]]}"#).unwrap();
    let a = run(&["count", "--points-file", file.to_str().unwrap()]);
    assert_eq!(stdout(&a), "perm,rc,maxDegree,d2min\n3 1 2,22,4,1\n");
}

#[test]
fn count_with_symmetry_reduction() {
    let out = run(&["count", "--all-perms", "4", "--symmetry"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("perm,rc,maxDegree,d2min,orbitSize"));
    let orbits: usize = lines.map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(orbits, 24);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    for args in [
        vec!["enumerate", "--all-perms", "4"],
        vec!["count", "--all-perms", "5"],
        vec!["verify", "--all-perms", "4", "--scheme", "A", "--eq2"],
        vec!["render", "--perm", "2 5 3 1 4", "--index", "17"],
    ] {
        let mut one = args.clone();
        one.extend(["--workers", "1"]);
        let mut many = args.clone();
        many.extend(["--workers", "4"]);
        assert_eq!(run(&one).stdout, run(&many).stdout, "{args:?}");
    }
}

#[test]
fn render_selectors() {
    let key = fixtures::pinwheel().canonical_key();
    let by_key = run(&["render", "--perm", "2 4 1 3", "--key", key.as_str(), "--scale", "10"]);
    assert_eq!(by_key.status.code(), Some(0));
    let svg = stdout(&by_key);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<line").count(), 4);
    assert_eq!(svg.matches("<text").count(), 4);

    let plain = run(&["render", "--perm", "1", "--index", "1", "--no-labels"]);
    assert!(!stdout(&plain).contains("<text"));
    assert_eq!(run(&["render", "--perm", "1", "--index", "3"]).status.code(), Some(2));
    assert_eq!(run(&["render", "--perm", "1", "--key", "[]"]).status.code(), Some(2));
}

fn cached_run(dir: &Path) -> Output {
    bin().args(["verify", "--all-perms", "4", "--eq2"]).env("RECTANGULATIONS_CACHE_DIR", dir).output().unwrap()
}

#[test]
fn cache_does_not_change_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cold = cached_run(dir.path());
    assert!(dir.path().join("rc-cache.json").exists());
    let warm = cached_run(dir.path());
    assert_eq!(cold.status.code(), Some(0));
    assert_eq!(cold.stdout, warm.stdout);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dump.jsonl");
    let out = run(&["enumerate", "--perm", "1 2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(path).unwrap().lines().count(), 7);
}
