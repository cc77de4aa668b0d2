use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cartcube(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartcube")).args(args).env_remove("CARTCUBE_BUDGET").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read(path: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exit_codes_follow_verdicts() {
    assert_eq!(code(&cartcube(&["check", "binomial", "--trunc", "2"])), 0);
    assert_eq!(code(&cartcube(&["check", "binomial", "--trunc", "0"])), 3);
    assert_eq!(code(&cartcube(&["check", "no-such-check"])), 3);
    assert_eq!(code(&cartcube(&["tfib-check", "--map", &data("delta0.json"), "--trunc", "2"])), 1);
    assert_eq!(code(&cartcube(&["tfib-check", "--map", &data("delta0.json"), "--trunc", "1"])), 3);
    assert_eq!(code(&cartcube(&["check", "axioms", "--budget", "10"])), 2);
    assert_eq!(code(&cartcube(&["pi0", "/nonexistent.json"])), 3);
}

#[test]
fn environment_budget_applies_when_no_flag_is_given() {
    let o = Command::new(env!("CARGO_BIN_EXE_cartcube"))
        .args(["check", "axioms"])
        .env("CARTCUBE_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_cartcube"))
        .args(["check", "axioms", "--budget", "50000000"])
        .env("CARTCUBE_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn json_reports_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = cartcube(&["check", "universe-omega", "--trunc", "1", "--json", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = read(&out);
    assert_eq!(r["verdict"], "PASS");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["counters"]["cells_at_1"], 5);
}

#[test]
fn certificates_replay_and_detect_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let o = cartcube(&["fib-check", "--map", &data("two-points-to-point.json"), "--cert", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(code(&cartcube(&["verify", cert.to_str().unwrap()])), 0);

    let mut c = read(&cert);
    let sol = c["solution"].as_object_mut().unwrap();
    let table = sol.values_mut().find(|t| !t.as_array().unwrap().is_empty()).unwrap();
    let v = table[0].as_u64().unwrap();
    table[0] = Value::from(if v == 0 { 1 } else { 0 });
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, c.to_string()).unwrap();
    assert_eq!(code(&cartcube(&["verify", bad.to_str().unwrap()])), 1);

    let mut c = read(&cert);
    c["problem_digest"] = Value::from("00");
    std::fs::write(&bad, c.to_string()).unwrap();
    assert_eq!(code(&cartcube(&["verify", bad.to_str().unwrap()])), 3);
}

#[test]
fn trivial_fibration_certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("t.json");
    let args = ["tfib-check", "--map", &data("codiscrete-onto.json"), "--class", "all-monos", "--trunc", "2"];
    let o = cartcube(&[&args[..], &["--cert", cert.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0);
    assert_eq!(code(&cartcube(&["verify", cert.to_str().unwrap()])), 0);
}

#[test]
fn factor_writes_factors() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let o = cartcube(&[
        "factor",
        "--map",
        &data("two-points-to-point.json"),
        "--system",
        "tcof-fib",
        "--factors",
        f.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let j = read(&f);
    assert!(j["left"]["components"].is_object() && j["right"]["components"].is_object());
    assert_eq!(code(&cartcube(&["factor", "--map", &data("delta0.json"), "--system", "cof-tfib"])), 0);
    assert_eq!(code(&cartcube(&["factor", "--map", &data("delta0.json"), "--system", "other"])), 3);
}

#[test]
fn components_nerves_and_universes() {
    let o = cartcube(&["pi0", &data("interval.json")]);
    assert!(stdout(&o).contains("components=1"));
    let o = cartcube(&["pi0", &data("two-points.json")]);
    assert!(stdout(&o).contains("components=2"));
    let o = cartcube(&["nerve", "--cat", &data("arrow.json"), "--site", "cube:2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("cells_at_2=6"));
    assert_eq!(code(&cartcube(&["nerve", "--cat", &data("arrow.json"), "--site", "simplex"])), 3);
    assert_eq!(code(&cartcube(&["universe", "--alpha", "2", "--check", "omega", "--trunc", "1"])), 0);
    assert_eq!(code(&cartcube(&["universe", "--alpha", "3", "--check", "omega"])), 3);
}

#[test]
fn weak_equivalences_against_a_test_directory() {
    let o = cartcube(&["whe", "--map", &data("interval-to-point.json"), "--tests", &data("tests")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn root_adjunction_from_files() {
    let o = cartcube(&["check", "root-adjunction", "--lhs", &data("interval-n1.json"), "--rhs", &data("point-n1.json")]);
    assert_eq!(code(&o), 0);
    let o = cartcube(&["check", "root-adjunction", "--lhs", &data("interval-n1.json"), "--rhs", &data("interval.json")]);
    assert_eq!(code(&o), 3);
}

#[test]
fn suites_are_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"defaults": {"trunc": 2, "seed": 5}, "checks": ["binomial", {"name": "pi0-products", "samples": 8}, {"name": "leibniz", "samples": 6}]}"#,
    )
    .unwrap();
    let mut digests = Vec::new();
    for workers in ["1", "4", "1"] {
        let out = dir.path().join(format!("s{workers}.json"));
        let o = cartcube(&[
            "suite",
            "--manifest",
            manifest.to_str().unwrap(),
            "--workers",
            workers,
            "--json",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        let r = read(&out);
        assert_eq!(r["reports"][0]["check"], "binomial");
        assert_eq!(r["reports"][2]["check"], "leibniz");
        digests.push(r["digests"].clone());
    }
    assert_eq!(digests[0], digests[1]);
    assert_eq!(digests[0], digests[2]);
}
