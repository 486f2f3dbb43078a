use std::path::{Path, PathBuf};
use std::process::Command;

use digicat::cli::{self, EXIT_CAP, EXIT_INVALID, EXIT_OK, EXIT_PARSE, EXIT_UNVERIFIED};
use serde_json::Value;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["digicat"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json(args: &[&str]) -> (i32, Value) {
    let r = run(args);
    (r.code, serde_json::from_str(&r.out).unwrap_or(Value::Null))
}

fn crate_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(crate_path("tests/golden").join(name)).unwrap()
}

#[test]
fn space_documents() {
    let (code, doc) = json(&["space", "pps:1,2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["points"].as_array().unwrap().len(), 12);
    assert_eq!(doc["quotient"]["classes"].as_array().unwrap().len(), 12);
    assert_eq!(doc["quotient"]["base"]["points"].as_array().unwrap().len(), 24);

    let (code, doc) = json(&["space", "sphere:0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["points"].as_array().unwrap().len(), 2);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 0);
}

#[test]
fn space_errors() {
    assert_eq!(run(&["space", "pps:2,1"]).code, EXIT_INVALID);
    assert_eq!(run(&["space", "proj:0"]).code, EXIT_INVALID);
    assert_eq!(run(&["space", "torus:2"]).code, EXIT_PARSE);
    assert_eq!(run(&["space", "pps:1,x"]).code, EXIT_PARSE);
    assert_eq!(run(&["frobnicate"]).code, EXIT_PARSE);
    assert_eq!(run(&["plan", "bogus", "proj:1"]).code, EXIT_PARSE);
    let r = run(&["space", "pps:2,1"]);
    assert!(r.err.contains("nondecreasing"), "{}", r.err);
    assert!(r.out.is_empty());
}

#[test]
fn golden_outputs() {
    assert_eq!(run(&["space", "proj:2"]).out, golden("space_proj_2.json"));
    assert_eq!(run(&["oracle", "tc", "sphere:0"]).out, golden("oracle_tc_sphere_0.json"));
    let scenario = crate_path("scenarios/reference.toml");
    let scenario = scenario.to_str().unwrap();
    assert_eq!(run(&["report", scenario]).out, golden("report_reference.md"));
    assert_eq!(run(&["report", scenario, "--format", "csv"]).out, golden("report_reference.csv"));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["space", "pps:1,1,1"],
        vec!["plan", "cat", "pps:1,2"],
        vec!["plan", "tc", "proj:2"],
        vec!["plan", "tc", "pps:2,2"],
        vec!["oracle", "cat", "complete:4"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.code, b.code);
        assert_eq!(a.out, b.out, "{args:?}");
    }
}

#[test]
fn plan_exit_codes() {
    let (code, cert) = json(&["plan", "cat", "pps:1,2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(cert["bound"], 2);
    assert_eq!(cert["verified"], true);

    let (code, cert) = json(&["plan", "tc", "proj:2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(cert["bound"], 3);

    // unverified constructions still print their report
    let (code, cert) = json(&["plan", "tc", "pps:1,1"]);
    assert_eq!(code, EXIT_UNVERIFIED);
    assert_eq!(cert["verified"], false);
    assert!(cert["report"]["checks"].as_array().unwrap().iter().any(|c| c["pass"] == false));

    // no single-piece planner exists on two points
    assert_eq!(run(&["plan", "tc", "sphere:0"]).code, EXIT_UNVERIFIED);
    assert_eq!(run(&["plan", "cat", "pps:1,2", "--schedule", "sideways"]).code, EXIT_PARSE);
}

#[test]
fn schedules() {
    assert_eq!(run(&["plan", "cat", "pps:1,2", "--schedule", "sequential"]).code, EXIT_OK);
    assert_eq!(run(&["plan", "cat", "pps:1,1,1", "--schedule", "sequential"]).code, EXIT_UNVERIFIED);
    assert_eq!(run(&["plan", "cat", "pps:1,1,1"]).code, EXIT_OK);
}

#[test]
fn doubled_cover_bound() {
    let (code, cert) = json(&["plan", "tc", "proj:1", "--doubled"]);
    assert_eq!(code, EXIT_OK);
    let (_, cat) = json(&["plan", "cat", "proj:1"]);
    assert_eq!(cert["bound"], 2 * cat["bound"].as_u64().unwrap());
}

#[test]
fn theta_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("theta.json");
    let t = digicat::spaces::theta_for(2).unwrap();
    std::fs::write(&good, serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(run(&["plan", "tc", "proj:2", "--theta", good.to_str().unwrap()]).code, EXIT_OK);

    // a vanishing component makes the map singular
    let singular = dir.path().join("singular.json");
    std::fs::write(&singular, r#"{"components": [[[0,0,0],[0,0,0],[0,0,0]]]}"#).unwrap();
    assert_eq!(run(&["plan", "tc", "proj:2", "--theta", singular.to_str().unwrap()]).code, EXIT_INVALID);

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ components").unwrap();
    assert_eq!(run(&["plan", "tc", "proj:2", "--theta", broken.to_str().unwrap()]).code, EXIT_PARSE);
}

#[test]
fn verify_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("cert.json");
    let cert_str = cert_path.to_str().unwrap();
    let r = run(&["plan", "cat", "pps:1,2", "--out", cert_str]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.is_empty());

    let (code, report) = json(&["verify", cert_str]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(report["verified"], true);

    // a bare cover document verifies the same way
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    let cover_path = dir.path().join("cover.json");
    std::fs::write(&cover_path, serde_json::to_string(&cert["cover"]).unwrap()).unwrap();
    assert_eq!(run(&["verify", cover_path.to_str().unwrap()]).code, EXIT_OK);

    let mut tampered = cert["cover"].clone();
    tampered["pieces"][0]["members"][0] = Value::from(11);
    let bad = dir.path().join("tampered.json");
    std::fs::write(&bad, serde_json::to_string(&tampered).unwrap()).unwrap();
    assert_eq!(run(&["verify", bad.to_str().unwrap()]).code, EXIT_UNVERIFIED);

    let mut overclaimed = cert["cover"].clone();
    overclaimed["bound"] = Value::from(1);
    std::fs::write(&bad, serde_json::to_string(&overclaimed).unwrap()).unwrap();
    let (code, report) = json(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_UNVERIFIED);
    assert_eq!(report["checks"][0]["name"], "declared_bound");
    assert_eq!(report["checks"][0]["pass"], false);

    std::fs::write(&bad, "[1, 2").unwrap();
    assert_eq!(run(&["verify", bad.to_str().unwrap()]).code, EXIT_PARSE);
}

#[test]
fn oracle_commands() {
    let (code, r) = json(&["oracle", "cat", "sphere:0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r["value"], 1);
    assert_eq!(r["inconclusive_queries"], 0);
    assert_eq!(run(&["oracle", "tc", "sphere:2"]).code, EXIT_CAP);
    assert_eq!(run(&["oracle", "cat", "sphere:1", "--cap", "2"]).code, EXIT_CAP);
}

fn report(dir: &Path, name: &str, body: &str, extra: &[&str]) -> Run {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    let mut args = vec!["report", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn report_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let empty = report(dir.path(), "empty.toml", "", &[]);
    assert_eq!(empty.code, EXIT_OK);
    assert_eq!(empty.out.lines().count(), 2, "{}", empty.out);

    let over = report(
        dir.path(),
        "over.toml",
        "[[row]]\nspace = \"pps:1,2\"\nplan = [\"cat\"]\noracle = [\"cat\"]\n",
        &[],
    );
    assert_eq!(over.code, EXIT_OK);
    let cells: Vec<&str> = over.out.lines().nth(2).unwrap().split('|').map(str::trim).collect();
    assert_eq!(cells[5], "range");

    let js = report(
        dir.path(),
        "js.toml",
        "[[row]]\nspace = \"pps:1,2\"\nplan = [\"cat\"]\noracle = [\"cat\"]\n",
        &["--format", "json"],
    );
    let v: Value = serde_json::from_str(&js.out).unwrap();
    assert_eq!(v["rows"][0]["cat_oracle"]["lower"], 0);
    assert_eq!(v["rows"][0]["cat_oracle"]["upper"], 2);

    assert_eq!(report(dir.path(), "bad.toml", "[[row]\n", &[]).code, EXIT_PARSE);
    assert_eq!(report(dir.path(), "unknown.toml", "[[row]]\nspace = \"point\"\ncolour = 1\n", &[]).code, EXIT_PARSE);
    assert_eq!(report(dir.path(), "invalid.toml", "[[row]]\nspace = \"pps:3,1\"\n", &[]).code, EXIT_INVALID);
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_digicat"))
}

#[test]
fn flags_override_environment() {
    let status = |cmd: &mut Command| cmd.output().unwrap().status.code().unwrap();
    let base = ["oracle", "cat", "sphere:1"];
    assert_eq!(status(binary().args(base).env_remove("DIGICAT_CAP")), EXIT_OK);
    assert_eq!(status(binary().args(base).env("DIGICAT_CAP", "2")), EXIT_CAP);
    assert_eq!(status(binary().args(base).args(["--cap", "8"]).env("DIGICAT_CAP", "2")), EXIT_OK);
    assert_eq!(status(binary().args(base).env("DIGICAT_BUDGET", "lots")), EXIT_PARSE);
}

#[test]
fn binary_writes_stdout_and_exit_code() {
    let out = binary().args(["space", "proj:2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("space_proj_2.json"));
    let out = binary().args(["space", "pps:2,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
}
