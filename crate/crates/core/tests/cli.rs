use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const PATH3: &str = "p dmc 3 2 1\na 1 2\na 2 3\n";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn arbor(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_arbor"))
        .args(args)
        .env_remove("ARBOR_SEED")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&raw).unwrap()
}

fn assert_valid(name: &str, text: &str) -> Value {
    let v: Value = serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"));
    let errors: Vec<String> = schema(name).iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name} schema: {errors:?} for {text}");
    v
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exact_mincut_of_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let path3 = write(dir.path(), "path3.dmc", PATH3);
    let r = arbor(&["mincut", s(&path3), "--exact"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = assert_valid("mincut", &r.stdout);
    assert_eq!(v["value"], 1);
}

#[test]
fn pack_path_above_connectivity_gives_cut_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path3 = write(dir.path(), "path3.dmc", PATH3);
    let r = arbor(&["pack", s(&path3), "--k", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = assert_valid("packing", &r.stdout);
    assert_eq!(v["outcome"], "cut");
    assert_eq!(v["delta"], 1);
    assert!(v["side"].as_array().unwrap().contains(&Value::from(0)));

    let result = write(dir.path(), "pack.json", &r.stdout);
    let ver = arbor(&["verify", s(&result), s(&path3)]);
    assert_eq!(ver.code, 0, "{}", ver.stdout);
    assert_eq!(assert_valid("verification", &ver.stdout)["ok"], true);
}

#[test]
fn every_report_validates_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let gen = arbor(&["gen", "known_packing", "--n", "9", "--k", "2", "--extra", "4", "--seed", "3"]);
    assert_eq!(gen.code, 0);
    let input = write(dir.path(), "kp.dmc", &gen.stdout);

    let h = arbor(&["hierarchy", s(&input), "--seed", "5"]);
    assert_valid("hierarchy", &h.stdout);
    let m = arbor(&["mincut", s(&input), "--compare", "--verbose", "--seed", "5"]);
    let mv = assert_valid("mincut", &m.stdout);
    assert!(mv["value"].as_u64().unwrap() >= mv["exact"].as_u64().unwrap());
    let p = arbor(&["pack", s(&input), "--k", "2", "--seed", "5"]);
    assert_eq!(assert_valid("packing", &p.stdout)["outcome"], "arborescences");

    for (name, out) in [("h.json", &h.stdout), ("m.json", &m.stdout), ("p.json", &p.stdout)] {
        let f = write(dir.path(), name, out);
        let ver = arbor(&["verify", s(&f), s(&input)]);
        assert_eq!(ver.code, 0, "{name}: {}", ver.stdout);
        assert_eq!(assert_valid("verification", &ver.stdout)["ok"], true);
    }
}

#[test]
fn verify_rejects_a_tampered_result() {
    let dir = tempfile::tempdir().unwrap();
    let path3 = write(dir.path(), "path3.dmc", PATH3);
    let forged = r#"{"kind":"mincut","method":"approx","value":0,"cut":[2]}"#;
    let f = write(dir.path(), "forged.json", forged);
    let r = arbor(&["verify", s(&f), s(&path3)]);
    assert_eq!(r.code, 1);
    let v = assert_valid("verification", &r.stdout);
    assert_eq!(v["ok"], false);
}

#[test]
fn bench_emits_one_valid_record_per_instance() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.dmc", PATH3);
    write(dir.path(), "b.dmc", "p dmc 3 3 1\na 1 2 4\na 2 3 2\na 3 2 7\n");
    write(dir.path(), "notes.txt", "ignored");
    let r = arbor(&["bench", s(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    let a = assert_valid("bench", lines[0]);
    let b = assert_valid("bench", lines[1]);
    assert_eq!((a["instance"].as_str(), b["instance"].as_str()), (Some("a.dmc"), Some("b.dmc")));
    assert_eq!(b["pack_outcome"], "unsupported");
    assert!(a.get("wall_ms").is_none());
    let timed = arbor(&["bench", s(dir.path()), "--timing"]);
    assert!(assert_valid("bench", timed.stdout.lines().next().unwrap())["wall_ms"].is_number());
}

#[test]
fn gen_output_round_trips_through_the_parser() {
    let a = arbor(&["gen", "random_gnm", "--n", "10", "--m", "30", "--seed", "7"]);
    let b = arbor(&["gen", "random_gnm", "--n", "10", "--m", "30", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let parsed = arbor::io::parse_graph(&a.stdout).unwrap();
    let body: String = a.stdout.lines().filter(|l| !l.starts_with('c')).map(|l| format!("{l}\n")).collect();
    assert_eq!(arbor::io::serialize_graph(&parsed.graph), body);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.dmc", &arbor(&["gen", "random_gnm", "--n", "12", "--m", "40"]).stdout);
    let run = |seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_arbor"))
            .args(["mincut", s(&input)])
            .env("ARBOR_SEED", seed)
            .output()
            .unwrap();
        serde_json::from_slice::<Value>(&out.stdout).unwrap()["seed"].clone()
    };
    assert_eq!(run("42"), 42);
    let explicit = arbor(&["mincut", s(&input), "--seed", "42"]);
    assert_eq!(serde_json::from_str::<Value>(&explicit.stdout).unwrap()["seed"], 42);
}

#[test]
fn error_exit_codes_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.dmc", "p dmc 2 1 1\na 1 2 0\n");
    let path3 = write(dir.path(), "path3.dmc", PATH3);
    let weighted = write(dir.path(), "w.dmc", "p dmc 2 1 1\na 1 2 3\n");

    let parse = arbor(&["mincut", s(&bad)]);
    assert_eq!(parse.code, 2);
    let e = assert_valid("error", &parse.stderr);
    assert_eq!(e["error"], "parse");
    assert!(parse.stdout.is_empty());

    assert_eq!(arbor(&["pack", s(&path3), "--k", "0"]).code, 2);
    assert_eq!(arbor(&["mincut", s(&path3), "--phi", "3/4"]).code, 2);
    assert_eq!(arbor(&["hierarchy", "/definitely/missing.dmc"]).code, 2);

    let unsupported = arbor(&["pack", s(&weighted), "--k", "1"]);
    assert_eq!(unsupported.code, 1);
    assert_eq!(assert_valid("error", &unsupported.stderr)["error"], "unsupported");
}

#[test]
fn dropped_arcs_are_reported_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "loops.dmc", "p dmc 3 4 1\na 1 2\na 2 2\na 3 1\na 2 3\n");
    let r = arbor(&["mincut", s(&g), "--exact"]);
    assert_eq!(r.code, 0);
    assert!(r.stderr.contains("1 self-loop(s) and 1 arc(s) into the source"), "{}", r.stderr);
    assert_valid("mincut", &r.stdout);
}
