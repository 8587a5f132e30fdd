use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn spec(name: &str) -> String {
    corpus().join(format!("{name}.spec")).display().to_string()
}

fn blockext(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_blockext"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn run_ok(args: &[&str]) -> Value {
    let out = blockext(args, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    json(&out)
}

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn validate_reports_structure() {
    let v = run_ok(&["validate", &spec("inverting_c3")]);
    assert_eq!(v["z_order"], 2);
    assert_eq!(v["d1"], "C_3");
    assert_eq!(v["assumption_holds"], true);
}

#[test]
fn validate_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let not_auto = write_spec(
        dir.path(),
        "bad.spec",
        "format: 1\n[block]\np: 3\ndefect: 1\n[complement]\ndegree: 2\ngenerator: (0 1)\n[action]\nmatrix: 3\n",
    );
    let out = blockext(&["validate", &not_auto], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "ActionInvalid");

    let garbled = write_spec(dir.path(), "garbled.spec", "format: 1\n[block]\np: three\n");
    let out = blockext(&["validate", &garbled], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = &json(&out)["error"];
    assert_eq!((err["line"].as_u64(), err["column"].as_u64()), (Some(3), Some(4)));
}

#[test]
fn c2_factor_is_flagged_and_classification_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), "c2.spec", "format: 1\n[block]\np: 2\ndefect: 1 2\n[complement]\n[action]\n");
    let v = run_ok(&["validate", &path]);
    assert_eq!(v["assumption_holds"], false);
    assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
    let out = blockext(&["goodsets", &path], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "AssumptionViolated");
}

#[test]
fn chars_decomposition() {
    let v = run_ok(&["chars", &spec("inverting_c3")]);
    assert_eq!(v["decomposition_matrix"], serde_json::json!([[1, 0], [0, 1], [1, 1]]));
    assert_eq!(v["degree_check"], true);
    let v = run_ok(&["chars", &spec("pure_c9")]);
    assert_eq!(v["characters"].as_array().unwrap().len(), 9);
    let v = run_ok(&["chars", &spec("rotating_c4_squared")]);
    assert_eq!(v["degree_square_sum"], 48);
}

#[test]
fn ext_classes() {
    let a = spec("inverting_c3");
    for (first, second) in [("2", "2"), ("0", "1")] {
        let v = run_ok(&["ext", &a, first, second, "--mode", "crosscheck"]);
        assert_eq!(v["class"]["pretty"], "O/p");
        assert_eq!(v["class"]["torsion"], serde_json::json!([{"num": 1, "den": 1}]));
    }
    let v = run_ok(&["ext", &a, "0", "0", "--degree", "0"]);
    assert_eq!(v["class"]["free_rank"], 1);
    let out = blockext(&["ext", &a, "0", "9"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn goodsets_counts() {
    for (name, count) in [("inverting_c3", 1), ("inverting_c3_times_c3", 3), ("rotating_c4_squared", 1)] {
        let v = run_ok(&["goodsets", &spec(name)]);
        assert_eq!(v["holds"], true);
        assert_eq!(v["good_sets"].as_array().unwrap().len(), count);
        assert_eq!(v["predicted"].as_array().unwrap().len(), count);
    }
}

#[test]
fn resource_bounds_exit_3() {
    let b = spec("inverting_c3_times_c3");
    let out = blockext(&["goodsets", &b], &[("BLOCKEXT_ENUM_BOUND", "8")]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["error"]["kind"], "EnumerationBoundExceeded");
    // the flag wins over the environment
    let out = blockext(&["goodsets", &b, "--enum-bound", "9"], &[("BLOCKEXT_ENUM_BOUND", "8")]);
    assert_eq!(out.status.code(), Some(0));

    let out = blockext(&["ext", &b, "0", "0", "--mode", "oracle", "--size-guard", "10"], &[]);
    assert_eq!(out.status.code(), Some(3));
    let out = blockext(&["validate", &spec("inverting_c3"), "--order-bound", "2"], &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_corpus_and_determinism() {
    let c = corpus().display().to_string();
    let first = blockext(&["verify", &c, "--jobs", "2"], &[]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    let v = json(&first);
    assert_eq!(v["passed"], true);
    assert!(v["specs"].as_array().unwrap().iter().all(|s| s["golden"] == "match"));
    let second = blockext(&["verify", &c], &[]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_detects_corrupted_golden() {
    let dir = tempfile::tempdir().unwrap();
    for file in ["inverting_c3.spec", "inverting_c3.golden.json"] {
        std::fs::copy(corpus().join(file), dir.path().join(file)).unwrap();
    }
    let golden = dir.path().join("inverting_c3.golden.json");
    let text = std::fs::read_to_string(&golden).unwrap().replacen("O/p", "O/p^2", 1);
    std::fs::write(&golden, text).unwrap();
    let out = blockext(&["verify", &dir.path().display().to_string()], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["specs"][0]["golden"], "mismatch");
}

#[test]
fn verify_empty_corpus_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = blockext(&["verify", &dir.path().display().to_string()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "UsageError");
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("memo").display().to_string();
    let a = spec("inverting_c3");
    let args = ["ext", a.as_str(), "2", "0", "--cache-dir", cache.as_str()];
    let cold = blockext(&args, &[]);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let warm = blockext(&args, &[]);
    assert_eq!(cold.stdout, warm.stdout);
    // a corrupt entry is recomputed rather than trusted
    for entry in std::fs::read_dir(&cache).unwrap() {
        std::fs::write(entry.unwrap().path(), "garbage").unwrap();
    }
    assert_eq!(blockext(&args, &[]).stdout, cold.stdout);
}
