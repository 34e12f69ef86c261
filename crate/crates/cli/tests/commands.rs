use std::io::Write;
use std::process::Command;

use serde_json::Value;

const DEMO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/demo.ws");

fn run(args: &[&str]) -> (i32, String, String) {
    let mut full = vec!["trimetric", "--workspace", DEMO];
    full.extend_from_slice(args);
    trimetric::run(full)
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend_from_slice(&["--format", "structured"]);
    let (code, out, err) = run(&full);
    assert!(err.is_empty(), "{err}");
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn length_of_map_into_shifted_simple() {
    let (code, out, _) = run(&["length", "f", "--metric", "i"]);
    assert_eq!(code, 0);
    assert!(out.contains("= 1/5"), "{out}");
    let (_, v) = structured(&["length", "f", "--metric", "i"]);
    assert_eq!(v["length"], "1/5");
    // The same object seen through the dual family.
    let (_, v) = structured(&["length", "f", "--metric", "ii:dual"]);
    assert_eq!(v["length"], "1/5");
    let (_, v) = structured(&["length", "f", "--metric", "ii"]);
    assert_eq!(v["length"], "1");
}

#[test]
fn truncation_tower_certificate_is_linear() {
    let (code, v) = structured(&["cauchy-check", "towerK", "--metric", "i", "--horizon", "20", "--levels", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "cauchy");
    assert_eq!(v["unconditional"], true);
    let levels = v["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 10);
    for (k, l) in levels.iter().enumerate() {
        assert_eq!(l["status"], "certified");
        assert_eq!(l["threshold"], k + 1);
    }
    assert_eq!(v["lengths"]["3->7"], "1/4");
}

#[test]
fn free_truncation_tower_is_immediately_cauchy() {
    let (code, v) = structured(&["cauchy-check", "towerR", "--metric", "iii"]);
    assert_eq!(code, 0);
    assert!(v["levels"].as_array().unwrap().iter().all(|l| l["threshold"] == 1));
}

#[test]
fn metric_i_and_ii_are_not_equivalent() {
    let (code, out, _) = run(&["metric-equiv", "i", "ii", "--bound", "4"]);
    assert_eq!(code, 1);
    assert!(out.contains("not equivalent"), "{out}");
    let (_, v) = structured(&["metric-equiv", "i", "ii", "--bound", "4"]);
    let seps = v["separating"].as_array().unwrap();
    assert_eq!(seps.len(), 4);
    assert_eq!(seps[0]["degree"], 0);
    for s in &seps[1..] {
        assert_eq!(s["degree"], -s["m"].as_i64().unwrap());
    }
}

#[test]
fn dual_and_declared_metrics_resolve() {
    let (code, v) = structured(&["metric-equiv", "i:dual", "ii"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"], serde_json::json!([1, 2, 3, 4, 5, 6]));
    // `lower` is ii with the dual flag, which is i.
    assert_eq!(run(&["metric-equiv", "lower", "i"]).0, 0);
    // A shifted family is equivalent to the original.
    let (code, v) = structured(&["metric-equiv", "i@1", "i"]);
    assert_eq!(code, 0);
    assert_eq!(v["witness"][0], 1);
    assert_eq!(v["witness"][1], 3);
}

#[test]
fn ball_table_and_single_level() {
    let (code, v) = structured(&["ball", "km5"]);
    assert_eq!(code, 0);
    let members: Vec<bool> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["member"].as_bool().unwrap())
        .collect();
    assert_eq!(members, vec![true, true, true, true, true, false]);
    assert_eq!(run(&["ball", "km5", "--level", "5"]).0, 0);
    assert_eq!(run(&["ball", "km5", "--level", "6"]).0, 1);
}

#[test]
fn completion_commands() {
    let (code, v) = structured(&["in-s", "towerK"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["representative"], serde_json::json!({"0": [1]}));
    let (code, _, err) = run(&["in-s", "towerK", "--metric", "ii"]);
    assert_eq!(code, 3);
    assert!(err.contains("not Cauchy"), "{err}");
    assert_eq!(run(&["colimit", "towerK"]).0, 0);
    assert_eq!(run(&["colimit", "two"]).0, 2);
    assert_eq!(run(&["cauchy-check", "two"]).0, 2);
    let (code, v) = structured(&["colimit", "steady", "--window", "-2..2"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"].as_array().unwrap().len(), 5);
}

#[test]
fn perfection_and_singularity_commands() {
    assert_eq!(run(&["is-perfect", "periodic"]).0, 0);
    assert_eq!(run(&["is-perfect", "k0"]).0, 1);
    assert_eq!(run(&["inj-bounded", "free"]).0, 0);
    assert_eq!(run(&["inj-bounded", "k0"]).0, 1);
    let (code, v) = structured(&["sing-class", "k0"]);
    assert_eq!(code, 0);
    assert_eq!(v["module"], serde_json::json!([1]));
    assert_eq!(v["zero"], false);
    let (_, v) = structured(&["sing-class", "free"]);
    assert_eq!(v["zero"], true);
    let (_, v) = structured(&["sing-hom", "k0", "km5"]);
    assert_eq!(v["dim"], 1);
    let (_, v) = structured(&["sing-hom", "k0", "periodic"]);
    assert_eq!(v["dim"], 0);
}

#[test]
fn fuzz_reports_are_byte_stable() {
    for cmd in ["axioms-fuzz", "strong-triangle-fuzz"] {
        let args = [cmd, "--seed", "17", "--samples", "60", "--metric", "iii", "--format", "structured"];
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a, b);
        assert_eq!(a.0, 0, "{}", a.1);
    }
    let args = ["axioms-fuzz", "--seed", "5", "--samples", "40", "--metric", "flat"];
    let (code, out, _) = run(&args);
    assert_eq!(code, 1);
    assert!(out.contains("shift axiom: fails at level 2, shift -1"), "{out}");
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(run(&["axioms-fuzz"]).0, 3);
    assert_eq!(run(&["length", "nope"]).0, 3);
    assert_eq!(run(&["length", "f", "--metric", "iv"]).0, 3);
    assert_eq!(run(&["colimit", "towerK", "--window", "3..1"]).0, 3);
    assert_eq!(run(&["is-perfect"]).0, 3);
    assert_eq!(run(&["frobnicate"]).0, 3);
    assert_eq!(trimetric::run(["trimetric", "length", "f"]).0, 3);
    let (code, out, _) = trimetric::run(["trimetric", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("cauchy-check"));
}

#[test]
fn invalid_workspace_reports_object_and_exits_three() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        "RING 2 2\nCOMPLEX bad\n  AT -1 [2]\n  AT 0 [2]\n  AT 1 [2]\n  D -1 1 0 ; 0 1\n  D 0 1 0 ; 0 1\nEND\n"
    )
    .unwrap();
    let path = file.path().to_str().unwrap();
    let (code, _, err) = trimetric::run(["trimetric", "--workspace", path, "is-perfect", "bad"]);
    assert_eq!(code, 3);
    assert!(err.contains("complex bad") && err.contains("degrees -1, 0"), "{err}");
}

#[test]
fn binary_matches_library() {
    let out = Command::new(env!("CARGO_BIN_EXE_trimetric"))
        .args(["length", "f", "--metric", "i", "--workspace", DEMO])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), run(&["length", "f", "--metric", "i"]).1);
    let out = Command::new(env!("CARGO_BIN_EXE_trimetric"))
        .args(["axioms-fuzz"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
