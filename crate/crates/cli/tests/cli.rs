use std::process::{Command, Output};

use serde_json::Value;

fn qsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsym"))
        .args(args)
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn rational(v: &Value) -> String {
    let coeffs = v["coeffs"].as_array().expect("coefficients");
    assert!(coeffs[1..].iter().all(|c| c == "0"), "not rational: {v}");
    coeffs[0].as_str().expect("string").to_string()
}

#[test]
fn spectrum_of_q3() {
    let out = qsym(&["spectrum", "--family", "hypercube:3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let got: Vec<(String, u64)> = v["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (rational(&e["value"]), e["multiplicity"].as_u64().unwrap()))
        .collect();
    let want = [("3", 1), ("1", 3), ("-1", 3), ("-3", 1)].map(|(a, b)| (a.to_string(), b));
    assert_eq!(got, want);
}

#[test]
fn spectrum_of_k4() {
    let out = qsym(&["spectrum", "--family", "complete:4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("3\tmultiplicity 1"));
    assert!(lines[1].starts_with("-1\tmultiplicity 3"));
}

#[test]
fn bad_input_exits_2() {
    for args in [
        &["spectrum", "--orders", "1", "--gens", ""][..],
        &["spectrum", "--family", "cube:3"],
        &["intertwiner", "--family", "hypercube:2", "--block", "x"],
        &["partition", "eval", "cap *"],
        &["partition", "eval", "cap * cap"],
        &["verify", "unknown"],
        &["spectrum"],
    ] {
        let out = qsym(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn guard_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qsym"))
        .args(["spectrum", "--family", "hypercube:5"])
        .env("QSYM_MAX_N", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("QSYM_MAX_N"));
}

#[test]
fn fourier_check_reports_folded_finding() {
    let out = qsym(&["fourier-check", "--family", "folded:4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let verdicts: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["verdict"].as_str().unwrap()).collect();
    assert!(verdicts.contains(&"finding"));
    assert!(!verdicts.contains(&"fail"));
}

#[test]
fn fourier_check_hypercube_diagonal() {
    let v = json_of(&qsym(&["fourier-check", "--family", "hypercube:3", "--json"]));
    let c = v["checks"].as_array().unwrap().iter().find(|c| c["id"] == "fourier-diagonal").unwrap();
    assert_eq!(c["detail"]["diagonal"], serde_json::json!(["3", "1", "1", "1", "-1", "-1", "-1", "-3"]));
}

#[test]
fn block_one_one_is_identity() {
    let v = json_of(&qsym(&["intertwiner", "--family", "hamming:2,3", "--block", "1,1"]));
    let entries = v["tensor"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 9);
    for e in entries {
        assert_eq!(e["idx"][0], e["idx"][1]);
        assert_eq!(rational(&e["value"]), "1");
    }
}

#[test]
fn projected_hypercube_intertwiner() {
    let v = json_of(&qsym(&["intertwiner", "--family", "hypercube:4", "--block", "2,2", "--project", "V1"]));
    let labels = v["labels"].as_array().unwrap();
    assert_eq!(labels.len(), 4);
    // 2^4 · entry = [a1=a2][b1=b2] + [a1=b1][a2=b2] + [a1=b2][a2=b1] − 2[all equal]
    let entries = v["tensor"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4 + 3 * 12);
    for e in entries {
        assert_eq!(rational(&e["value"]), "1/16");
    }
}

#[test]
fn halved_block_projection_is_permutation_indicator() {
    let v = json_of(&qsym(&["intertwiner", "--family", "halved:4", "--block", "5,0", "--project", "V1"]));
    let entries = v["tensor"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 120);
    for e in entries {
        let mut idx: Vec<u64> = e["idx"].as_array().unwrap().iter().map(|i| i.as_u64().unwrap()).collect();
        idx.sort_unstable();
        assert_eq!(idx, [0, 1, 2, 3, 4]);
        assert_eq!(rational(&e["value"]), "16");
    }
}

#[test]
fn partition_eval() {
    let v = json_of(&qsym(&["partition", "eval", "compose(cap,cup)"]));
    assert_eq!(v["result"], "n · P(0,0){}");
    let v = json_of(&qsym(&["partition", "eval", "asym(id2)", "--at", "5"]));
    assert_eq!(v["at"]["tensor"]["rank"], 10);
    assert_eq!(v["at"]["tensor"]["projection"], true);
}

#[test]
fn partition_check_alpha_fixture() {
    let out = qsym(&["partition", "check", "fixtures/L2-alpha"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let alpha = v["checks"].as_array().unwrap().iter().find(|c| c["check"] == "alpha").unwrap();
    assert_eq!(alpha["coefficient"], "(n-4)(n-6)(n-8)");
}

#[test]
fn partition_check_failing_fixture_exits_1() {
    let out = qsym(&["partition", "check", "fixtures/L3.fix"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_suites() {
    for (suite, code) in [("hamming:2,3", 0), ("wreath:2,3", 0), ("hypercube:3", 0), ("halved:5", 1)] {
        let out = qsym(&["verify", suite, "--json"]);
        assert_eq!(out.status.code(), Some(code), "{suite}");
        assert_eq!(json_of(&out)["suite"], suite);
    }
}

#[test]
fn output_is_deterministic() {
    let a = qsym(&["verify", "folded:4", "--json"]);
    let b = qsym(&["verify", "folded:4", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}
