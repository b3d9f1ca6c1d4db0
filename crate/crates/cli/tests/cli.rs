use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn mumeb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mumeb"))
        .args(args)
        .env_remove("MUMEB_POLY_TABLE")
        .output()
        .expect("spawn mumeb")
}

fn mumeb_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mumeb"))
        .args(args)
        .env(key, value)
        .output()
        .expect("spawn mumeb")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn build_symmetric_starts_with_identity() {
    let out = mumeb(&["build", "--s", "2", "--family", "symmetric"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let mats = v["matrices"].as_array().unwrap();
    assert_eq!(mats.len(), 5);
    assert_eq!(mats[0]["a"], serde_json::json!([1, 0, 0, 1]));
    let u = &mats[0]["unitary"];
    assert_eq!(u["n"], 4);
    assert_eq!(u["k"], 0);
    let entries = u["entries"].as_array().unwrap();
    for (i, e) in entries.iter().enumerate() {
        let expected = if i % 5 == 0 { [1, 0] } else { [0, 0] };
        assert_eq!(e, &serde_json::json!(expected), "entry {i}");
    }
    for m in &mats[1..] {
        assert_eq!(m["unitary"]["k"], 2);
    }
}

#[test]
fn build_triple_pretty_layout() {
    let out = mumeb(&[
        "build", "--s", "2", "--family", "triple", "--format", "pretty",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("V_{").count(), 9);
    assert!(text.contains("V_{C0}"));
    assert!(text.contains("1/2 ·"));
    assert!(text.contains('i'));
    for line in text.lines().filter(|l| l.starts_with("  [")) {
        for cell in line
            .trim_matches(|c| c == ' ' || c == '[' || c == ']')
            .split_whitespace()
        {
            assert!(["0", "1", "-1", "i", "-i"].contains(&cell), "{cell}");
        }
    }
}

#[test]
fn unsupported_degree_is_a_config_error() {
    for s in ["9", "1"] {
        let out = mumeb(&["build", "--s", s, "--family", "symmetric"]);
        assert_eq!(out.status.code(), Some(2));
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("unsupported extension degree"), "{err}");
    }
}

#[test]
fn bruteforce_beyond_three_is_rejected() {
    let out = mumeb(&[
        "verify",
        "--s",
        "4",
        "--family",
        "triple",
        "--mode",
        "bruteforce",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_triple_both_modes() {
    let out = mumeb(&["verify", "--s", "2", "--family", "triple", "--mode", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["bases"], 9);
    assert_eq!(v["pair_count"], 36);
    assert_eq!(v["disagreements"], 0);
    assert_eq!(v["all_pass"], true);
}

#[test]
fn verify_triple_eight_shortcut() {
    let out = mumeb(&[
        "verify", "--s", "3", "--family", "triple", "--mode", "shortcut",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["bases"], 21);
    assert_eq!(v["pair_count"], 210);
    assert_eq!(v["failures"], 0);
}

#[test]
fn verify_sixteen_shortcut() {
    let out = mumeb(&[
        "verify",
        "--s",
        "4",
        "--family",
        "symmetric",
        "--format",
        "pretty",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("unbiased pairs: 136/136"), "{text}");
}

#[test]
fn custom_duplicate_is_a_verification_failure() {
    let path = scratch("dup.json", "[[1,0,0,1],[2,0,0,3],[1,0,0,1]]");
    let out = mumeb(&["verify", "--s", "2", "--custom", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["excluded"], false);
    assert_eq!(v["violation"]["duplicate"], true);
    assert_eq!(v["violation"]["first"], 0);
    assert_eq!(v["violation"]["second"], 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("duplicate member"), "{err}");
}

#[test]
fn custom_trace_zero_pair_is_a_verification_failure() {
    // trace([1 0; 0 1]⁻¹ [0 1; 1 0]) = 0
    let path = scratch("zero.json", "[[1,0,0,1],[0,1,1,0]]");
    let out = mumeb(&["verify", "--s", "2", "--custom", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["violation"]["duplicate"], false);
}

#[test]
fn custom_family_roundtrips_from_search_output() {
    let out = mumeb(&["search", "--s", "2", "--budget", "1_000"]);
    assert_eq!(out.status.code(), Some(0));
    let path = scratch("found.json", &String::from_utf8(out.stdout).unwrap());
    let out = mumeb(&[
        "verify",
        "--s",
        "2",
        "--custom",
        path.to_str().unwrap(),
        "--mode",
        "both",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["family"], "custom");
    let out = mumeb(&["verify", "--s", "3", "--custom", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_non_member_is_a_config_error() {
    let path = scratch("det.json", "[[1,1,1,1]]");
    let out = mumeb(&["verify", "--s", "2", "--custom", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = mumeb(&["verify", "--s", "2", "--custom", "/nonexistent/family.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_with_zero_budget_returns_seed() {
    let out = mumeb(&["search", "--s", "2", "--budget", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["best_size"], 9);
    assert_eq!(v["exact"], false);
    let seed = json(&mumeb(&["build", "--s", "2", "--family", "triple"]));
    let mut expected: Vec<Value> = seed["matrices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["a"].clone())
        .collect();
    expected.sort_by_key(|a| a.to_string());
    let mut got = v["members"].as_array().unwrap().clone();
    got.sort_by_key(|a| a.to_string());
    assert_eq!(got, expected);
}

#[test]
fn search_exhausts_the_sixty_vertex_graph() {
    let out = mumeb(&["search", "--s", "2", "--budget", "10_000_000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["best_size"].as_u64().unwrap() >= 9);
    assert_eq!(v["exact"], true);
    assert_eq!(v["search"]["vertices"], 60);
    assert_eq!(v["verification"]["all_pass"], true);
}

#[test]
fn bad_budget_is_rejected() {
    let out = mumeb(&["search", "--s", "2", "--budget", "ten"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tables_for_four() {
    let out = mumeb(&["tables", "--s", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let trace = v["trace"].as_array().unwrap();
    assert_eq!(trace.len(), 16);
    let find = |name: &str| {
        trace.iter().find(|t| t["name"] == name).unwrap()["tr"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(find("0"), 0);
    assert_eq!(find("1"), 2);
    assert_eq!(find("ξ"), 3);
    assert_eq!(find("ξ²+2ξ²"), 1);
    let gamma = v["gamma"].as_array().unwrap();
    let norm = |name: &str| gamma.iter().find(|g| g["name"] == name).unwrap()["norm_sq"].clone();
    assert_eq!(norm("0"), serde_json::json!([16, 0]));
    assert_eq!(norm("1"), serde_json::json!([4, 0]));
    assert_eq!(norm("2"), serde_json::json!([0, 0]));
    assert!(v["gamma_classes"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["holds"] == true));

    let pretty =
        String::from_utf8(mumeb(&["tables", "--s", "2", "--format", "pretty"]).stdout).unwrap();
    assert!(pretty.contains("|Γ(0)|² = 16"));
    assert!(pretty.contains("|Γ(1)|² = 4"));
    assert!(pretty.contains("|Γ(2)|² = 0"));
    assert!(pretty.contains("tr(ξ²+2ξ²) = 1"));
}

#[test]
fn tables_for_eight() {
    let out = mumeb(&["tables", "--s", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["trace"].as_array().unwrap().len(), 64);
    assert_eq!(v["trace_checks"]["orbit_sum_agrees"], true);
    assert_eq!(v["trace_checks"]["additive"], true);
    assert_eq!(v["trace_checks"]["additive_pairs_checked"], 64 * 6);
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        vec!["verify", "--s", "3", "--family", "triple"],
        vec!["search", "--s", "2"],
        vec!["tables", "--s", "2"],
        vec!["build", "--s", "3", "--family", "symmetric"],
    ] {
        let a = mumeb(&args);
        let b = mumeb(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let mut one = args.clone();
        one.extend(["--threads", "1"]);
        assert_eq!(a.stdout, mumeb(&one).stdout, "{args:?} single-threaded");
    }
}

#[test]
fn out_flag_writes_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("tables.json");
    let _ = fs::remove_file(&path);
    let out = mumeb(&["tables", "--s", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = fs::read(&path).unwrap();
    assert_eq!(written, mumeb(&["tables", "--s", "2"]).stdout);
}

#[test]
fn polynomial_table_override() {
    // x^3 + x^2 + 1 instead of the default x^3 + x + 1
    let table = scratch("polys.txt", "# alternatives\n3 0b1101\n");
    let out = mumeb_env(
        &["verify", "--s", "3", "--family", "triple"],
        "MUMEB_POLY_TABLE",
        table.to_str().unwrap(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = mumeb_env(
        &["tables", "--s", "3"],
        "MUMEB_POLY_TABLE",
        table.to_str().unwrap(),
    );
    assert_eq!(json(&out)["poly"], serde_json::json!([1, 0, 1, 1]));
    let out = mumeb_env(
        &["tables", "--s", "2"],
        "MUMEB_POLY_TABLE",
        table.to_str().unwrap(),
    );
    assert_eq!(json(&out)["poly"], serde_json::json!([1, 1, 1]));

    // x^4 + x^3 + x^2 + x + 1 is irreducible but not primitive
    let bad = scratch("bad_polys.txt", "4 0b11111\n");
    let out = mumeb_env(
        &["tables", "--s", "4"],
        "MUMEB_POLY_TABLE",
        bad.to_str().unwrap(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = mumeb_env(
        &["tables", "--s", "2"],
        "MUMEB_POLY_TABLE",
        "/nonexistent/polys.txt",
    );
    assert_eq!(out.status.code(), Some(2));
}
