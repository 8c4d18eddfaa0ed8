use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn nilcomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilcomm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8").trim_end().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8")
}

fn ok(args: &[&str]) -> String {
    let out = nilcomm(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
    stdout(&out)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).expect("write scratch file");
    path
}

#[test]
fn star_product_at_order_one() {
    assert_eq!(ok(&["star", "-n", "2", "-d", "1", "x1", "x2"]), "x1*x2 + 1/2*(12)");
    // order zero keeps only the commutative product
    assert_eq!(ok(&["star", "-n", "2", "-d", "0", "x1", "x2"]), "x1*x2");
}

#[test]
fn gap_witness_line() {
    assert_eq!(ok(&["gap-witness"]), "envelope side: 0; naive image: (13)(24)+(12)(34) [nonzero]");
}

#[test]
fn lyndon_listing_with_star_degrees() {
    assert_eq!(ok(&["lyndon", "-n", "2", "-d", "2"]), "1 0\n2 0\n12 1\n112 2\n122 2");
    let json: Value = serde_json::from_str(&ok(&["--json", "lyndon", "-n", "2", "-d", "1"])).unwrap();
    assert_eq!(json[2]["word"], serde_json::json!([1, 2]));
    assert_eq!(json[2]["star_degree"], 1);
}

#[test]
fn parse_errors_exit_with_two_and_report_the_offset() {
    let out = nilcomm(&["bracket", "-n", "2", "{x1,", "x2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("offset 5"), "{}", stderr(&out));
    let out = nilcomm(&["e", "-n", "2", "x3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("x3"));
    // clap's own usage errors share the code
    assert_eq!(nilcomm(&["star", "-n", "2", "x1"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_with_one() {
    let out = nilcomm(&["expand", "-n", "2", "x1*x2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not a Lie element"));
    assert_eq!(nilcomm(&["envelope", "/nonexistent/file", "-d", "1", "-N", "2"]).status.code(), Some(1));
}

#[test]
fn brackets_and_expansion() {
    assert_eq!(ok(&["bracket", "-n", "2", "x1", "x2"]), "(12)");
    assert_eq!(ok(&["bracket", "-n", "2", "x1^2", "x2"]), "2*x1*(12)");
    assert_eq!(ok(&["expand", "-n", "2", "(12)"]), "x1*x2 - x2*x1");
    assert_eq!(ok(&["expand", "-n", "2", "{x1,{x1,x2}}"]), ok(&["expand", "-n", "2", "(112)"]));
}

#[test]
fn symmetrization_round_trips_through_text() {
    for expr in ["x1^2*x2", "x1*(12) - 3/2*x2", "(112)*x2 + x1"] {
        let tensor = ok(&["e", "-n", "2", expr]);
        let back = ok(&["einv", "-n", "2", &tensor]);
        // canonical form of the input, via multiplication by the unit
        let input = ok(&["star", "-n", "2", "-d", "3", expr, "1"]);
        assert_eq!(back, input, "{expr}");
    }
}

#[test]
fn components_of_the_star_product() {
    assert_eq!(ok(&["bp", "-n", "2", "-p", "0", "x1", "x2"]), "x1*x2");
    assert_eq!(ok(&["bp", "-n", "2", "-p", "1", "x1^2", "x2^2"]), "2*x1*x2*(12)");
    assert_eq!(ok(&["bp", "-n", "2", "-p", "1", "-x1", "x2"]), "-1/2*(12)");
}

#[test]
fn json_output_carries_exact_coefficients() {
    let json: Value = serde_json::from_str(&ok(&["--json", "star", "-n", "2", "-d", "1", "x1", "x2"])).unwrap();
    let terms = json["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert!(terms.iter().any(|t| t["coeff"] == "1/2" && t["factors"] == serde_json::json!([{ "word": [1, 2] }])));
}

#[test]
fn envelope_of_a_file() {
    let free = scratch("free.txt", "gens 2\n");
    let json: Value =
        serde_json::from_str(&ok(&["--json", "envelope", free.to_str().unwrap(), "-d", "2", "-N", "2"])).unwrap();
    let ranks: Vec<u64> = json.as_array().unwrap().iter().map(|p| p["quotient_rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks, vec![6, 1, 0]);

    let node = scratch("node.txt", "gens 2\n# the coordinate cross\nx1*x2\n");
    let text = ok(&["envelope", node.to_str().unwrap(), "-d", "1", "-N", "3"]);
    assert!(text.starts_with("P_0: rank 7"), "{text}");
    assert!(text.contains("exact"));

    let broken = scratch("broken.txt", "gens 2\nx1 +\n");
    let out = nilcomm(&["envelope", broken.to_str().unwrap(), "-d", "1", "-N", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn filtrations_of_a_json_algebra() {
    // k[x,y]/(x², y²) with {x,y} = xy
    let alg = scratch(
        "square_zero.json",
        r#"{"labels":["1","x","y","xy"],"unit":0,
            "product":[[0,0,0,"1"],[0,1,1,"1"],[1,0,1,"1"],[0,2,2,"1"],[2,0,2,"1"],
                       [0,3,3,"1"],[3,0,3,"1"],[1,2,3,"1"],[2,1,3,"1"]],
            "bracket":[[1,2,3,"1"],[2,1,3,"-1"]]}"#,
    );
    let text = ok(&["filtration", alg.to_str().unwrap()]);
    assert!(text.contains("commutator: ranks 4 0"), "{text}");
    assert!(text.contains("nil-Poisson: ranks 4 1 0; nil of order 1"), "{text}");

    let bad = scratch("not_json.json", "{");
    assert_eq!(nilcomm(&["filtration", bad.to_str().unwrap()]).status.code(), Some(2));
    let nonunital = scratch("nonunital.json", r#"{"labels":["a"],"unit":0,"product":[]}"#);
    assert_eq!(nilcomm(&["filtration", nonunital.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn graded_pieces_and_embedding() {
    let text = ok(&["graded", "-n", "2", "-d", "2", "-N", "3"]);
    assert!(text.contains("gr_1: rank 3 expected 3 ok"), "{text}");
    assert!(text.ends_with("isomorphism with the Poisson pieces: yes"));
    assert_eq!(ok(&["ncembed", "-n", "2", "-d", "1", "12"]), "x1*x2 + 1/2*(12)");
    assert_eq!(nilcomm(&["ncembed", "-n", "2", "-d", "1", "1a"]).status.code(), Some(2));
    assert_eq!(nilcomm(&["ncembed", "-n", "2", "-d", "1", "13"]).status.code(), Some(1));
}

#[test]
fn verify_single_suite_and_unknown_name() {
    let text = ok(&["verify", "--suite", "c07"]);
    assert!(text.starts_with("PASS c07-gap-witness"), "{text}");
    assert!(text.ends_with("1 of 1 checks passed"));
    assert_eq!(nilcomm(&["verify", "--suite", "no-such-check"]).status.code(), Some(2));
}

#[test]
fn verify_runs_every_check_in_name_order() {
    let text = ok(&["verify"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 16);
    let names: Vec<&str> = lines[..15].iter().map(|l| l.split(':').next().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(lines[..15].iter().all(|l| l.starts_with("PASS ")));
    assert_eq!(lines[15], "15 of 15 checks passed");
}
