use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn polyinf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyinf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn file(contents: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn map(f1: &str, f2: &str) -> NamedTempFile {
    file(&format!("var x y\nF1 = {f1}\nF2 = {f2}\n"))
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn analyze_identity_is_proper() {
    let m = map("x", "y");
    let o = polyinf(&["analyze", path(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Proper; all sets empty"));
    assert!(stdout(&o).contains("#trailer tool=polyinf version=0.1.0 seed=0"));
}

#[test]
fn analyze_x_xy_reports_the_line() {
    let m = map("x", "x*y");
    let o = polyinf(&["analyze", path(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("NonProper; S_F: alpha = 0"));
}

#[test]
fn analyze_worked_example_lists_the_sets() {
    let m = map("x", "x^2*y*(y+2)");
    let out = stdout(&polyinf(&["analyze", path(&m)]));
    assert!(out.contains("Sing(F): x = 0 or y + 1 = 0"), "{out}");
    assert!(out.contains("K_0(F): alpha^2 + beta = 0"), "{out}");
    assert!(out.contains("S_F (complex): alpha = 0"), "{out}");
    assert!(out.contains("S_F (real): alpha = 0, beta >= 0"), "{out}");
}

#[test]
fn analyze_parse_error_exits_1() {
    let m = file("var x y\nF1 = x +* y\nF2 = y\n");
    assert_eq!(polyinf(&["analyze", path(&m)]).status.code(), Some(1));
    assert_eq!(polyinf(&["analyze", "/nonexistent/map.txt"]).status.code(), Some(1));
}

#[test]
fn analyze_degenerate_map_exits_2() {
    let m = map("x", "x");
    assert_eq!(polyinf(&["analyze", path(&m)]).status.code(), Some(2));
}

#[test]
fn bad_flags_exit_1() {
    assert_eq!(polyinf(&["ih", "torus", "--variant", "open"]).status.code(), Some(1));
    assert_eq!(polyinf(&["ih", "torus", "--perversity", "middle"]).status.code(), Some(1));
    assert_eq!(polyinf(&["--radius", "-1", "selftest"]).status.code(), Some(1));
    assert_eq!(polyinf(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    assert_eq!(polyinf(&["--help"]).status.code(), Some(0));
}

#[test]
fn ih_pinched_torus() {
    let o = polyinf(&["ih", "pinched-torus", "--perversity", "zero"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("IH^(0) (closed): (1, 0, 1)"));
}

#[test]
fn ih_torus_homology() {
    let out = stdout(&polyinf(&["ih", "torus"]));
    assert!(out.contains("H (closed): (1, 2, 1)"));
}

#[test]
fn ih_suspended_torus_duality_lines() {
    let out = stdout(&polyinf(&["ih", "suspended-torus", "--duality", "--perversity", "max"]));
    assert!(out.contains("duality ordinary: FAIL"), "{out}");
    assert!(out.contains("duality IH^(0, 1) vs IH^(0, 0): PASS"), "{out}");
}

#[test]
fn ih_reads_complex_files() {
    let k = file(
        r#"{"dimension": 1, "cells": [["a", "b"], ["e", "f"]],
            "boundary": [["e", "a", -1], ["e", "b", 1], ["f", "b", -1], ["f", "a", 1]]}"#,
    );
    let o = polyinf(&["ih", path(&k), "--subdivide", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("H (closed): (1, 1)"));
}

#[test]
fn ih_malformed_complex_exits_1() {
    assert_eq!(polyinf(&["ih", path(&file("{\"dimension\": 2"))]).status.code(), Some(1));
    assert_eq!(polyinf(&["ih", path(&file(r#"{"dimension": 1, "cells": [["a"]]}"#))]).status.code(), Some(1));
    assert_eq!(polyinf(&["ih", "/nonexistent/complex.json"]).status.code(), Some(1));
    assert_eq!(polyinf(&["ih", "sphere", "--variant", "relative"]).status.code(), Some(1));
}

#[test]
fn ih_boundary_squared_nonzero_exits_2() {
    let k = file(
        r#"{"dimension": 2, "cells": [["a", "b", "c"], ["ab", "bc", "ac"], ["t"]],
            "boundary": [["ab", "a", -1], ["ab", "b", 1], ["bc", "b", -1], ["bc", "c", 1],
                         ["ac", "a", -1], ["ac", "c", 1],
                         ["t", "ab", 1], ["t", "bc", 1], ["t", "ac", 1]]}"#,
    );
    assert_eq!(polyinf(&["ih", path(&k), "--subdivide", "0"]).status.code(), Some(2));
}

#[test]
fn harness_automorphism_is_consistent() {
    let m = map("x", "y + x^2");
    let o = polyinf(&["harness", path(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("consistency: Consistent"));
    assert!(stdout(&o).contains("IH_2^(0) = 0"));
}

#[test]
fn harness_x_xy_has_nonzero_ih2() {
    let m = map("x", "x*y");
    let o = polyinf(&["harness", path(&m), "--field", "complex"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("IH_2^(0, 0, 0) = 1"), "{}", stdout(&o));
}

#[test]
fn harness_worked_example_is_informational() {
    let m = map("x", "x^2*y*(y+2)");
    let o = polyinf(&["harness", path(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("outside theorem hypotheses"));
}

#[test]
fn harness_contradiction_exits_3() {
    let o = polyinf(&["harness", "--complex", "sphere", "--verdict", "proper"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("Inconsistent"));
    assert_eq!(polyinf(&["harness", "--complex", "disk", "--verdict", "proper"]).status.code(), Some(0));
}

#[test]
fn harness_unsupported_map_exits_2() {
    let m = map("x^2", "y");
    assert_eq!(polyinf(&["harness", path(&m), "--field", "real"]).status.code(), Some(2));
}

#[test]
fn example32_and_selftest_run() {
    let o = polyinf(&["example32"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pseudomanifold: false (singular codimension Some(1))"), "{}", stdout(&o));
    let o = polyinf(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn json_reports_are_reproducible() {
    let m = map("x", "x^2*y*(y+2)");
    let args = ["--format", "json", "--seed", "7", "analyze", path(&m)];
    let a = polyinf(&args);
    let b = polyinf(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    let h1 = polyinf(&["--format", "json", "harness", path(&m)]);
    assert_eq!(h1.stdout, polyinf(&["--format", "json", "harness", path(&m)]).stdout);
}
