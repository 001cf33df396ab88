use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn liftgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liftgap")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn gen_writes_a_graph_that_exports_back() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.json");
    let out = liftgap(&["gen", "cgk", "--k", "1", "--r", "3", "--out", &g]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(doc["edges"].as_array().unwrap().len(), 8);

    let again = liftgap(&["export", "--graph", &g, "--format", "json"]);
    assert_eq!(code(&again), 0);
    assert_eq!(String::from_utf8(again.stdout).unwrap().trim(), std::fs::read_to_string(&g).unwrap().trim());

    let dot = liftgap(&["export", "--graph", &g]);
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.starts_with("digraph G_1_3 {"));
    assert_eq!(text.matches(" -> ").count(), 8);
}

#[test]
fn frames_lists_every_edge_and_highlights_as_dot() {
    let out = liftgap(&["frames", "--k", "2", "--r", "3"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["edges"], 30);
    assert_eq!(doc["frames"].as_array().unwrap().len(), 30);
    assert_eq!(doc["symmetric"], true);

    let dot = liftgap(&["frames", "--k", "2", "--r", "3", "--emit-dot", "--edge", "4"]);
    assert_eq!(code(&dot), 0);
    let text = String::from_utf8(dot.stdout).unwrap();
    assert_eq!(text.matches("color=red").count(), 1);
    assert!(text.contains("style=bold"));
}

#[test]
fn verify_lift_round_trips_emitted_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = path(dir.path(), "inputs");
    let out = liftgap(&["verify", "lift", "--polytope", "atbal", "--k", "2", "--r", "3", "--emit-inputs", &inputs]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["certified"], true);
    assert_eq!(doc["report"]["cone_checks"], 60);

    let files = ["graph.json", "point.json", "matrix.json"].map(|f| path(Path::new(&inputs), f));
    let again = liftgap(&[
        "verify",
        "lift",
        "--polytope",
        "atbal",
        "--graph",
        &files[0],
        "--point",
        &files[1],
        "--matrix",
        &files[2],
    ]);
    assert_eq!(code(&again), 0);
    assert_eq!(json(&again), doc);

    // The point is balanced but its degrees are not 1, so AT rejects it.
    let strict = liftgap(&[
        "verify",
        "lift",
        "--polytope",
        "at",
        "--graph",
        &files[0],
        "--point",
        &files[1],
        "--matrix",
        &files[2],
    ]);
    assert_eq!(code(&strict), 1);
    assert_eq!(json(&strict)["certified"], false);

    let point = liftgap(&["verify", "point", "--polytope", "atbal", "--graph", &files[0], "--point", &files[1]]);
    assert_eq!(code(&point), 0);
    assert_eq!(json(&point)["feasible"], true);
    let point = liftgap(&["verify", "point", "--polytope", "at", "--graph", &files[0], "--point", &files[1]]);
    assert_eq!(code(&point), 1);
    assert_eq!(json(&point)["witness"]["constraint"], "degree");
}

#[test]
fn solvers_report_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let l = path(dir.path(), "l.json");
    assert_eq!(code(&liftgap(&["gen", "cgk", "--k", "2", "--r", "3", "--closed", "--out", &l])), 0);
    let tour = liftgap(&["solve", "dp-tour", "--graph", &l]);
    assert_eq!(code(&tour), 0);
    assert_eq!(json(&tour)["value"], "26/1");
    assert_eq!(json(&tour)["witness"].as_array().unwrap().len(), 15);
    let lp = liftgap(&["solve", "lp", "--graph", &l, "--polytope", "atbal"]);
    assert_eq!(code(&lp), 0);
    assert_eq!(json(&lp)["value"], "21/1");

    let s = path(dir.path(), "s.json");
    assert_eq!(code(&liftgap(&["gen", "sympath", "--ell", "1", "--q", "0", "--out", &s])), 0);
    let p = liftgap(&["solve", "dp-path", "--graph", &s]);
    assert_eq!(code(&p), 0);
    assert_eq!(json(&p)["value"], "11/1");
}

#[test]
fn gap_reports_in_every_format() {
    let csv = liftgap(&["gap", "cgk", "--k", "1,2", "--r", "2,3", "--format", "csv"]);
    assert_eq!(code(&csv), 0);
    let text = String::from_utf8(csv.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,r,n,m,W,IntOPT_bound,IntOPT,frac_value,lp_value,lemma_ratio");
    assert_eq!(lines.len(), 5);
    assert!(lines.contains(&"2,3,15,30,42/1,18/1,26/1,28/1,,9/16"), "{text}");

    let a = liftgap(&["gap", "cgk", "--k", "2", "--r", "3", "--lp", "--format", "json"]);
    let b = liftgap(&["gap", "cgk", "--k", "2", "--r", "3", "--lp", "--format", "json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let formula = liftgap(&["gap", "cgk", "--k", "100", "--r", "100", "--formula-only"]);
    assert_eq!(code(&formula), 0);
    assert!(String::from_utf8(formula.stdout).unwrap().contains("1.4629"));

    let text = liftgap(&["gap", "sympath", "--ell", "3", "--q", "0"]);
    assert_eq!(code(&text), 0);
    assert!(String::from_utf8(text.stdout).unwrap().contains("15/1"));
}

#[test]
fn exit_codes_separate_usage_from_resource_limits() {
    assert_eq!(code(&liftgap(&["frobnicate"])), 2);
    assert_eq!(code(&liftgap(&["gen", "cgk", "--k", "0", "--r", "3"])), 2);
    assert_eq!(
        code(&liftgap(&["verify", "point", "--polytope", "nope", "--graph", "/nonexistent", "--point", "/x"])),
        2
    );
    assert_eq!(code(&liftgap(&["gen", "cgk", "--k", "30", "--r", "2"])), 3);
    assert_eq!(code(&liftgap(&["gap", "cgk", "--k", "9", "--r", "9"])), 3);

    let dir = tempfile::tempdir().unwrap();
    let big = path(dir.path(), "big.json");
    assert_eq!(code(&liftgap(&["gen", "sympath", "--ell", "4", "--q", "1", "--out", &big])), 0);
    let out = liftgap(&["solve", "dp-path", "--graph", &big]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}
