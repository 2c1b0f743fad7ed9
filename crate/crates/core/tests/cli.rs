use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aperiodic"))
        .args(args)
        .env_remove("APERIODIC_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const EPS: &str = "3/2 - 1/2*sqrt(5)";
const ETA: &str = "3/2 + 1/2*sqrt(5)";

#[test]
fn self_similar_morphism_is_balanced() {
    let out = run(&["analyze-morphism", "A->AAB;B->AB", "--radius", "5000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "Balanced");
    assert_eq!(v["seed"], "B|A");
    let freq = v["perron"]["exact"]["frequencies"].as_array().unwrap();
    assert_eq!(freq[0]["exact"], "-1/2 + 1/2*sqrt(5)");
    assert_eq!(freq[1]["exact"], "3/2 - 1/2*sqrt(5)");
}

#[test]
fn cubic_morphism_gets_lengths_from_its_square() {
    let out = run(&["analyze-morphism", "A->C;B->ACCCC;C->CB", "--auto-power", "--radius", "5000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["power"], 2);
    assert_eq!(v["verdict"], "NotBalanced");
    let lengths = v["bdl_construction"]["lengths"].as_array().unwrap();
    assert_eq!(lengths.len(), 3);
    assert!(lengths.iter().all(|l| l.as_str().unwrap().parse::<f64>().unwrap() > 0.0));

    let plain = run(&["analyze-morphism", "A->C;B->ACCCC;C->CB", "--radius", "100"]);
    assert_eq!(plain.status.code(), Some(1));
}

#[test]
fn abba_construction_is_refused() {
    let out = run(&["analyze-morphism", "A->ABBA;B->AA", "--radius", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "NotBalanced");
    assert!(v["bdl_construction"]["refused"].is_string());
}

#[test]
fn bad_rules_are_input_errors() {
    assert_eq!(run(&["analyze-morphism", "A->;B->A"]).status.code(), Some(1));
    assert_eq!(run(&["analyze-morphism", "garbage"]).status.code(), Some(1));
    assert_eq!(run(&["--precision", "5", "grid"]).status.code(), Some(1));
}

#[test]
fn golden_spectrum_decision() {
    let out = run(&[
        "spectrum", "decide", "--family", "minus", "--p", "1", "--sign", "minus", "--digits", "0..1", "--samples", "20000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["bdl"], true);
    assert_eq!(v["xi"]["exact"], "-5/2 + 3/2*sqrt(5)");
    assert_eq!(v["xi"]["decimal"], "0.854101966249684544613760503097");
}

#[test]
fn silver_spectrum_is_not_bdl() {
    let out = run(&["spectrum", "decide", "--family", "minus", "--p", "2", "--sign", "minus", "--digits", "0..1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["bdl"], false);
    assert!(v["reason"].as_str().unwrap().ends_with("2 ∤ 1"));
    assert_eq!(v["valid"], false);
}

#[test]
fn oracle_agreement_and_disagreement() {
    let dir = tempfile::tempdir().unwrap();
    let pts = path(dir.path(), "pts.csv");
    let gaps = path(dir.path(), "gaps.txt");
    let disc = path(dir.path(), "disc.csv");
    let base = ["spectrum", "gen", "--family", "minus", "--p", "1", "--sign", "minus", "--digits", "0..1"];

    let mut args = base.to_vec();
    args.extend(["--range", "-6,6", "--oracle", "--max-degree", "10", "--out", &pts, "--gaps", &gaps]);
    args.extend(["--discrepancy", &disc]);
    let ok = run(&args);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert_eq!(json(&ok)["oracle"]["agree"], true);
    let csv = std::fs::read_to_string(&pts).unwrap();
    assert!(csv.starts_with("a,b,value_decimal,star_decimal\n"));
    assert!(csv.contains("0,0,0.000000000000000000000000000000,0.000000000000000000000000000000"));
    assert!(std::fs::read_to_string(&gaps).unwrap().contains("-1/2 + 1/2*sqrt(5)"));
    assert!(std::fs::read_to_string(&disc).unwrap().starts_with("N,right_dev,left_dev"));

    // too shallow a digit expansion misses points
    let mut args = base.to_vec();
    args.extend(["--range", "-20,20", "--oracle", "--max-degree", "3", "--out", &pts]);
    assert_eq!(run(&args).status.code(), Some(2));

    let mut args = base.to_vec();
    args.extend(["--oracle", "--max-degree", "14", "--out", &pts]);
    assert_eq!(run(&args).status.code(), Some(1));
}

#[test]
fn cap_commands() {
    let out = run(&["cap", "decide", "--eps", EPS, "--eta", ETA, "--window", "0,1", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["bdl"], true);
    assert_eq!(v["lattice_step"]["exact"], "sqrt(5)");

    let half = json(&run(&["cap", "decide", "--eps", EPS, "--eta", ETA, "--window", "0,1/2", "--samples", "0"]));
    assert_eq!(half["bdl"], false);

    let t = json(&run(&["cap", "transform", "--eps", EPS, "--eta", ETA, "--window", "0,1", "--matrix", "0,-1,1,2"]));
    assert_eq!(t["output"]["eps"]["exact"], "1/2 - 1/2*sqrt(5)");
    assert_eq!(t["output"]["eta"]["exact"], "1/2 + 1/2*sqrt(5)");

    let dir = tempfile::tempdir().unwrap();
    let pts = path(dir.path(), "cap.csv");
    let g = run(&["cap", "gen", "--eps", EPS, "--eta", ETA, "--window", "0,1", "--range", "-5,5", "--out", &pts]);
    assert_eq!(g.status.code(), Some(0));
    let rows = std::fs::read_to_string(&pts).unwrap();
    assert_eq!(rows.lines().next(), Some("a,b,value_decimal,star_decimal"));
    assert!(rows.lines().count() > 3);
}

#[test]
fn discrepancy_and_witness_on_a_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let input = path(dir.path(), "lattice.txt");
    let body: String = (-3000..=3000).map(|k| format!("{}\n", k as f64 + 0.25)).collect();
    std::fs::write(&input, body).unwrap();
    let prof = path(dir.path(), "profile.csv");

    let out = run(&["discrepancy", "--input", &input, "--xi", "1", "--out", &prof]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["max_deviation"].as_str().unwrap().parse::<f64>().unwrap() <= 1.0);
    assert_eq!(v["classification"], "LooksBounded");
    assert!(std::fs::read_to_string(&prof).unwrap().starts_with("N,right_dev,left_dev\n"));

    let wit = path(dir.path(), "witness.csv");
    let w = json(&run(&["witness", "--input", &input, "--xi", "1", "--count", "10", "--out", &wit]));
    assert_eq!(w["max_displacement"], "0.250000000000000");
    assert!(std::fs::read_to_string(&wit).unwrap().starts_with("n,x_n,xi_n,displacement\n"));

    let far = run(&["discrepancy", "--input", &input, "--xi", "1", "--horizons", "10,5000"]);
    assert_eq!(far.status.code(), Some(1));
}

#[test]
fn fibonacci_grid_and_budget() {
    let a = run(&["grid", "--bound", "6"]);
    let b = run(&["grid", "--bound", "6"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("x,y\n"));
    assert!(text.lines().count() > 20);

    let limited = Command::new(env!("CARGO_BIN_EXE_aperiodic"))
        .args(["grid", "--bound", "6"])
        .env("APERIODIC_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(limited.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = ["spectrum", "decide", "--family", "plus", "--p", "3", "--sign", "plus", "--digits", "-1..1", "--samples", "5000"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
