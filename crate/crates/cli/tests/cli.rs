//! End-to-end tests of the binary: exit codes, file outputs, determinism,
//! and agreement between the shipped fixtures and the built-in builders.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treeamle"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("treeamle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_arg(p: &Path) -> String {
    p.to_str().unwrap().to_owned()
}

#[test]
fn extend_reproduces_the_expected_fixture() {
    let fx = fixtures().join("path");
    let out_path = tmp("fhat.json");
    let out = run(&[
        "extend",
        "--graph",
        &path_arg(&fx.join("graph.json")),
        "--target",
        &path_arg(&fx.join("target.json")),
        "--boundary",
        &path_arg(&fx.join("boundary.json")),
        "--out",
        &path_arg(&out_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let got: Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let expected: Value = serde_json::from_str(
        &std::fs::read_to_string(fx.join("expected_extension.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(got, expected);
}

#[test]
fn flux_fixture_is_harmonic_but_fails_the_exhaustive_oracle() {
    let fx = fixtures().join("flux");
    let graph = path_arg(&fx.join("graph.json"));
    let target = path_arg(&fx.join("target.json"));
    let map = path_arg(&fx.join("map.json"));

    let harmonic = run(&["check-harmonic", "--graph", &graph, "--target", &target, "--map", &map]);
    assert!(harmonic.status.success());

    let amle = run(&[
        "check-amle",
        "--mode",
        "exhaustive",
        "--graph",
        &graph,
        "--target",
        &target,
        "--map",
        &map,
        "--tol",
        "1e-6",
    ]);
    assert_eq!(amle.status.code(), Some(1));
    let verdict: Value = serde_json::from_slice(&amle.stdout).unwrap();
    assert_eq!(verdict["certified"], Value::Bool(false));
    let lip_boundary = verdict["lip_boundary"].as_f64().unwrap();
    let lip_interior = verdict["lip_interior"].as_f64().unwrap();
    assert!(lip_boundary < 1.0);
    assert!(lip_interior >= 1.0 - 1e-6);
}

#[test]
fn harmonic_mode_certifies_the_path_extension() {
    let fx = fixtures().join("path");
    let out = run(&[
        "check-amle",
        "--mode",
        "harmonic",
        "--graph",
        &path_arg(&fx.join("graph.json")),
        "--target",
        &path_arg(&fx.join("target.json")),
        "--map",
        &path_arg(&fx.join("expected_extension.json")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn box_fixture_documents_multiple_extensions() {
    let fx = fixtures().join("box");
    for map in ["flat.json", "bent.json"] {
        let out = run(&[
            "check-amle",
            "--mode",
            "exhaustive",
            "--graph",
            &path_arg(&fx.join("graph.json")),
            "--target",
            &path_arg(&fx.join("target.json")),
            "--map",
            &path_arg(&fx.join(map)),
            "--tol",
            "1e-6",
        ]);
        assert!(
            out.status.success(),
            "{map}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    // distinct total maps: the box target genuinely has many extensions
    let flat: Value =
        serde_json::from_str(&std::fs::read_to_string(fx.join("flat.json")).unwrap()).unwrap();
    let bent: Value =
        serde_json::from_str(&std::fs::read_to_string(fx.join("bent.json")).unwrap()).unwrap();
    assert_ne!(flat["values"]["m"], bent["values"]["m"]);
}

#[test]
fn stochastic_commands_require_a_seed() {
    let fx = fixtures().join("politics");
    let out = run(&[
        "politics",
        "estimate",
        "--graph",
        &path_arg(&fx.join("graph.json")),
        "--target",
        &path_arg(&fx.join("target.json")),
        "--terminal",
        &path_arg(&fx.join("terminal.json")),
        "--x0",
        "1",
        "--t0",
        r#"{"vertex":"a"}"#,
        "--trials",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimates_are_independent_of_parallelism() {
    let fx = fixtures().join("politics");
    let base = [
        "politics",
        "estimate",
        "--graph",
        &path_arg(&fx.join("graph.json")),
        "--target",
        &path_arg(&fx.join("target.json")),
        "--terminal",
        &path_arg(&fx.join("terminal.json")),
        "--x0",
        "1",
        "--t0",
        r#"{"vertex":"a"}"#,
        "--trials",
        "5000",
        "--seed",
        "42",
    ]
    .map(str::to_owned);
    let one = bin().args(&base).arg("--jobs").arg("1").output().unwrap();
    let four = bin().args(&base).arg("--jobs").arg("4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let report: Value = serde_json::from_slice(&one.stdout).unwrap();
    let mean = report["estimate"].as_f64().unwrap();
    let se = report["std_error"].as_f64().unwrap();
    assert!((mean - 1.5).abs() <= 3.0 * se);
    assert_eq!(report["censored_fraction"].as_f64().unwrap(), 0.0);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["extend"]).status.code(), Some(2));
    let out = run(&[
        "extend",
        "--graph",
        "/nonexistent.json",
        "--target",
        "/nonexistent.json",
        "--boundary",
        "/nonexistent.json",
        "--out",
        "/tmp/never.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn discretize_writes_a_report() {
    let fx = fixtures().join("discretize");
    let report = tmp("interval.csv");
    let out = run(&[
        "discretize",
        "--space",
        "interval",
        "--bounds",
        "0,1",
        "--boundary",
        &path_arg(&fx.join("interval_boundary.json")),
        "--target",
        &path_arg(&fx.join("interval_target.json")),
        "--epsilons",
        "0.04,0.01",
        "--report",
        &path_arg(&report),
        "--probe-resolution",
        "200",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("eps,net_size,metric_discrepancy,lip_bound,sup_error_or_cauchy"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn manifest_reruns_are_byte_identical() {
    let fx = fixtures().join("path");
    let out_path = tmp("manifest-fhat.json");
    let manifest = tmp("manifest.json");
    let out = run(&[
        "extend",
        "--graph",
        &path_arg(&fx.join("graph.json")),
        "--target",
        &path_arg(&fx.join("target.json")),
        "--boundary",
        &path_arg(&fx.join("boundary.json")),
        "--out",
        &path_arg(&out_path),
        "--manifest",
        &path_arg(&manifest),
    ]);
    assert!(out.status.success());
    let first = std::fs::read(&out_path).unwrap();
    std::fs::remove_file(&out_path).unwrap();
    let rerun = run(&["repro", "--manifest", &path_arg(&manifest)]);
    assert!(rerun.status.success(), "{}", String::from_utf8_lossy(&rerun.stderr));
    let second = std::fs::read(&out_path).unwrap();
    assert_eq!(first, second);
}

#[test]
fn repro_lists_and_runs_experiments() {
    let list = run(&["repro", "--list"]);
    assert!(list.status.success());
    let names = String::from_utf8(list.stdout).unwrap();
    assert!(names.contains("extension-postconditions"));
    assert!(names.contains("pipeline-exactness"));

    let quick = run(&["repro", "pipeline-exactness"]);
    assert!(quick.status.success(), "{}", String::from_utf8_lossy(&quick.stderr));
    assert!(String::from_utf8_lossy(&quick.stdout).contains("PASS"));

    assert_eq!(run(&["repro", "no-such-experiment"]).status.code(), Some(2));
}

#[test]
fn flux_fixture_matches_the_builtin_embedding() {
    use treeamle::io::{graph_from_json, mapping_from_json, plane_point_from_value};
    use treeamle::validation::flux_embedding;

    let fx = fixtures().join("flux");
    let graph =
        graph_from_json(&std::fs::read_to_string(fx.join("graph.json")).unwrap()).unwrap();
    let (omega, map) = mapping_from_json(
        &graph,
        &std::fs::read_to_string(fx.join("map.json")).unwrap(),
        plane_point_from_value,
    )
    .unwrap();
    let (builtin_graph, builtin_map, builtin_omega) = flux_embedding();
    assert_eq!(graph.vertex_count(), builtin_graph.vertex_count());
    assert_eq!(graph.edge_count(), builtin_graph.edge_count());
    let omega_names: Vec<&str> = omega.iter().map(|&v| graph.vertex_name(v)).collect();
    let builtin_names: Vec<&str> =
        builtin_omega.iter().map(|&v| builtin_graph.vertex_name(v)).collect();
    assert_eq!(omega_names, builtin_names);
    for name in graph.vertex_names() {
        let got = map.get(graph.vertex_id(name).unwrap()).unwrap();
        let want = builtin_map.get(builtin_graph.vertex_id(name).unwrap()).unwrap();
        assert_eq!(got, want, "coordinates drifted at {name}");
    }
}
