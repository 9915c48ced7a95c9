mod common;

use std::path::Path;

use common::scene_path;
use serde_json::Value;
use static_finsler::cli::{run_scene, CliError};
use static_finsler::Error;

fn run(scene: &str, dir: &Path, args: &[&str]) -> (i32, String, String) {
    run_scene(&scene_path(scene), dir, args)
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn classify_flat() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run("flat.toml", dir.path(), &["classify", "--tangent", "2,1,0"]);
    assert_eq!(code, 0, "{err}");
    let v = json(dir.path(), "classify.json");
    assert_eq!(v["kind"], "Timelike");
    assert_eq!(v["orientation"], "Future");
    assert_eq!(v["version"], 1);
}

#[test]
fn lightcone_figure_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run("figure-one.toml", dir.path(), &["lightcone", "--chords", "2000"]);
    assert_eq!(code, 0, "{err}");
    let v = json(dir.path(), "convexity.json");
    assert_eq!(v["convex"], false);
    assert!(v["witness"]["l_at_midpoint"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(dir.path().join("lightcone.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("tau"));
    assert_eq!(csv.lines().count(), 361);
}

#[test]
fn dist_randers() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run("randers.toml", dir.path(), &["dist", "--source", "0,0"]);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(dir.path().join("distance.csv")).unwrap();
    let (mut best, mut value) = (f64::INFINITY, f64::NAN);
    for row in csv.lines().skip(1) {
        let f: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        let gap = (f[0] - 1.0).hypot(f[1]);
        if gap < best {
            best = gap;
            value = f[2];
        }
    }
    assert!((value / 1.5 - 1.0).abs() <= 0.02, "{value}");
}

#[test]
fn chrono_randers() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run("randers.toml", dir.path(), &["chrono", "--from", "0,0,0", "--to", "1,-1,0"]);
    assert_eq!(code, 0);
    let v = json(dir.path(), "chrono.json");
    assert_eq!(v["result"]["chronological"], true);
    assert!((v["result"]["margin"].as_f64().unwrap() - 0.5).abs() < 0.02);
}

#[test]
fn conic_sstk() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run("sstk.toml", dir.path(), &["conic", "--directions", "4"]);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(dir.path().join("conic.csv")).unwrap();
    let first: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(&first[..2], &[1.0, 0.0]);
    assert!((first[2] - (2.0 - 3f64.sqrt())).abs() < 1e-12);
    assert!((first[3] - (2.0 + 3f64.sqrt())).abs() < 1e-12);
}

#[test]
fn geodesic_and_ball_write_files() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run("flat.toml", dir.path(), &["geodesic", "--tangent", "1,1,0", "--s-max", "0.5"]).0, 0);
    assert!(dir.path().join("trajectory.csv").exists());
    assert_eq!(run("flat.toml", dir.path(), &["ball", "--source", "0,0", "--radius", "0.5"]).0, 0);
    let b = json(dir.path(), "ball.json");
    assert!(b["nodes"].as_u64().unwrap() > 0);
}

#[test]
fn invariants_and_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run("randers.toml", dir.path(), &["invariants", "--points-per-axis", "3", "--samples", "10", "--resolution", "40"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(json(dir.path(), "invariants.json")["all_passed"], true);

    let (code, _, err) = run("flat.toml", dir.path(), &["ladder", "--resolution", "40"]);
    assert_eq!(code, 0, "{err}");
    let v = json(dir.path(), "ladder.json");
    assert_eq!(v["causal_simplicity"]["all_minimizers_found"], true);
    assert_eq!(v["cauchy_graph"]["future_spacelike"], true);
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert_eq!(run("figure-one.toml", dir.path(), &["lightcone", "--chords", "500"]).0, 0);
        assert_eq!(run("lambda-quadratic.toml", dir.path(), &["ladder", "--resolution", "40"]).0, 0);
    }
    for name in ["convexity.json", "lightcone.csv", "ladder.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn csv_floats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run("lambda-quadratic.toml", dir.path(), &["geodesic", "--tangent", "1,0.3,0.1", "--s-max", "0.01"]).0, 0);
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    for cell in csv.lines().skip(1).flat_map(|r| r.split(',')) {
        let x: f64 = cell.parse().unwrap();
        assert_eq!(format!("{:.16e}", x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run("flat.toml", dir.path(), &["classify", "--tangent", "1,5,0", "--point", "9,0"]);
    assert_eq!(code, 1);
    assert!(err.contains("OutsideChart") && err.contains("9.0"), "{err}");

    let (code, _, err) = run("flat.toml", dir.path(), &["classify", "--tangent", "1,5"]);
    assert_eq!(code, 1);
    assert!(err.contains("InvalidInput") && err.contains("2 components"), "{err}");

    let (code, _, _) = run("flat.toml", dir.path(), &["no-such-command"]);
    assert_eq!(code, 1);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, std::fs::read_to_string(scene_path("randers.toml")).unwrap().replace("b = [0.5, 0.0]", "b = [1.5, 0.0]")).unwrap();
    let (code, _, err) = run_scene(&bad, dir.path(), &["classify", "--tangent", "1,1,0"]);
    assert_eq!(code, 1);
    assert!(err.contains("InadmissibleRanders"), "{err}");

    let (code, _, err) = run("figure-one.toml", dir.path(), &["geodesic", "--tangent", "1,1,0"]);
    assert_eq!(code, 1);
    assert!(err.contains("NotFinslerNorm"), "{err}");
}

#[test]
fn numerical_faults_exit_two() {
    assert_eq!(CliError::Model(Error::NewtonDivergence { residual: 1.0 }).exit_code(), 2);
    assert_eq!(CliError::Model(Error::ZeroVelocityBreakdown { s: 0.5 }).exit_code(), 2);
    assert_eq!(CliError::Model(Error::ZeroVector).exit_code(), 1);
}
