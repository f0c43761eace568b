//! Runs the compiled binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use epitaxy_bvp::cli::SolveSummary;
use epitaxy_bvp::continuation::FoldBracket;
use epitaxy_bvp::io::{read_diagram_csv, read_profile_csv, read_trajectory_csv};

fn bin(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epitaxy-bvp"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

#[test]
fn solve_writes_parseable_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["solve", "--lambda", "100", "--branch", "lower"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: SolveSummary = serde_json::from_slice(&out.stdout).unwrap();
    assert!((summary.a - (-108.5256729)).abs() < 1e-6);
    assert!(summary.accepted);

    let traj = read_trajectory_csv(std::fs::File::open(dir.path().join("trajectory.csv")).unwrap()).unwrap();
    assert_eq!(traj.len(), 2001);
    assert_eq!(traj.last().unwrap().t, 0.5);
    let profile = read_profile_csv(std::fs::File::open(dir.path().join("profile.csv")).unwrap()).unwrap();
    assert_eq!(profile.samples.len(), traj.len());
    assert!(dir.path().join("validation.json").exists());
}

#[test]
fn output_is_byte_identical_across_runs() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["sweep", "--bc", "navier", "--lambdas", "0,5,10,12"];
    let (o1, o2) = (bin(&args, d1.path()), bin(&args, d2.path()));
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(o1.stdout, o2.stdout);
    for name in ["diagram.csv", "fold.json"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let points = read_diagram_csv(std::fs::File::open(d1.path().join("diagram.csv")).unwrap()).unwrap();
    assert_eq!(points.len(), 6);
    let fold: FoldBracket = serde_json::from_slice(&std::fs::read(d1.path().join("fold.json")).unwrap()).unwrap();
    assert_eq!((fold.lo, fold.hi), (10.0, 12.0));
}

#[test]
fn certify_reports_nonexistence() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["certify", "--lambda", "307"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let certs: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(certs
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["kind"] == "NonexistDirichlet" && c["verdict"] == "Nonexistence"));
    let csv = bin(&["certify", "--lambda", "307", "--format", "csv"], dir.path());
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("kind,lambda,verdict,key,value\n"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"lambda": 9.0, "bc": "navier"}"#).unwrap();
    let out = bin(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: SolveSummary = serde_json::from_slice(&out.stdout).unwrap();
    assert!((summary.a - (-4.74230728)).abs() < 1e-6);
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| bin(args, dir.path()).status.code();
    assert_eq!(code(&["solve"]), Some(1));
    assert_eq!(code(&["solve", "--lambda", "1", "--bogus"]), Some(1));
    assert_eq!(code(&["solve", "--lambda", "1", "--eps", "0.9"]), Some(1));
    assert_eq!(code(&["fold", "--bc", "navier", "--lo", "12", "--hi", "13"]), Some(2));
    assert_eq!(code(&["solve", "--lambda", "100", "--a", "-50"]), Some(3));
}
