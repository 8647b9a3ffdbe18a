use std::fs;
use std::path::Path;
use std::process::Command;

use hdgbem::harness::cli::run;

fn config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, format!("{body}\n[output]\ndir = \"{}\"\n", dir.join("out").display())).unwrap();
    p
}

const SMALL: &str = "[geometry]\ncase = \"dipole-plus-constant\"\n[discretization]\nk = 1\nh0 = 0.2\nlevels = 3\nparallel = false\n[coupling]\nn = 12\ntol = 1e-9\nomega_grid = [0.4, 0.5, 1.0]\nmax_iter = 60\n";

#[test]
fn study_writes_csv_with_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    assert_eq!(run(["hdgbem", "study", cfg.to_str().unwrap()]), 0);
    let csv = fs::read_to_string(dir.path().join("out/study.csv")).unwrap();
    assert!(csv.starts_with("level,h,R_h,err_q,err_u,rate_q,rate_u,iters,ratio"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn repeated_sequential_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let arg = cfg.to_str().unwrap();
    assert_eq!(run(["hdgbem", "solve", arg]), 0);
    let a = fs::read(dir.path().join("out/iterations.csv")).unwrap();
    let b = fs::read(dir.path().join("out/trace.csv")).unwrap();
    assert_eq!(run(["hdgbem", "solve", arg]), 0);
    assert_eq!(a, fs::read(dir.path().join("out/iterations.csv")).unwrap());
    assert_eq!(b, fs::read(dir.path().join("out/trace.csv")).unwrap());
    for f in ["field.vtk", "coefficients.csv", "lambda.csv"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn mesh_and_sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let arg = cfg.to_str().unwrap();
    assert_eq!(run(["hdgbem", "mesh", arg]), 0);
    let report = fs::read_to_string(dir.path().join("out/mesh_report.csv")).unwrap();
    assert!(report.starts_with("h,elements,vertices,R_h"));
    assert!(hdgbem::geometry::read_mesh(&dir.path().join("out/mesh.txt")).is_ok());
    assert_eq!(run(["hdgbem", "sweep", arg]), 0);
    let sweep = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 4);
    assert!(sweep.lines().last().unwrap().starts_with("1,false"));
}

#[test]
fn solver_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &SMALL.replace("tol = 1e-9", "tol = 1e-9\nomega = 1.0"));
    assert_eq!(run(["hdgbem", "solve", cfg.to_str().unwrap()]), 1);
}

#[test]
fn binary_reports_the_offending_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "[coupling]\nomega = -0.2\n");
    let out = Command::new(env!("CARGO_BIN_EXE_hdgbem")).args(["solve", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coupling.omega"));
    let out = Command::new(env!("CARGO_BIN_EXE_hdgbem")).args(["explode", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(["hdgbem", "study", "/nonexistent/run.toml"]), 2);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        hdgbem::harness::RunConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        count += 1;
    }
    assert!(count >= 3);
}
