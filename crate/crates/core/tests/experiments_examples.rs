//! Sweep tables and their CSV/JSON reports.

mod common;

use patchvortex::experiments::{emit_report, lambda_sweep, mu_sweep, Sweep, SweepKind, CSV_HEADER};
use patchvortex::solver::SolverConfig;
use patchvortex::{Error, Point};

fn small_mu_sweep() -> Sweep {
    let grid = common::disk_grid(64);
    mu_sweep(&grid, &SolverConfig::default(), &[5.0, 10.0, 20.0, 40.0]).unwrap()
}

#[test]
fn mu_report_has_header_and_one_line_per_row() {
    let sweep = small_mu_sweep();
    assert_eq!(sweep.kind, SweepKind::Mu);
    assert!(sweep.center.norm() < 1e-9);
    let dir = tempfile::tempdir().unwrap();
    let (csv, json) = emit_report(&sweep, dir.path(), "sweep_mu").unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], CSV_HEADER.join(","));
    assert!(lines[1].starts_with("5,"));

    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(json).unwrap()).unwrap();
    assert_eq!(summary["kind"], "mu");
    assert_eq!(summary["rows"].as_array().unwrap().len(), 4);
    let columns = summary["columns"].as_array().unwrap();
    let mass = columns.iter().find(|c| c["name"] == "mass_sqrt_s").unwrap();
    assert_eq!(mass["count"], 4);
    for row in summary["rows"].as_array().unwrap() {
        assert!(row["report"]["weak_residual_max"].is_number());
    }
}

#[test]
fn rows_respect_invariants_and_rerun_is_byte_identical() {
    let a = small_mu_sweep();
    for row in &a.rows {
        let m = row.mass_sqrt_s.unwrap();
        assert!((0.0..=1.0).contains(&m));
        assert!(row.dist_xstar.unwrap() >= 0.0 && row.diam.unwrap() >= 0.0);
        assert!(row.converged);
    }
    let b = small_mu_sweep();
    let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ca, ja) = emit_report(&a, da.path(), "s").unwrap();
    let (cb, jb) = emit_report(&b, db.path(), "s").unwrap();
    assert_eq!(std::fs::read(ca).unwrap(), std::fs::read(cb).unwrap());
    assert_eq!(std::fs::read(ja).unwrap(), std::fs::read(jb).unwrap());
}

#[test]
fn empty_table_is_a_contract_error() {
    let sweep = Sweep { kind: SweepKind::Mu, center: Point::ORIGIN, reference: None, rows: vec![] };
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(emit_report(&sweep, dir.path(), "x"), Err(Error::Contract(_))));
}

#[test]
fn unwritable_path_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let sweep = small_mu_sweep();
    assert!(matches!(emit_report(&sweep, &blocker.join("sub"), "x"), Err(Error::Io(_))));
}

#[test]
fn too_fine_rows_are_reported_unconverged() {
    let grid = common::disk_grid(32);
    let sweep = mu_sweep(&grid, &SolverConfig::default(), &[10.0, 2000.0]).unwrap();
    assert!(sweep.rows[0].converged);
    let fine = &sweep.rows[1];
    assert!(!fine.converged && fine.x.is_none() && fine.error.as_deref().unwrap().contains("resolution"));
    assert!(!sweep.rows.iter().all(|r| r.passed()));
}

#[test]
fn lambda_sweep_compares_with_the_mu_solution() {
    let grid = common::disk_grid(64);
    let base = SolverConfig { mu: 5.0, ..Default::default() };
    assert!(matches!(lambda_sweep(&grid, &base, &[4.0, 50.0]), Err(Error::Config { .. })));
    assert!(matches!(lambda_sweep(&grid, &base, &[50.0, 20.0]), Err(Error::Contract(_))));
    let sweep = lambda_sweep(&grid, &base, &[20.0, 50.0]).unwrap();
    let reference = sweep.reference.as_ref().unwrap();
    assert_eq!(reference.mu, 5.0);
    for row in &sweep.rows {
        assert!(row.converged);
        assert!(row.threshold.unwrap() > 0.0);
        assert!(row.l1_to_mu_solution.unwrap() >= 0.0);
        assert!(row.excess_energy.unwrap() >= 0.0);
        assert!(row.mass_sqrt_s.is_none());
    }
}
