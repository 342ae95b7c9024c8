//! Command execution and artifact layout.
//!
//! Every command writes `config.txt` into its output directory. `solve` and
//! `euler` add `field.csv`, `boundary.csv`, `report.json` and
//! `solution.json`; sweeps add `sweep_mu.{csv,json}` or
//! `sweep_lambda.{csv,json}`; `verify` writes `report.json`.

use super::artifacts::{write_boundary_csv, write_config_echo, write_json};
use super::{Command, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::{emit_report, lambda_sweep, mu_sweep, summarize, Sweep};
use crate::field::dump::{read_field_csv, write_field_csv};
use crate::field::{stream, PatchField, ScalarField};
use crate::point::Point;
use crate::solver::{solve_euler_pair, solve_vortex_wave, EnergySplit, EulerSolution, PatchSolution};
use crate::verify::{euler_structure_check, verify, verify_solution};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::BufWriter;
use std::path::Path;

/// Process outcome: 0 all checks pass, 1 a check failed, 2 unconverged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass,
    Fail,
    Unconverged,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Pass => 0,
            ExitStatus::Fail => 1,
            ExitStatus::Unconverged => 2,
        }
    }

    fn from_checks(converged: bool, pass: bool) -> Self {
        match (converged, pass) {
            (false, _) => ExitStatus::Unconverged,
            (true, false) => ExitStatus::Fail,
            (true, true) => ExitStatus::Pass,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct VortexWaveRecord {
    mu: f64,
    x: Point,
    b: f64,
    /// `F = E + G∗ω(x) − H(x)` at the final iterate.
    value: f64,
    energy: f64,
    iterations: usize,
    converged: bool,
    clamped: bool,
    f_history: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct EulerRecord {
    mu: f64,
    lambda: f64,
    c: f64,
    centroid: Point,
    energy: f64,
    split: EnergySplit,
    excess_energy: f64,
    iterations: usize,
    converged: bool,
    e_history: Vec<f64>,
}

/// Executes the command; library errors are returned, check outcomes are
/// mapped to an [`ExitStatus`].
pub fn run(cfg: &RunConfig) -> Result<ExitStatus> {
    fs::create_dir_all(&cfg.out)?;
    write_config_echo(&cfg.out, cfg)?;
    match cfg.command {
        Command::Solve => solve(cfg),
        Command::Euler => euler(cfg),
        Command::Verify => reverify(cfg),
        Command::SweepMu => {
            let grid = cfg.build_grid()?;
            let sweep = mu_sweep(&grid, &cfg.solver(cfg.mus[0], None), &cfg.mus)?;
            sweep_outcome(&sweep, &cfg.out, "sweep_mu")
        }
        Command::SweepLambda => {
            let grid = cfg.build_grid()?;
            let mu = cfg.mu.expect("validated");
            let sweep = lambda_sweep(&grid, &cfg.solver(mu, None), &cfg.lambdas)?;
            sweep_outcome(&sweep, &cfg.out, "sweep_lambda")
        }
    }
}

fn write_field_and_boundary(dir: &Path, omega: &ScalarField, psi: &ScalarField, boundary: &PatchField) -> Result<()> {
    let file = BufWriter::new(fs::File::create(dir.join("field.csv"))?);
    write_field_csv(file, omega, psi)?;
    write_boundary_csv(&dir.join("boundary.csv"), boundary)
}

fn solve(cfg: &RunConfig) -> Result<ExitStatus> {
    let grid = cfg.build_grid()?;
    let mu = cfg.mu.expect("validated");
    let sol: PatchSolution = solve_vortex_wave(&grid, &cfg.solver(mu, None))?;
    let report = verify_solution(&sol)?;
    write_field_and_boundary(&cfg.out, &sol.omega.to_field(), &sol.psi, &sol.omega)?;
    write_json(&cfg.out.join("report.json"), &report)?;
    write_json(
        &cfg.out.join("solution.json"),
        &VortexWaveRecord {
            mu,
            x: sol.x,
            b: sol.b,
            value: *sol.f_history.last().expect("nonempty history"),
            energy: sol.energy,
            iterations: sol.iterations,
            converged: sol.converged,
            clamped: sol.clamped,
            f_history: sol.f_history.clone(),
        },
    )?;
    Ok(ExitStatus::from_checks(sol.converged, report.passed()))
}

fn euler(cfg: &RunConfig) -> Result<ExitStatus> {
    let grid = cfg.build_grid()?;
    let mu = cfg.mu.expect("validated");
    let lambda = cfg.lambda.expect("validated");
    let sol: EulerSolution = solve_euler_pair(&grid, &cfg.solver(mu, Some(lambda)))?;
    let report = euler_structure_check(&sol, None)?;
    let total = sol.omega1.to_field().plus(&sol.omega2.to_field())?;
    write_field_and_boundary(&cfg.out, &total, &sol.psi, &sol.omega2)?;
    write_json(&cfg.out.join("report.json"), &report)?;
    write_json(
        &cfg.out.join("solution.json"),
        &EulerRecord {
            mu,
            lambda,
            c: sol.c,
            centroid: sol.centroid,
            energy: sol.energy(),
            split: sol.split,
            excess_energy: sol.excess,
            iterations: sol.iterations,
            converged: sol.converged,
            e_history: sol.e_history.clone(),
        },
    )?;
    Ok(ExitStatus::from_checks(sol.converged, report.pass))
}

/// Re-verifies `field.csv` and the vortex position from `solution.json`.
fn reverify(cfg: &RunConfig) -> Result<ExitStatus> {
    let input = cfg.input.as_deref().expect("validated");
    let grid = cfg.build_grid()?;
    let (omega, psi) = read_field_csv(fs::File::open(input.join("field.csv"))?, &grid)?;
    let patch = PatchField::from_values(&omega)?;
    let record: VortexWaveRecord = serde_json::from_slice(&fs::read(input.join("solution.json"))?)
        .map_err(|e| Error::Contract(format!("solution.json: {e}")))?;
    // The dumped stream must belong to the dumped vorticity.
    let fresh = stream(&patch)?;
    let drift = fresh
        .values()
        .iter()
        .zip(psi.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if drift > 1e-9 * fresh.max().abs().max(1.0) {
        return Err(Error::Contract(format!(
            "field dump stream differs from the stream of its vorticity by {drift}"
        )));
    }
    let report = verify(&patch, record.x)?;
    write_json(&cfg.out.join("report.json"), &report)?;
    Ok(ExitStatus::from_checks(true, report.passed()))
}

fn sweep_outcome(sweep: &Sweep, dir: &Path, stem: &str) -> Result<ExitStatus> {
    emit_report(sweep, dir, stem)?;
    let summary = summarize(sweep);
    Ok(ExitStatus::from_checks(summary.all_converged, summary.all_pass))
}
