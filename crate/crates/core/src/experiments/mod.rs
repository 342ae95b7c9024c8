//! Parameter sweeps exhibiting the asymptotics of steady patches.
//!
//! * μ-sweep: as `μ → ∞` the vortex-wave solution concentrates at the
//!   minimum point `x*` of the Robin function; the mass inside `B_{√s}(x*)`
//!   (`μπs² = 1`) tends to one.
//! * λ-sweep: as `λ → ∞` the Euler pair `(ω₁, ω₂)` approaches the
//!   vortex-wave solution of the same `μ`, with `ω₂` of diameter `O(ε)`
//!   (`λπε² = 1`) and `E + (1/4π) ln ε` bounded.

mod report;

pub use report::{emit_report, summarize, ColumnSummary, SweepSummary, CSV_HEADER};

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::field::{mass_in_ball, support_diameter};
use crate::kernel::INV_4PI;
use crate::point::Point;
use crate::solver::{argmin_robin, solve_euler_pair, solve_vortex_wave, PatchSolution, RobinTable, SolverConfig};
use crate::verify::{euler_structure_check, verify_solution, EulerReport, VerificationReport};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Mu,
    Lambda,
}

/// Verification attached to a row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RowReport {
    VortexWave(VerificationReport),
    Euler(EulerReport),
}

impl RowReport {
    pub fn passed(&self) -> bool {
        match self {
            RowReport::VortexWave(r) => r.passed(),
            RowReport::Euler(r) => r.pass,
        }
    }
}

/// One solved parameter value. Fields that do not apply to the sweep kind,
/// or could not be computed because the row is infeasible, are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    /// `x^μ` for μ rows, the centroid `x^λ` of `ω₂` for λ rows.
    pub x: Option<Point>,
    /// Distance to `x*` (μ rows) or to `x^μ` (λ rows).
    pub dist_xstar: Option<f64>,
    /// Mass of `ω^μ` in `B_{√s}(x*)` (μ rows).
    pub mass_sqrt_s: Option<f64>,
    /// Diameter of `supp ω^μ` (μ rows) or of `supp ω₂` (λ rows).
    pub diam: Option<f64>,
    /// `diam / ε` (λ rows).
    pub diam_over_eps: Option<f64>,
    /// `b^μ` or `c^λ`.
    pub threshold: Option<f64>,
    /// `E(ω^μ)` or `E(ω₁ + ω₂)`.
    pub energy: Option<f64>,
    /// `E + (1/4π) ln ε` (λ rows).
    pub energy_plus_logterm: Option<f64>,
    /// `T = ½ ∫ ω₂ (ψ − c)⁺` (λ rows).
    pub excess_energy: Option<f64>,
    /// `‖ω₁^λ − ω^μ‖_{L¹}` (λ rows).
    pub l1_to_mu_solution: Option<f64>,
    pub iters: usize,
    pub converged: bool,
    pub report: Option<RowReport>,
    /// Why the row could not be solved.
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(param: f64, err: &Error) -> Self {
        SweepRow {
            param,
            x: None,
            dist_xstar: None,
            mass_sqrt_s: None,
            diam: None,
            diam_over_eps: None,
            threshold: None,
            energy: None,
            energy_plus_logterm: None,
            excess_energy: None,
            l1_to_mu_solution: None,
            iters: 0,
            converged: false,
            report: None,
            error: Some(err.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(RowReport::passed)
    }
}

/// The vortex-wave solution a λ-sweep is compared with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reference {
    pub mu: f64,
    pub x: Point,
    /// `F^μ = E + G∗ω(x) − H(x)`.
    pub value: f64,
    pub b: f64,
    pub iters: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub kind: SweepKind,
    /// Minimum point of `H` (μ-sweep) or `x^μ` (λ-sweep).
    pub center: Point,
    pub reference: Option<Reference>,
    pub rows: Vec<SweepRow>,
}

/// Row-level failures that are reported rather than propagated.
fn recoverable(err: &Error) -> bool {
    matches!(
        err,
        Error::Resolution(_) | Error::Infeasible(_) | Error::Config { .. }
    )
}

fn check_increasing(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Contract(format!("{name} list is empty")));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Contract(format!("{name} list must be strictly increasing")));
    }
    Ok(())
}

/// `s` with `μπs² = 1` (and likewise `ε` for `λ`).
pub fn patch_scale(strength: f64) -> f64 {
    (strength * PI).sqrt().recip()
}

/// Solves the vortex-wave problem for each `μ` and records concentration
/// diagnostics about the minimum point of `H`.
pub fn mu_sweep(grid: &Arc<Grid>, base: &SolverConfig, mus: &[f64]) -> Result<Sweep> {
    check_increasing("μ", mus)?;
    let xstar = argmin_robin(grid, &RobinTable::new(grid))?;
    let mut rows = Vec::with_capacity(mus.len());
    for &mu in mus {
        let cfg = SolverConfig { mu, lambda: None, ..base.clone() };
        let sol = match solve_vortex_wave(grid, &cfg) {
            Ok(sol) => sol,
            Err(e) if recoverable(&e) => {
                rows.push(SweepRow::failed(mu, &e));
                continue;
            }
            Err(e) => return Err(e),
        };
        let report = verify_solution(&sol)?;
        let radius = patch_scale(mu).sqrt();
        rows.push(SweepRow {
            param: mu,
            x: Some(sol.x),
            dist_xstar: Some(sol.x.dist(xstar)),
            mass_sqrt_s: Some(mass_in_ball(&sol.omega.to_field(), xstar, radius).min(1.0)),
            diam: Some(support_diameter(&sol.omega)?),
            diam_over_eps: None,
            threshold: Some(sol.b),
            energy: Some(sol.energy),
            energy_plus_logterm: None,
            excess_energy: None,
            l1_to_mu_solution: None,
            iters: sol.iterations,
            converged: sol.converged,
            report: Some(RowReport::VortexWave(report)),
            error: None,
        });
    }
    Ok(Sweep {
        kind: SweepKind::Mu,
        center: xstar,
        reference: None,
        rows,
    })
}

fn reference(sol: &PatchSolution, mu: f64) -> Reference {
    Reference {
        mu,
        x: sol.x,
        value: *sol.f_history.last().expect("history starts with the initial value"),
        b: sol.b,
        iters: sol.iterations,
        converged: sol.converged,
    }
}

/// Solves the Euler pair for each `λ` and compares with the vortex-wave
/// solution of `base.mu` on the same grid.
pub fn lambda_sweep(grid: &Arc<Grid>, base: &SolverConfig, lambdas: &[f64]) -> Result<Sweep> {
    check_increasing("λ", lambdas)?;
    if lambdas[0] <= base.mu {
        return Err(Error::config(
            "lambdas",
            format!("every λ must exceed μ = {}, got {}", base.mu, lambdas[0]),
        ));
    }
    let mu_cfg = SolverConfig { lambda: None, ..base.clone() };
    let mu_sol = solve_vortex_wave(grid, &mu_cfg)?;
    let reference = reference(&mu_sol, base.mu);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let cfg = SolverConfig { lambda: Some(lambda), ..base.clone() };
        let sol = match solve_euler_pair(grid, &cfg) {
            Ok(sol) => sol,
            Err(e) if recoverable(&e) => {
                rows.push(SweepRow::failed(lambda, &e));
                continue;
            }
            Err(e) => return Err(e),
        };
        let report = euler_structure_check(&sol, Some(reference.value))?;
        let eps = patch_scale(lambda);
        let diam = support_diameter(&sol.omega2)?;
        rows.push(SweepRow {
            param: lambda,
            x: Some(sol.centroid),
            dist_xstar: Some(sol.centroid.dist(mu_sol.x)),
            mass_sqrt_s: None,
            diam: Some(diam),
            diam_over_eps: Some(diam / eps),
            threshold: Some(sol.c),
            energy: Some(sol.energy()),
            energy_plus_logterm: Some(sol.energy() + INV_4PI * eps.ln()),
            excess_energy: Some(sol.excess),
            l1_to_mu_solution: Some(sol.omega1.l1_distance(&mu_sol.omega)),
            iters: sol.iterations,
            converged: sol.converged,
            report: Some(RowReport::Euler(report)),
            error: None,
        });
    }
    Ok(Sweep {
        kind: SweepKind::Lambda,
        center: mu_sol.x,
        reference: Some(reference),
        rows,
    })
}
