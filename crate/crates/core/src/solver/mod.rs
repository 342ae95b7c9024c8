//! Rearrangement-ascent solvers.
//!
//! The vortex-wave solver maximizes `F(ω, x) = E(ω) + G∗ω(x) − H(x)` by
//! alternating a bathtub step in `ω` (maximize the linearization of `F` at
//! the current iterate; `F` is convex in `ω`, so this never decreases it)
//! with a vortex step in `x`. The Euler-pair solver runs the same scheme on
//! `E(ω₁ + ω₂)` over two-level patches. Both check monotonicity at every
//! step and treat a decrease as an internal error.

mod bathtub;
mod vortex;

pub use bathtub::{bathtub_gap, bathtub_single, bathtub_two_level, ranking};
pub use vortex::{argmin_robin, scan_lattice, vortex_step, RobinTable, VortexStep, SCAN_STRIDE};

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::field::{centroid, energy, excess_energy, point_stream, stream, PatchField, ScalarField};
use crate::point::Point;
use crate::sum::Accumulator;
use serde::Serialize;
use std::sync::Arc;

/// Minimum number of cells a patch must cover.
pub const MIN_PATCH_CELLS: f64 = 4.0;
/// Relative slack on the monotonicity checks.
pub const ASCENT_SLACK: f64 = 1e-10;

pub fn ascent_slack(f: f64) -> f64 {
    ASCENT_SLACK * f.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InitialPoint {
    /// Minimum point of the Robin function.
    ArgminRobin,
    At(Point),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mu: f64,
    /// Strength of the concentrated level (Euler pair only).
    pub lambda: Option<f64>,
    pub max_iters: usize,
    /// Convergence threshold on the symmetric-difference area of successive patches.
    pub tol_patch: f64,
    /// Convergence threshold on the vortex displacement.
    pub tol_x: f64,
    pub x0: InitialPoint,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mu: 50.0,
            lambda: None,
            max_iters: 200,
            tol_patch: 1e-12,
            tol_x: 1e-6,
            x0: InitialPoint::ArgminRobin,
        }
    }
}

impl SolverConfig {
    /// Checks the existence hypothesis `μ|D| > 1`, the ordering `λ > μ`,
    /// and that every patch covers at least [`MIN_PATCH_CELLS`] cells.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let area = grid.domain().area();
        if !(self.mu.is_finite() && self.mu * area > 1.0) {
            return Err(Error::config(
                "mu",
                format!(
                    "μ = {} violates the existence hypothesis μ > 1/|D| = {}",
                    self.mu,
                    1.0 / area
                ),
            ));
        }
        let min_area = MIN_PATCH_CELLS * grid.cell_area();
        let mut levels = vec![("mu", self.mu)];
        if let Some(l) = self.lambda {
            if !(l.is_finite() && l > self.mu) {
                return Err(Error::config("lambda", format!("λ = {l} must exceed μ = {}", self.mu)));
            }
            levels.push(("lambda", l));
        }
        for (key, v) in levels {
            if 1.0 / v < min_area {
                return Err(Error::Resolution(format!(
                    "{key} = {v}: patch area {} is below {MIN_PATCH_CELLS} cells of area {}",
                    1.0 / v,
                    grid.cell_area()
                )));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters", "must be at least 1"));
        }
        for (key, v) in [("tol_patch", self.tol_patch), ("tol_x", self.tol_x)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be a nonnegative number, got {v}")));
            }
        }
        if let InitialPoint::At(p) = self.x0 {
            if !grid.domain().contains(p) {
                return Err(Error::config("x0", format!("{p} is not an interior point")));
            }
        }
        Ok(())
    }
}

/// A steady state `(ω, x)` of the vortex-wave system, or the last iterate
/// when the iteration budget ran out.
#[derive(Debug, Clone)]
pub struct PatchSolution {
    pub omega: PatchField,
    pub x: Point,
    /// Threshold of the final bathtub step.
    pub b: f64,
    pub f_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Stream function of `omega`.
    pub psi: ScalarField,
    pub energy: f64,
    /// The last vortex step was stopped by the boundary.
    pub clamped: bool,
}

/// Energy contributions of a two-level patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySplit {
    /// `E(ω₁)`.
    pub lower: f64,
    /// `E(ω₂)`.
    pub upper: f64,
    /// `∫ ω₁ G∗ω₂`.
    pub interaction: f64,
}

impl EnergySplit {
    pub fn total(&self) -> f64 {
        self.lower + self.upper + self.interaction
    }
}

#[derive(Debug, Clone)]
pub struct EulerSolution {
    pub omega1: PatchField,
    pub omega2: PatchField,
    pub c: f64,
    /// Centre of vorticity of `ω₂`.
    pub centroid: Point,
    pub e_history: Vec<f64>,
    pub split: EnergySplit,
    /// `T = ½ ∫ ω₂ (ψ − c)⁺`.
    pub excess: f64,
    /// Stream function of `ω₁ + ω₂`.
    pub psi: ScalarField,
    pub iterations: usize,
    pub converged: bool,
}

impl EulerSolution {
    pub fn energy(&self) -> f64 {
        self.split.total()
    }
}

fn weighted_sum(omega: &PatchField, f: &ScalarField) -> f64 {
    let a = omega.grid().cell_area();
    let mut acc = Accumulator::new();
    for (k, v) in omega.sparse_values() {
        acc.add(v * f.get(k));
    }
    a * acc.value()
}

fn check_ascent(what: &str, iteration: usize, before: f64, after: f64) -> Result<()> {
    if after >= before - ascent_slack(before) {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "{what} decreased at iteration {iteration}: {before} -> {after}"
        )))
    }
}

fn initial_point(grid: &Arc<Grid>, cfg: &SolverConfig, table: &RobinTable) -> Result<Point> {
    match cfg.x0 {
        InitialPoint::At(p) => Ok(p),
        InitialPoint::ArgminRobin => argmin_robin(grid, table),
    }
}

/// `−|y − x|`, whose bathtub patches are balls centred at `x`.
fn cone(grid: &Arc<Grid>, x: Point) -> Result<ScalarField> {
    ScalarField::from_fn(grid.clone(), |y| -y.dist(x))
}

/// Alternating ascent from the ball of area `1/μ` at the configured `x₀`.
pub fn solve_vortex_wave(grid: &Arc<Grid>, cfg: &SolverConfig) -> Result<PatchSolution> {
    cfg.validate(grid)?;
    let table = RobinTable::new(grid);
    let x0 = initial_point(grid, cfg, &table)?;
    let (omega0, _) = bathtub_single(&cone(grid, x0)?, cfg.mu)?;
    run_vortex_wave(grid, cfg, &table, omega0, x0)
}

/// Alternating ascent from a given iterate (`omega0` must have strength `μ`).
pub fn solve_vortex_wave_from(
    grid: &Arc<Grid>,
    cfg: &SolverConfig,
    omega0: PatchField,
    x0: Point,
) -> Result<PatchSolution> {
    cfg.validate(grid)?;
    if !omega0.grid().same_grid(grid) || omega0.strength() != cfg.mu {
        return Err(Error::Contract("initial patch does not match the grid or μ".into()));
    }
    if !grid.domain().contains(x0) {
        return Err(Error::Domain(format!("initial point {x0} is not an interior point")));
    }
    let table = RobinTable::new(grid);
    run_vortex_wave(grid, cfg, &table, omega0, x0)
}

fn run_vortex_wave(
    grid: &Arc<Grid>,
    cfg: &SolverConfig,
    table: &RobinTable,
    mut omega: PatchField,
    mut x: Point,
) -> Result<PatchSolution> {
    let domain = grid.domain().clone();
    let mut psi = stream(&omega)?;
    let mut e = energy(&omega.to_field(), &psi)?;
    let mut f = e + crate::field::interaction(&omega, x)? - domain.robin_value(x);
    let mut history = vec![f];
    let mut b = f64::NAN;
    let mut clamped = false;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let point = point_stream(grid, x)?;
        let potential = psi.plus(&point)?;
        let (next, threshold) = bathtub_single(&potential, cfg.mu)?;
        let next_psi = stream(&next)?;
        let next_e = energy(&next.to_field(), &next_psi)?;
        let f_mid = next_e + weighted_sum(&next, &point) - domain.robin_value(x);
        check_ascent("F after the patch step", iterations, f, f_mid)?;

        let step = vortex_step(&next, &next_psi, table, Some(x))?;
        let f_next = next_e + step.value;
        check_ascent("F after the vortex step", iterations, f_mid, f_next)?;

        let moved = step.x.dist(x);
        let changed = next.sym_diff_area(&omega);
        omega = next;
        psi = next_psi;
        e = next_e;
        x = step.x;
        f = f_next;
        b = threshold;
        clamped = step.clamped;
        history.push(f);
        if changed <= cfg.tol_patch && moved <= cfg.tol_x {
            converged = true;
            break;
        }
    }
    Ok(PatchSolution {
        omega,
        x,
        b,
        f_history: history,
        iterations,
        converged,
        psi,
        energy: e,
        clamped,
    })
}

fn combined(lower: &PatchField, upper: &PatchField) -> Result<ScalarField> {
    lower.to_field().plus(&upper.to_field())
}

/// Rearrangement ascent on `E(ω₁ + ω₂)` from concentric balls at `x₀`.
pub fn solve_euler_pair(grid: &Arc<Grid>, cfg: &SolverConfig) -> Result<EulerSolution> {
    cfg.validate(grid)?;
    let lambda = cfg
        .lambda
        .ok_or_else(|| Error::config("lambda", "the Euler pair needs λ"))?;
    let table = RobinTable::new(grid);
    let x0 = initial_point(grid, cfg, &table)?;
    let (mut lower, mut upper, mut c) = bathtub_two_level(&cone(grid, x0)?, cfg.mu, lambda)?;
    let total = combined(&lower, &upper)?;
    let mut psi = stream(&total)?;
    let mut e = energy(&total, &psi)?;
    let mut history = vec![e];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let (next_lower, next_upper, next_c) = bathtub_two_level(&psi, cfg.mu, lambda)?;
        let next_total = combined(&next_lower, &next_upper)?;
        let next_psi = stream(&next_total)?;
        let next_e = energy(&next_total, &next_psi)?;
        check_ascent("E", iterations, e, next_e)?;
        let changed = next_lower
            .sym_diff_area(&lower)
            .max(next_upper.sym_diff_area(&upper));
        lower = next_lower;
        upper = next_upper;
        c = next_c;
        psi = next_psi;
        e = next_e;
        history.push(e);
        if changed <= cfg.tol_patch {
            converged = true;
            break;
        }
    }
    let psi_upper = stream(&upper)?;
    let psi_lower = psi.plus(&psi_upper.scaled(-1.0))?;
    let split = EnergySplit {
        lower: 0.5 * weighted_sum(&lower, &psi_lower),
        upper: 0.5 * weighted_sum(&upper, &psi_upper),
        interaction: weighted_sum(&lower, &psi_upper),
    };
    Ok(EulerSolution {
        centroid: centroid(&upper),
        excess: excess_energy(&upper, &psi, c)?,
        omega1: lower,
        omega2: upper,
        c,
        e_history: history,
        split,
        psi,
        iterations,
        converged,
    })
}
