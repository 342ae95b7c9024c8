//! Numerical certification of candidate steady states.
//!
//! A pair `(ω, x)` is a weak steady solution when
//! `∫ ω J∇(G∗ω + G(x, ·))·∇φ = 0` for every test function `φ` and the point
//! vortex is stationary, `∇(G∗ω)(x) = ∇H(x)`. Both are checked here on a
//! fixed battery of bumps, together with the level-set form of the patch
//! and, for Euler pairs, the structure of the concentrated level.

mod battery;

pub use battery::{battery, battery_with, TestFunction};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::field::{
    interaction_gradient, point_stream, stream, PatchField, ScalarField,
};
use crate::kernel::{cell_mean_free_kernel_grad, INV_4PI, NEAR_CELLS};
use crate::point::Point;
use crate::solver::{bathtub_single, EulerSolution, PatchSolution};
use crate::sum::Accumulator;
use rayon::prelude::*;
use serde::Serialize;

pub const WEAK_RESIDUAL_TOL: f64 = 5e-3;
pub const STATIONARITY_TOL: f64 = 1e-3;
/// Allowed symmetric difference, in cells.
pub const LEVELSET_TIE_CELLS: f64 = 2.0;

/// Recursive subdivision of cells near the point vortex.
const SUBDIVISION_TOL: f64 = 1e-10;
const SUBDIVISION_DEPTH: u32 = 4;
/// Per-axis partition of cells away from the point vortex.
const SPLIT: usize = 4;

/// Mean of `∇_y G(x, y)` over the square cell of side `h` at `c`: the log
/// part in closed form, the smooth regular part at the centre.
fn point_field_grad_mean(domain: &Domain, x: Point, c: Point, h: f64) -> Point {
    // ∇_y of the free kernel is minus its gradient in x; h is symmetric, so
    // ∇_y h(x, y) = ∇₁ h(y, x).
    cell_mean_free_kernel_grad(x, c, h) * -1.0 - domain.regular_grad_x(c, x)
}

/// `∫_cell J∇_y G(x, y)·∇φ(y) dy` with the kernel averaged per (sub)cell.
fn cell_term(domain: &Domain, x: Point, phi: &TestFunction, c: Point, h: f64) -> f64 {
    point_field_grad_mean(domain, x, c, h).rot_cw().dot(phi.grad(c)) * h * h
}

/// [`cell_term`] on a `SPLIT × SPLIT` partition of the cell, resolving the
/// variation of `∇φ` across it.
fn split_cell_term(domain: &Domain, x: Point, phi: &TestFunction, c: Point, h: f64) -> f64 {
    let sub = h / SPLIT as f64;
    let mut acc = 0.0;
    for i in 0..SPLIT {
        for j in 0..SPLIT {
            let p = c + Point::new((i as f64 + 0.5) * sub - 0.5 * h, (j as f64 + 0.5) * sub - 0.5 * h);
            acc += cell_term(domain, x, phi, p, sub);
        }
    }
    acc
}

/// [`cell_term`] refined by recursive 4-way subdivision until the estimate
/// changes by less than the tolerance.
fn subdivided(domain: &Domain, x: Point, phi: &TestFunction, c: Point, h: f64, depth: u32) -> f64 {
    let coarse = cell_term(domain, x, phi, c, h);
    refine(domain, x, phi, c, h, coarse, depth)
}

fn refine(domain: &Domain, x: Point, phi: &TestFunction, c: Point, h: f64, coarse: f64, depth: u32) -> f64 {
    let q = 0.25 * h;
    let kids = [
        c + Point::new(-q, -q),
        c + Point::new(q, -q),
        c + Point::new(-q, q),
        c + Point::new(q, q),
    ];
    let parts: Vec<f64> = kids.iter().map(|&k| cell_term(domain, x, phi, k, 0.5 * h)).collect();
    let fine: f64 = parts.iter().sum();
    if depth == 0 || (fine - coarse).abs() <= SUBDIVISION_TOL * h * h {
        return fine;
    }
    kids.iter()
        .zip(&parts)
        .map(|(&k, &p)| refine(domain, x, phi, k, 0.5 * h, p, depth - 1))
        .sum()
}

/// `max_φ |∫ ω J∇(G∗ω + G(x, ·))·∇φ| / ‖∇φ‖_∞` over the battery.
///
/// `∇(G∗ω)` is obtained by differentiating the kernel. `∇G(x, ·)` enters
/// through its exact cell means, and cells within two spacings of `x` are
/// subdivided to resolve the variation of `∇φ` against the singularity.
pub fn weak_residual(omega: &PatchField, x: Point, battery: &[TestFunction]) -> Result<f64> {
    if battery.is_empty() {
        return Err(Error::Contract("test-function battery is empty".into()));
    }
    let grid = omega.grid();
    let domain = grid.domain();
    if !domain.contains(x) {
        return Err(Error::Domain(format!("point {x} is not an interior point")));
    }
    let h = grid.spacing();
    let a = grid.cell_area();
    let near2 = (NEAR_CELLS * h).powi(2);
    let support = omega.sparse_values();
    let stream_grads: Vec<Point> = support
        .par_iter()
        .map(|&(k, _)| interaction_gradient(omega, grid.center(k)))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for phi in battery {
        let mut acc = Accumulator::new();
        for (&(k, v), &gs) in support.iter().zip(&stream_grads) {
            let c = grid.center(k);
            if !phi.touches_cell(c, h) {
                continue;
            }
            let own = gs.rot_cw().dot(phi.grad(c)) * a;
            let vortex = if (c - x).norm_sq() <= near2 {
                subdivided(domain, x, phi, c, h, SUBDIVISION_DEPTH)
            } else {
                split_cell_term(domain, x, phi, c, h)
            };
            acc.add(v * (own + vortex));
        }
        worst = worst.max(acc.value().abs() / phi.grad_bound());
    }
    Ok(worst)
}

/// `|∇(G∗ω)(x) − ∇H(x)|`.
pub fn stationarity_residual(omega: &PatchField, x: Point) -> Result<f64> {
    let domain = omega.grid().domain();
    let g = interaction_gradient(omega, x)?;
    Ok((g - domain.robin_gradient(x)).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSetCheck {
    pub sym_diff_area: f64,
    pub b_recovered: f64,
}

/// Recomputes `Ψ = G∗ω + G(x, ·)`, extracts its superlevel set of area
/// `1/μ`, and compares it with the support of `ω`.
pub fn levelset_check(omega: &PatchField, x: Point) -> Result<LevelSetCheck> {
    let grid = omega.grid();
    let potential = stream(omega)?.plus(&point_stream(grid, x)?)?;
    let (recovered, b) = bathtub_single(&potential, omega.strength())?;
    Ok(LevelSetCheck {
        sym_diff_area: recovered.sym_diff_area(omega),
        b_recovered: b,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PassFlags {
    pub weak_residual: bool,
    pub stationarity: bool,
    pub levelset: bool,
    pub threshold_positive: bool,
    pub all: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationReport {
    pub weak_residual_max: f64,
    pub stationarity_residual: f64,
    pub levelset_sym_diff: f64,
    pub b_recovered: f64,
    pub pass: PassFlags,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.pass.all
    }
}

/// All vortex-wave checks on `(ω, x)` with the default battery.
pub fn verify(omega: &PatchField, x: Point) -> Result<VerificationReport> {
    let grid = omega.grid();
    let radius = (omega.occupied_area() / std::f64::consts::PI).sqrt();
    let tests = battery(grid.domain(), x, radius)?;
    let weak = weak_residual(omega, x, &tests)?;
    let stat = stationarity_residual(omega, x)?;
    let level = levelset_check(omega, x)?;
    let cell = grid.cell_area();
    let flags = |w: bool, s: bool, l: bool, t: bool| PassFlags {
        weak_residual: w,
        stationarity: s,
        levelset: l,
        threshold_positive: t,
        all: w && s && l && t,
    };
    Ok(VerificationReport {
        weak_residual_max: weak,
        stationarity_residual: stat,
        levelset_sym_diff: level.sym_diff_area,
        b_recovered: level.b_recovered,
        pass: flags(
            weak <= WEAK_RESIDUAL_TOL,
            stat <= STATIONARITY_TOL,
            level.sym_diff_area <= LEVELSET_TIE_CELLS * cell * (1.0 + 1e-12),
            level.b_recovered > 0.0,
        ),
    })
}

pub fn verify_solution(sol: &PatchSolution) -> Result<VerificationReport> {
    verify(&sol.omega, sol.x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerReport {
    /// `∫ |ω₂/λ − 1_{ψ > c}|`.
    pub upper_sym_diff: f64,
    /// Area of `ω₁` strictly above the threshold (shared cell excluded).
    pub lower_above_threshold: f64,
    pub c: f64,
    pub excess_energy: f64,
    /// `E + (1/4π) ln ε`.
    pub energy_plus_logterm: f64,
    /// `E` minus the energy of the concentric starting configuration.
    pub lower_bound_margin: f64,
    /// `F^μ + 1/(8π) − (E + (1/4π) ln ε)` when the vortex-wave value is given.
    pub upper_bound_margin: Option<f64>,
    pub pass: bool,
}

/// Structure of a two-level maximizer: `ω₂ = λ 1_{ψ > c}` up to tie cells,
/// `c > 0`, `ω₁` below the threshold, `T ≥ 0`, and the two energy audits.
///
/// The upper audit `E + (1/4π) ln ε ≤ F^μ + 1/(8π)` compares with the
/// vortex-wave value `F^μ` of the same `μ`; the constant bounds the self
/// energy of a unit-mass patch of strength `λ` about its centre.
pub fn euler_structure_check(sol: &EulerSolution, vortex_wave_value: Option<f64>) -> Result<EulerReport> {
    let grid = sol.omega2.grid();
    let a = grid.cell_area();
    let lambda = sol.omega2.strength();
    let psi: &ScalarField = &sol.psi;
    let upper = sol.omega2.occupancy();
    let mut diff = Accumulator::new();
    for (k, &o) in upper.iter().enumerate() {
        let inside = if psi.get(k) > sol.c { 1.0 } else { 0.0 };
        diff.add((o - inside).abs());
    }
    let shared = sol.omega1.shared().map(|(k, _)| k);
    let mut above = 0usize;
    for (k, _) in sol.omega1.support() {
        if Some(k) != shared && psi.get(k) > sol.c {
            above += 1;
        }
    }
    let eps = (lambda * std::f64::consts::PI).sqrt().recip();
    let e = sol.energy();
    let logterm = e + INV_4PI * eps.ln();
    let lower_margin = e - sol.e_history[0];
    let upper_margin = vortex_wave_value.map(|f| f + 0.5 * INV_4PI - logterm);
    let tie = LEVELSET_TIE_CELLS * a * (1.0 + 1e-12);
    let report = EulerReport {
        upper_sym_diff: diff.value() * a,
        lower_above_threshold: above as f64 * a,
        c: sol.c,
        excess_energy: sol.excess,
        energy_plus_logterm: logterm,
        lower_bound_margin: lower_margin,
        upper_bound_margin: upper_margin,
        pass: false,
    };
    let pass = report.upper_sym_diff <= tie
        && report.lower_above_threshold <= tie
        && report.c > 0.0
        && report.excess_energy >= 0.0
        && lower_margin >= 0.0
        && upper_margin.map_or(true, |m| m >= 0.0);
    Ok(EulerReport { pass, ..report })
}
