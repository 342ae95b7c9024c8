//! Point-vortex placement: maximizing `Q(y) = G∗ω(y) − H(y)` for a fixed
//! patch, and locating the minimum of the Robin function.

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::field::{interaction, interaction_gradient, PatchField, ScalarField};
use crate::point::Point;
use rayon::prelude::*;
use std::sync::Arc;

/// Scan lattice stride in cells along each axis.
pub const SCAN_STRIDE: usize = 4;
/// Ascent stops once `|∇Q|` drops below this.
pub const GRAD_TOL: f64 = 1e-8;
/// Ascent stops once the accepted step length drops below this.
pub const STEP_TOL: f64 = 1e-12;
/// Number of best lattice points re-evaluated with the exact objective.
const SCAN_CANDIDATES: usize = 8;
const MAX_ASCENT_STEPS: usize = 500;
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexStep {
    pub x: Point,
    /// `Q(x)`.
    pub value: f64,
    /// The ascent was stopped by the domain boundary.
    pub clamped: bool,
}

/// Interior cells on the stride lattice (rows and columns divisible by the stride).
pub fn scan_lattice(grid: &Grid) -> Vec<usize> {
    (0..grid.len())
        .filter(|&k| {
            let c = &grid.cells()[k];
            c.row % SCAN_STRIDE == 0 && c.col % SCAN_STRIDE == 0
        })
        .collect()
}

/// `H` on the scan lattice, computed once per grid and reused across steps.
#[derive(Debug, Clone)]
pub struct RobinTable {
    cells: Vec<usize>,
    values: Vec<f64>,
}

impl RobinTable {
    pub fn new(grid: &Arc<Grid>) -> Self {
        let cells = scan_lattice(grid);
        let domain = grid.domain();
        let values = cells.par_iter().map(|&k| domain.robin_value(grid.center(k))).collect();
        RobinTable { cells, values }
    }
}

fn objective(omega: &PatchField, y: Point) -> Result<f64> {
    Ok(interaction(omega, y)? - omega.grid().domain().robin_value(y))
}

fn objective_grad(omega: &PatchField, y: Point) -> Result<Point> {
    Ok(interaction_gradient(omega, y)? - omega.grid().domain().robin_gradient(y))
}

/// Maximizes `Q(y) = G∗ω(y) − H(y)`.
///
/// `psi` must be the stream function of `omega`; `ψ − H` on the lattice
/// ranks scan points, the best few are re-evaluated exactly, and gradient
/// ascent with backtracking runs from the best of them. The result is never
/// worse than `current`.
pub fn vortex_step(
    omega: &PatchField,
    psi: &ScalarField,
    table: &RobinTable,
    current: Option<Point>,
) -> Result<VortexStep> {
    let grid = omega.grid();
    if !grid.same_grid(psi.grid()) {
        return Err(Error::Contract("patch and stream live on different grids".into()));
    }
    let mut ranked: Vec<(f64, usize)> = table
        .cells
        .iter()
        .zip(&table.values)
        .map(|(&k, &h)| (psi.get(k) - h, k))
        .collect();
    ranked.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut start: Option<(Point, f64)> = None;
    for &(_, k) in ranked.iter().take(SCAN_CANDIDATES) {
        let y = grid.center(k);
        let q = objective(omega, y)?;
        if start.map_or(true, |(_, best)| q > best) {
            start = Some((y, q));
        }
    }
    let current = match current {
        Some(x) => Some((x, objective(omega, x)?)),
        None => None,
    };
    if let Some((x, q)) = current {
        if start.map_or(true, |(_, best)| q > best) {
            start = Some((x, q));
        }
    }
    let (y, q) = start.ok_or_else(|| Error::Resolution("scan lattice has no interior cells".into()))?;
    let ascended = ascend(omega, y, q, grid.spacing())?;
    Ok(match current {
        Some((x, q)) if q >= ascended.value => VortexStep { x, value: q, clamped: false },
        _ => ascended,
    })
}

fn ascend(omega: &PatchField, mut y: Point, mut q: f64, spacing: f64) -> Result<VortexStep> {
    let domain = omega.grid().domain().clone();
    let mut g = objective_grad(omega, y)?;
    let mut step = spacing;
    let mut clamped = false;
    for _ in 0..MAX_ASCENT_STEPS {
        let gn = g.norm();
        if gn <= GRAD_TOL || step <= STEP_TOL {
            break;
        }
        let trial = y + g * (step / gn);
        if !domain.contains(trial) {
            clamped = true;
            step *= 0.5;
            continue;
        }
        let qt = objective(omega, trial)?;
        if qt >= q + ARMIJO * step * gn {
            y = trial;
            q = qt;
            g = objective_grad(omega, y)?;
            step *= 2.0;
            clamped = false;
        } else {
            step *= 0.5;
        }
    }
    Ok(VortexStep { x: y, value: q, clamped })
}

/// Minimum point of `H`: the smallest lattice value, refined by descent
/// with backtracking.
pub fn argmin_robin(grid: &Arc<Grid>, table: &RobinTable) -> Result<Point> {
    let domain = grid.domain().clone();
    let (mut x, mut hx) = table
        .cells
        .iter()
        .zip(&table.values)
        .map(|(&k, &h)| (grid.center(k), h))
        .fold(None, |best: Option<(Point, f64)>, (p, h)| match best {
            Some((_, bh)) if bh <= h => best,
            _ => Some((p, h)),
        })
        .ok_or_else(|| Error::Resolution("scan lattice has no interior cells".into()))?;
    let mut step = grid.spacing();
    for _ in 0..MAX_ASCENT_STEPS {
        let g = domain.robin_gradient(x);
        let gn = g.norm();
        if gn <= 1e-12 || step <= STEP_TOL {
            break;
        }
        let trial = x - g * (step / gn);
        if domain.contains(trial) {
            let ht = domain.robin_value(trial);
            if ht <= hx - ARMIJO * step * gn {
                x = trial;
                hx = ht;
                step *= 2.0;
                continue;
            }
        }
        step *= 0.5;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_grid, Domain};
    use crate::field::stream;

    #[test]
    fn robin_minimum_of_the_disk_is_the_centre() {
        let g = build_grid(Arc::new(Domain::unit_disk()), 64).unwrap();
        let x = argmin_robin(&g, &RobinTable::new(&g)).unwrap();
        assert!(x.norm() < 1e-9, "{x}");
    }

    #[test]
    fn centred_disk_patch_keeps_the_vortex_at_the_centre() {
        let g = build_grid(Arc::new(Domain::unit_disk()), 64).unwrap();
        // A reflection-symmetric set of full cells.
        let cells: Vec<usize> = (0..g.len()).filter(|&k| g.center(k).norm() < 0.15).collect();
        let mu = 1.0 / (cells.len() as f64 * g.cell_area());
        let omega = PatchField::new(g.clone(), mu, cells, None).unwrap();
        let psi = stream(&omega).unwrap();
        let step = vortex_step(&omega, &psi, &RobinTable::new(&g), None).unwrap();
        assert!(step.x.norm() <= 1e-6, "{}", step.x);
        assert!(!step.clamped);
    }
}
