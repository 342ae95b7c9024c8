//! Cell-indexed fields on a [`Grid`]: generic scalar fields (vorticity,
//! stream function, combined potential) and patch-valued vorticity.

mod diagnostics;
pub mod dump;
mod quadrature;

pub use diagnostics::{centroid, energy, excess_energy, mass_in_ball, support_diameter};
pub use quadrature::{
    cell_kernel, cell_kernel_grad, interaction, interaction_gradient, point_stream, stream,
    Vorticity,
};

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::sum;
use std::sync::Arc;

/// Tolerance on the unit integral of every patch.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "field has {} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("non-finite value at cell {k}")));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        ScalarField {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(crate::Point) -> f64) -> Result<Self> {
        let values = grid.cells().iter().map(|c| f(c.center)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn integral(&self) -> f64 {
        self.grid.cell_area() * sum::sum(self.values.iter().copied())
    }

    pub fn scaled(&self, t: f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * t).collect(),
        }
    }

    pub fn plus(&self, other: &ScalarField) -> Result<ScalarField> {
        self.ensure_same_grid(other)?;
        Ok(ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub(crate) fn ensure_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid.same_grid(&other.grid) {
            Ok(())
        } else {
            Err(Error::Contract("fields live on different grids".into()))
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A patch of constant strength with unit integral.
///
/// Cells carry an occupied fraction: 1 for full cells, a weight in (0, 1) for
/// at most one fractional edge cell. The lower level of a two-level patch may
/// additionally own the remainder of the edge cell it shares with the upper
/// level (`shared`).
#[derive(Debug, Clone)]
pub struct PatchField {
    grid: Arc<Grid>,
    strength: f64,
    full: Vec<usize>,
    fractional: Option<(usize, f64)>,
    shared: Option<(usize, f64)>,
}

impl PatchField {
    pub fn new(
        grid: Arc<Grid>,
        strength: f64,
        full: Vec<usize>,
        fractional: Option<(usize, f64)>,
    ) -> Result<Self> {
        Self::with_shared(grid, strength, full, fractional, None)
    }

    pub fn with_shared(
        grid: Arc<Grid>,
        strength: f64,
        mut full: Vec<usize>,
        fractional: Option<(usize, f64)>,
        shared: Option<(usize, f64)>,
    ) -> Result<Self> {
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::Contract(format!("patch strength must be positive, got {strength}")));
        }
        full.sort_unstable();
        if full.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Contract("duplicate full cell in patch".into()));
        }
        if let Some(&k) = full.last() {
            if k >= grid.len() {
                return Err(Error::Contract(format!("cell {k} outside grid")));
            }
        }
        for (k, w) in fractional.iter().chain(shared.iter()) {
            if *k >= grid.len() || !(*w > 0.0 && *w < 1.0) {
                return Err(Error::Contract(format!(
                    "partial cell {k} has weight {w} outside (0, 1)"
                )));
            }
            if full.binary_search(k).is_ok() {
                return Err(Error::Contract(format!("partial cell {k} is also a full cell")));
            }
        }
        if let (Some((a, _)), Some((b, _))) = (fractional, shared) {
            if a == b {
                return Err(Error::Contract("fractional and shared cell coincide".into()));
            }
        }
        let patch = PatchField {
            grid,
            strength,
            full,
            fractional,
            shared,
        };
        let mass = patch.mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::Contract(format!(
                "mass invariant violated: patch integrates to {mass}, expected 1"
            )));
        }
        Ok(patch)
    }

    /// Rebuilds a patch from cell values, e.g. a loaded field dump.
    pub fn from_values(field: &ScalarField) -> Result<Self> {
        let strength = field.max();
        if !(strength > 0.0) {
            return Err(Error::Contract("field has empty support".into()));
        }
        let mut full = Vec::new();
        let mut partial = Vec::new();
        for (k, &v) in field.values().iter().enumerate() {
            if v < 0.0 {
                return Err(Error::Contract(format!("negative vorticity at cell {k}")));
            } else if v == strength {
                full.push(k);
            } else if v > 0.0 {
                partial.push((k, v / strength));
            }
        }
        if partial.len() > 1 {
            return Err(Error::Contract(format!(
                "field has {} fractional cells; a patch allows at most one",
                partial.len()
            )));
        }
        Self::new(field.grid().clone(), strength, full, partial.first().copied())
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn full_cells(&self) -> &[usize] {
        &self.full
    }

    pub fn fractional(&self) -> Option<(usize, f64)> {
        self.fractional
    }

    pub fn shared(&self) -> Option<(usize, f64)> {
        self.shared
    }

    /// `(cell, occupied fraction)` over the support, full cells first.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.full
            .iter()
            .map(|&k| (k, 1.0))
            .chain(self.shared)
            .chain(self.fractional)
    }

    /// Support cells sorted by index with their vorticity values.
    pub fn sparse_values(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self.support().map(|(k, w)| (k, w * self.strength)).collect();
        v.sort_unstable_by_key(|p| p.0);
        v
    }

    pub fn support_len(&self) -> usize {
        self.full.len() + self.fractional.is_some() as usize + self.shared.is_some() as usize
    }

    pub fn occupied_area(&self) -> f64 {
        self.grid.cell_area() * sum::sum(self.support().map(|(_, w)| w))
    }

    pub fn mass(&self) -> f64 {
        self.strength * self.occupied_area()
    }

    pub fn value_at(&self, k: usize) -> f64 {
        if self.full.binary_search(&k).is_ok() {
            return self.strength;
        }
        self.support()
            .find(|&(c, _)| c == k)
            .map_or(0.0, |(_, w)| w * self.strength)
    }

    pub fn to_field(&self) -> ScalarField {
        let mut values = vec![0.0; self.grid.len()];
        for (k, w) in self.support() {
            values[k] = w * self.strength;
        }
        ScalarField {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Occupied fraction per cell as a dense vector.
    pub fn occupancy(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.grid.len()];
        for (k, w) in self.support() {
            occ[k] = w;
        }
        occ
    }

    /// Area of the symmetric difference, counting partial cells by fraction.
    pub fn sym_diff_area(&self, other: &PatchField) -> f64 {
        let a = self.occupancy();
        let b = other.occupancy();
        self.grid.cell_area() * sum::sum(a.iter().zip(&b).map(|(x, y)| (x - y).abs()))
    }

    /// `∑ |ω − ω'| a`.
    pub fn l1_distance(&self, other: &PatchField) -> f64 {
        let (sa, sb) = (self.strength, other.strength);
        let a = self.occupancy();
        let b = other.occupancy();
        self.grid.cell_area() * sum::sum(a.iter().zip(&b).map(|(x, y)| (x * sa - y * sb).abs()))
    }
}
