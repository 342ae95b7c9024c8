//! Bathtub steps: maximizers of the linear functional `∑ ω Ψ a` over the
//! relaxed one- and two-level patch classes.
//!
//! Cells are ranked by `Ψ` descending with ties broken by ascending cell
//! index, then filled greedily. Exact unit mass is enforced by giving the
//! edge cell a fractional weight.

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::field::{PatchField, ScalarField};
use std::sync::Arc;

/// Relative tolerance when converting an area into a cell count.
const COUNT_TOL: f64 = 1e-12;

/// Cells sorted by `values` descending, ties by ascending index.
pub fn ranking(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    order
}

/// Splits `cells` (an area measured in cell units) into full cells and a
/// fractional remainder in (0, 1); remainders within tolerance of 0 or 1
/// are rounded away.
fn split_count(cells: f64) -> (usize, f64) {
    let mut k = cells.floor();
    let mut w = cells - k;
    if w >= 1.0 - COUNT_TOL {
        k += 1.0;
        w = 0.0;
    } else if w <= COUNT_TOL {
        w = 0.0;
    }
    (k as usize, w)
}

fn check_strength(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Contract(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_finite(psi: &ScalarField) -> Result<()> {
    if psi.values().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Contract("bathtub potential has non-finite values".into()))
    }
}

/// Maximizer of `∑ ω Ψ a` over `{0 ≤ ω ≤ μ, ∫ω = 1}` with its threshold:
/// `Ψ` at the fractional cell, or at the last full cell if there is none.
pub fn bathtub_single(psi: &ScalarField, mu: f64) -> Result<(PatchField, f64)> {
    check_strength("μ", mu)?;
    check_finite(psi)?;
    let grid: &Arc<Grid> = psi.grid();
    let target = 1.0 / mu;
    if target > grid.interior_area() * (1.0 + COUNT_TOL) {
        return Err(Error::Infeasible(format!(
            "patch area 1/μ = {target} exceeds the grid area {}",
            grid.interior_area()
        )));
    }
    let order = ranking(psi.values());
    let (k, w) = split_count(target / grid.cell_area());
    let k = k.min(order.len());
    let full = order[..k].to_vec();
    let fractional = (w > 0.0).then(|| (order[k], w));
    let edge = fractional.map_or_else(|| order[k.max(1) - 1], |(c, _)| c);
    let patch = PatchField::new(grid.clone(), mu, full, fractional)?;
    Ok((patch, psi.get(edge)))
}

/// Maximizer of `∑ (ω₁ + ω₂) ψ a` over the relaxed two-level class: `ω₂`
/// (strength `λ`) takes the top area `1/λ`, `ω₁` (strength `μ`) the next
/// area `1/μ`. When the upper level ends in a fractional cell, the lower
/// level owns the rest of that cell as its shared part. The threshold `c`
/// is `ψ` at the first cell below the full cells of `ω₂`.
pub fn bathtub_two_level(psi: &ScalarField, mu: f64, lambda: f64) -> Result<(PatchField, PatchField, f64)> {
    check_strength("μ", mu)?;
    check_strength("λ", lambda)?;
    if lambda <= mu {
        return Err(Error::Contract(format!(
            "the upper level must be stronger: λ = {lambda} ≤ μ = {mu}"
        )));
    }
    check_finite(psi)?;
    let grid: &Arc<Grid> = psi.grid();
    let total = 1.0 / lambda + 1.0 / mu;
    if total > grid.interior_area() * (1.0 + COUNT_TOL) {
        return Err(Error::Infeasible(format!(
            "patch areas 1/λ + 1/μ = {total} exceed the grid area {}",
            grid.interior_area()
        )));
    }
    let a = grid.cell_area();
    let order = ranking(psi.values());
    let n = order.len();

    let (k2, w2) = split_count(1.0 / (lambda * a));
    let upper_frac = (w2 > 0.0).then(|| (order[k2], w2));
    let upper = PatchField::new(grid.clone(), lambda, order[..k2].to_vec(), upper_frac)?;
    let c = psi.get(order[k2.min(n - 1)]);

    let mut remaining = 1.0 / (mu * a);
    let mut next = k2;
    let mut shared = None;
    if w2 > 0.0 {
        let take = (1.0 - w2).min(remaining);
        shared = Some((order[k2], take));
        remaining -= take;
        next += 1;
    }
    let (k1, w1) = split_count(remaining);
    let k1 = k1.min(n - next);
    let full = order[next..next + k1].to_vec();
    let lower_frac = (w1 > 0.0).then(|| (order[next + k1], w1));
    let lower = PatchField::with_shared(grid.clone(), mu, full, lower_frac, shared)?;
    Ok((lower, upper, c))
}

/// Bathtub optimality certificate: the smallest `Ψ` on a full cell minus the
/// largest `Ψ` off the support. Nonnegative (up to ties) for a bathtub output.
pub fn bathtub_gap(patch: &PatchField, psi: &ScalarField) -> f64 {
    let occ = patch.occupancy();
    let mut full_min = f64::INFINITY;
    let mut empty_max = f64::NEG_INFINITY;
    for (k, &o) in occ.iter().enumerate() {
        if o == 1.0 {
            full_min = full_min.min(psi.get(k));
        } else if o == 0.0 {
            empty_max = empty_max.max(psi.get(k));
        }
    }
    full_min - empty_max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_grid, Domain, MaskRaster};

    /// A 16×16 aligned mask scaled so every cell has unit area.
    fn unit_cells() -> Arc<Grid> {
        let d = Domain::masked(&MaskRaster::filled(16, 16), 16.0).unwrap();
        build_grid(Arc::new(d), 16).unwrap()
    }

    fn field(grid: &Arc<Grid>, head: &[f64]) -> ScalarField {
        let mut v = vec![-1.0; grid.len()];
        v[..head.len()].copy_from_slice(head);
        ScalarField::new(grid.clone(), v).unwrap()
    }

    #[test]
    fn single_examples() {
        let g = unit_cells();
        assert_eq!(g.cell_area(), 1.0);
        let psi = field(&g, &[3.0, 2.0, 1.0, 0.0]);
        let (p, b) = bathtub_single(&psi, 0.5).unwrap();
        assert_eq!(p.full_cells(), &[0, 1]);
        assert_eq!(p.fractional(), None);
        assert_eq!(b, 2.0);
        let (p, b) = bathtub_single(&psi, 1.0 / 1.5).unwrap();
        assert_eq!(p.full_cells(), &[0]);
        assert_eq!(p.fractional(), Some((1, 0.5)));
        assert_eq!(b, 2.0);
    }

    #[test]
    fn two_level_example() {
        let g = unit_cells();
        let psi = field(&g, &[5.0, 4.0, 3.0, 2.0, 1.0, 0.0]);
        let (w1, w2, c) = bathtub_two_level(&psi, 0.5, 1.0).unwrap();
        assert_eq!(w2.full_cells(), &[0]);
        assert_eq!(w1.full_cells(), &[1, 2]);
        assert_eq!(c, 4.0);
        assert!(matches!(bathtub_two_level(&psi, 1.0, 1.0), Err(Error::Contract(_))));
    }

    #[test]
    fn two_level_splits_shared_cell() {
        let g = unit_cells();
        let psi = field(&g, &[5.0, 4.0, 3.0, 2.0, 1.0, 0.0]);
        let (w1, w2, c) = bathtub_two_level(&psi, 1.0 / 2.0, 1.0 / 1.5).unwrap();
        assert_eq!(w2.full_cells(), &[0]);
        assert_eq!(w2.fractional(), Some((1, 0.5)));
        assert_eq!(w1.shared(), Some((1, 0.5)));
        assert_eq!(w1.full_cells(), &[2]);
        assert_eq!(w1.fractional(), Some((3, 0.5)));
        assert_eq!(c, 4.0);
    }

    #[test]
    fn ties_prefer_lower_index_and_infeasible_is_reported() {
        let g = unit_cells();
        let psi = ScalarField::zeros(g.clone());
        let (p, _) = bathtub_single(&psi, 1.0 / 3.0).unwrap();
        assert_eq!(p.full_cells(), &[0, 1, 2]);
        assert!(matches!(bathtub_single(&psi, 1.0 / 300.0), Err(Error::Infeasible(_))));
        assert!(bathtub_gap(&p, &psi) >= 0.0);
    }
}
