use super::{PatchField, ScalarField};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::sum::Accumulator;

/// `E = ½ ∑ ω ψ a` with `ψ = stream(ω)`.
pub fn energy(omega: &ScalarField, psi: &ScalarField) -> Result<f64> {
    omega.ensure_same_grid(psi)?;
    let a = omega.grid().cell_area();
    let mut acc = Accumulator::new();
    for (w, p) in omega.values().iter().zip(psi.values()) {
        if *w != 0.0 {
            acc.add(w * p);
        }
    }
    Ok(0.5 * a * acc.value())
}

/// `T = ½ ∑ ω₂ (ψ − c)⁺ a`, the kinetic energy carried above the threshold.
pub fn excess_energy(omega2: &PatchField, psi: &ScalarField, c: f64) -> Result<f64> {
    if !omega2.grid().same_grid(psi.grid()) {
        return Err(Error::Contract("patch and stream live on different grids".into()));
    }
    let a = omega2.grid().cell_area();
    let mut acc = Accumulator::new();
    for (k, v) in omega2.sparse_values() {
        acc.add(v * (psi.get(k) - c).max(0.0));
    }
    Ok(0.5 * a * acc.value())
}

/// `∑ x ω a`; for a unit-mass patch this is its centre of vorticity.
pub fn centroid(omega: &PatchField) -> Point {
    let grid = omega.grid();
    let a = grid.cell_area();
    let (mut cx, mut cy) = (Accumulator::new(), Accumulator::new());
    for (k, v) in omega.sparse_values() {
        let c = grid.center(k);
        cx.add(c.x * v * a);
        cy.add(c.y * v * a);
    }
    Point::new(cx.value(), cy.value())
}

/// Largest distance between two support cell centres (partial cells included).
pub fn support_diameter(omega: &PatchField) -> Result<f64> {
    let grid = omega.grid();
    let pts: Vec<Point> = omega.sparse_values().iter().map(|&(k, _)| grid.center(k)).collect();
    if pts.is_empty() {
        return Err(Error::Contract("support diameter of an empty patch".into()));
    }
    let hull = convex_hull(pts);
    let mut best: f64 = 0.0;
    for (i, p) in hull.iter().enumerate() {
        for q in &hull[i + 1..] {
            best = best.max(p.dist(*q));
        }
    }
    Ok(best)
}

/// Mass of the cells whose centre lies in the closed ball `B_r(center)`.
pub fn mass_in_ball(omega: &ScalarField, center: Point, r: f64) -> f64 {
    let grid = omega.grid();
    let a = grid.cell_area();
    let r2 = r * r;
    let mut acc = Accumulator::new();
    for (k, &v) in omega.values().iter().enumerate() {
        if v != 0.0 && (grid.center(k) - center).norm_sq() <= r2 {
            acc.add(v * a);
        }
    }
    acc.value()
}

// Andrew's monotone chain.
fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
