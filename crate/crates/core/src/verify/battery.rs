//! Deterministic batteries of compactly supported bump test functions.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::point::Point;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// `φ(y) = (1 − |y − center|²/R²)²` for `|y − center| ≤ R`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunction {
    pub center: Point,
    pub radius: f64,
}

impl TestFunction {
    pub fn new(domain: &Domain, center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !domain.contains(center) || domain.boundary_distance(center) <= radius {
            return Err(Error::Contract(format!(
                "bump at {center} with radius {radius} is not compactly supported in the domain"
            )));
        }
        Ok(TestFunction { center, radius })
    }

    pub fn value(&self, y: Point) -> f64 {
        let t = (y - self.center).norm_sq() / (self.radius * self.radius);
        if t >= 1.0 {
            0.0
        } else {
            (1.0 - t) * (1.0 - t)
        }
    }

    pub fn grad(&self, y: Point) -> Point {
        let d = y - self.center;
        let r2 = self.radius * self.radius;
        let t = d.norm_sq() / r2;
        if t >= 1.0 {
            Point::ORIGIN
        } else {
            d * (-4.0 * (1.0 - t) / r2)
        }
    }

    /// `‖∇φ‖_∞ = 8 / (3√3 R)`, attained at `|y − center| = R/√3`.
    pub fn grad_bound(&self) -> f64 {
        8.0 / (3.0 * 3f64.sqrt() * self.radius)
    }

    /// Whether the support may meet the square cell of side `h` at `c`.
    pub fn touches_cell(&self, c: Point, h: f64) -> bool {
        (c - self.center).norm() < self.radius + h
    }
}

/// The standard battery: 20 bumps on 5 rings of 4 centres around `x`.
///
/// Ring `k` has radius `(k + 1)ρ/2` (`ρ` the patch radius) and its angles
/// are rotated by `kπ/10`; bump radii alternate between 0.1 and 0.2 and are
/// capped at 90% of the boundary distance.
pub fn battery(domain: &Domain, x: Point, patch_radius: f64) -> Result<Vec<TestFunction>> {
    battery_with(domain, x, patch_radius, 5, &[0.1, 0.2])
}

/// `rings × 4` bumps with radii cycling through `radii`.
pub fn battery_with(
    domain: &Domain,
    x: Point,
    patch_radius: f64,
    rings: usize,
    radii: &[f64],
) -> Result<Vec<TestFunction>> {
    if rings == 0 || radii.is_empty() {
        return Err(Error::Contract("test-function battery is empty".into()));
    }
    let mut out = Vec::with_capacity(4 * rings);
    for k in 0..rings {
        let r = 0.5 * (k + 1) as f64 * patch_radius;
        for l in 0..4 {
            let theta = (l as f64 + k as f64 / rings as f64) * FRAC_PI_2;
            let mut center = x + Point::new(theta.cos(), theta.sin()) * r;
            if !domain.contains(center) {
                center = x;
            }
            let dist = domain.boundary_distance(center);
            let radius = radii[(4 * k + l) % radii.len()].min(0.9 * dist);
            out.push(TestFunction::new(domain, center, radius)?);
        }
    }
    Ok(out)
}
