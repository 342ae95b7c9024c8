//! Planar domains with their Green's function `G`, regular part `h` and
//! Kirchhoff–Routh function `H(x) = h(x, x)/2`.
//!
//! `G(x, y) = (1/2π) ln(1/|x − y|) − h(x, y)`. The unit disk is handled in
//! closed form; raster domains solve for `h` numerically (see [`mask`]).

pub(crate) mod disk;
mod grid;
pub mod mask;

pub use grid::{build_grid, Cell, Grid, MIN_CELLS_PER_AXIS};
pub use mask::{MaskRaster, MaskedDomain};

use crate::error::{Error, Result};
use crate::kernel::{free_kernel, free_kernel_grad};
use crate::point::Point;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenEval {
    pub value: f64,
    pub gradient_x: Point,
    pub regular_part: f64,
    pub regular_grad_x: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobinEval {
    pub value: f64,
    pub gradient: Point,
}

#[derive(Debug)]
pub enum Domain {
    UnitDisk,
    Masked(MaskedDomain),
}

impl Domain {
    pub fn unit_disk() -> Self {
        Domain::UnitDisk
    }

    pub fn masked(raster: &MaskRaster, side: f64) -> Result<Self> {
        Ok(Domain::Masked(MaskedDomain::new(
            raster,
            side,
            mask::DEFAULT_CACHE_BUDGET,
        )?))
    }

    pub fn is_disk(&self) -> bool {
        matches!(self, Domain::UnitDisk)
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::UnitDisk => PI,
            Domain::Masked(m) => m.area(),
        }
    }

    /// Lower-left and upper-right corners of the bounding box.
    pub fn bbox(&self) -> (Point, Point) {
        match self {
            Domain::UnitDisk => (Point::new(-1.0, -1.0), Point::new(1.0, 1.0)),
            Domain::Masked(m) => m.bbox(),
        }
    }

    /// Strict interior test; boundary points are outside.
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Domain::UnitDisk => p.is_finite() && p.norm_sq() < 1.0,
            Domain::Masked(m) => m.contains(p),
        }
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        match self {
            Domain::UnitDisk => 1.0 - p.norm(),
            Domain::Masked(m) => m.boundary_distance(p),
        }
    }

    fn check(&self, p: Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!("point {p} is not an interior point")))
        }
    }

    /// `h(x, y)` without argument checks.
    #[inline]
    pub fn regular(&self, x: Point, y: Point) -> f64 {
        match self {
            Domain::UnitDisk => disk::regular(x, y),
            Domain::Masked(m) => m.regular(x, y),
        }
    }

    pub fn regular_grad_x(&self, x: Point, y: Point) -> Point {
        match self {
            Domain::UnitDisk => disk::regular_grad_x(x, y),
            Domain::Masked(m) => m.regular_grad_x(x, y),
        }
    }

    /// `H(x)` without argument checks.
    pub fn robin_value(&self, x: Point) -> f64 {
        match self {
            Domain::UnitDisk => disk::robin(x),
            Domain::Masked(m) => m.robin(x),
        }
    }

    pub fn robin_gradient(&self, x: Point) -> Point {
        match self {
            Domain::UnitDisk => disk::robin_grad(x),
            Domain::Masked(m) => m.robin_grad(x),
        }
    }

    /// `G(x, y)` for `x ≠ y` without argument checks.
    #[inline]
    pub fn green_value(&self, x: Point, y: Point) -> f64 {
        match self {
            Domain::UnitDisk => disk::green(x, y),
            Domain::Masked(m) => free_kernel(x, y) - m.regular(x, y),
        }
    }

    pub fn green(&self, x: Point, y: Point) -> Result<GreenEval> {
        self.check(x)?;
        self.check(y)?;
        let regular_part = self.regular(x, y);
        if x == y {
            return Err(Error::Singularity { regular_part });
        }
        let regular_grad_x = self.regular_grad_x(x, y);
        Ok(GreenEval {
            value: free_kernel(x, y) - regular_part,
            gradient_x: free_kernel_grad(x, y) - regular_grad_x,
            regular_part,
            regular_grad_x,
        })
    }

    pub fn robin(&self, x: Point) -> Result<RobinEval> {
        self.check(x)?;
        Ok(RobinEval {
            value: self.robin_value(x),
            gradient: self.robin_gradient(x),
        })
    }
}
