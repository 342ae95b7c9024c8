use super::Domain;
use crate::error::{Error, Result};
use crate::point::Point;
use std::sync::Arc;

pub const MIN_CELLS_PER_AXIS: usize = 16;

const NO_CELL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// Row index counted from the bottom of the bounding box.
    pub row: usize,
    pub col: usize,
    pub center: Point,
}

/// Uniform Cartesian grid over a domain's bounding box. Interior cells are
/// those whose centre lies in the domain, stored in row-major order.
#[derive(Debug)]
pub struct Grid {
    domain: Arc<Domain>,
    origin: Point,
    spacing: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Cell>,
    lookup: Vec<u32>,
}

pub fn build_grid(domain: Arc<Domain>, n: usize) -> Result<Arc<Grid>> {
    if n < MIN_CELLS_PER_AXIS {
        return Err(Error::Resolution(format!(
            "n = {n} cells per axis is below the minimum of {MIN_CELLS_PER_AXIS}"
        )));
    }
    let (lo, hi) = domain.bbox();
    let (w, hgt) = (hi.x - lo.x, hi.y - lo.y);
    let spacing = w.max(hgt) / n as f64;
    let nx = ((w / spacing).round() as usize).max(1);
    let ny = ((hgt / spacing).round() as usize).max(1);
    let mut cells = Vec::new();
    let mut lookup = vec![NO_CELL; nx * ny];
    for row in 0..ny {
        for col in 0..nx {
            let center = lo + Point::new((col as f64 + 0.5) * spacing, (row as f64 + 0.5) * spacing);
            if domain.contains(center) {
                lookup[row * nx + col] = cells.len() as u32;
                cells.push(Cell { row, col, center });
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::Resolution(format!(
            "grid with n = {n} has no interior cells"
        )));
    }
    Ok(Arc::new(Grid {
        domain,
        origin: lo,
        spacing,
        nx,
        ny,
        cells,
        lookup,
    }))
}

impl Grid {
    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    #[inline]
    pub fn center(&self, k: usize) -> Point {
        self.cells[k].center
    }

    pub fn interior_area(&self) -> f64 {
        self.cells.len() as f64 * self.cell_area()
    }

    pub fn index_of(&self, row: usize, col: usize) -> Option<usize> {
        if row >= self.ny || col >= self.nx {
            return None;
        }
        match self.lookup[row * self.nx + col] {
            NO_CELL => None,
            k => Some(k as usize),
        }
    }

    /// Interior cell whose square contains `p`.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let fx = (p.x - self.origin.x) / self.spacing;
        let fy = (p.y - self.origin.y) / self.spacing;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        self.index_of(fy.floor() as usize, fx.floor() as usize)
    }

    /// Interior cells whose centre lies within `radius` of `p`, ascending.
    pub fn cells_within(&self, p: Point, radius: f64) -> Vec<usize> {
        let to_idx = |v: f64, n: usize| -> (usize, usize) {
            let lo = ((v - radius) / self.spacing - 0.5).floor().max(0.0) as usize;
            let hi = (((v + radius) / self.spacing - 0.5).ceil().max(0.0) as usize).min(n.saturating_sub(1));
            (lo, hi)
        };
        let (c0, c1) = to_idx(p.x - self.origin.x, self.nx);
        let (r0, r1) = to_idx(p.y - self.origin.y, self.ny);
        let mut out = Vec::new();
        if c0 > c1 || r0 > r1 {
            return out;
        }
        let r2 = radius * radius;
        for row in r0..=r1 {
            for col in c0..=c1 {
                if let Some(k) = self.index_of(row, col) {
                    if (self.cells[k].center - p).norm_sq() <= r2 {
                        out.push(k);
                    }
                }
            }
        }
        out
    }

    pub fn same_grid(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other)
            || (self.nx == other.nx
                && self.ny == other.ny
                && self.spacing == other.spacing
                && self.origin == other.origin
                && self.cells.len() == other.cells.len()
                && Arc::ptr_eq(&self.domain, &other.domain))
    }
}
