//! Grid-masked domains with a numeric regular part.
//!
//! The mask raster is both the geometry and the discretization for the
//! harmonic extension: for a source `x`, `h(x, ·)` is the discrete harmonic
//! function on the interior pixels whose values on the exterior pixel centres
//! are `(1/2π) ln(1/|x − z|)`. Fields are cached per source point.

use crate::error::{Error, Result};
use crate::kernel::free_kernel;
use crate::point::Point;
use lru::LruCache;
use parking_lot::Mutex;
use std::num::NonZeroUsize;
use std::path::Path;
use std::sync::Arc;

pub const DEFAULT_CACHE_BUDGET: usize = 512;
pub const HARMONIC_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 200_000;

/// A `0`/`1` raster as read from a mask file (top row first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskRaster {
    pub rows: usize,
    pub cols: usize,
    /// Row-major, row 0 is the top row of the file.
    pub cells: Vec<bool>,
}

impl MaskRaster {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<bool> = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::Domain(format!(
                        "mask line {}: unexpected character {other:?}",
                        ln + 1
                    ))),
                })
                .collect::<Result<_>>()?;
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(Error::Domain(format!(
                        "mask line {}: expected {c} columns, found {}",
                        ln + 1,
                        row.len()
                    )))
                }
                _ => {}
            }
            cells.extend(row);
            rows += 1;
        }
        let cols = cols.ok_or_else(|| Error::Domain("mask file is empty".into()))?;
        Ok(MaskRaster { rows, cols, cells })
    }

    pub fn filled(rows: usize, cols: usize) -> Self {
        MaskRaster {
            rows,
            cols,
            cells: vec![true; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                cells.push(f(r, c));
            }
        }
        MaskRaster { rows, cols, cells }
    }
}

/// Geometry and cached Green's data of a raster domain.
pub struct MaskedDomain {
    rows: usize,
    cols: usize,
    /// Interior flags indexed `r * cols + c`, row 0 at the bottom.
    inside: Vec<bool>,
    pixel: f64,
    origin: Point,
    area: f64,
    cache: Mutex<LruCache<(u64, u64), Arc<[f64]>>>,
}

impl std::fmt::Debug for MaskedDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MaskedDomain")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("pixel", &self.pixel)
            .field("area", &self.area)
            .finish()
    }
}

impl MaskedDomain {
    /// `side` is the length in domain units of the longer raster axis; the
    /// bounding box is centred on the origin.
    pub fn new(raster: &MaskRaster, side: f64, cache_budget: usize) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::Domain(format!("mask side length must be positive, got {side}")));
        }
        let (rows, cols) = (raster.rows, raster.cols);
        let mut inside = vec![false; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                inside[(rows - 1 - r) * cols + c] = raster.cells[r * cols + c];
            }
        }
        let count = inside.iter().filter(|&&b| b).count();
        if count == 0 {
            return Err(Error::Domain("mask has no interior cells".into()));
        }
        check_topology(&inside, rows, cols)?;
        let pixel = side / rows.max(cols) as f64;
        let origin = Point::new(-0.5 * pixel * cols as f64, -0.5 * pixel * rows as f64);
        let budget = NonZeroUsize::new(cache_budget.max(1)).unwrap();
        Ok(MaskedDomain {
            rows,
            cols,
            inside,
            pixel,
            origin,
            area: count as f64 * pixel * pixel,
            cache: Mutex::new(LruCache::new(budget)),
        })
    }

    pub fn load(path: &Path, side: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::new(&MaskRaster::parse(&text)?, side, DEFAULT_CACHE_BUDGET)
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn pixel(&self) -> f64 {
        self.pixel
    }

    pub fn bbox(&self) -> (Point, Point) {
        let hi = self.origin + Point::new(self.pixel * self.cols as f64, self.pixel * self.rows as f64);
        (self.origin, hi)
    }

    fn pixel_of(&self, p: Point) -> Option<(usize, usize)> {
        let fx = (p.x - self.origin.x) / self.pixel;
        let fy = (p.y - self.origin.y) / self.pixel;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (c, r) = (fx.floor() as usize, fy.floor() as usize);
        (c < self.cols && r < self.rows).then_some((r, c))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.is_finite()
            && self
                .pixel_of(p)
                .is_some_and(|(r, c)| self.inside[r * self.cols + c])
    }

    /// Distance from `p` to the nearest exterior pixel centre, where the
    /// Dirichlet data of the harmonic problem lives.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        let (pr, pc) = (self.rows + 2, self.cols + 2);
        let mut best = f64::INFINITY;
        for r in 0..pr {
            for c in 0..pc {
                if !self.node_inside(r, c) {
                    best = best.min(p.dist(self.node_center(r, c)));
                }
            }
        }
        best
    }

    // Padded node grid: node (r, c) is pixel (r − 1, c − 1).
    fn node_inside(&self, r: usize, c: usize) -> bool {
        r >= 1 && c >= 1 && r <= self.rows && c <= self.cols && self.inside[(r - 1) * self.cols + (c - 1)]
    }

    fn node_center(&self, r: usize, c: usize) -> Point {
        self.origin
            + Point::new(
                (c as f64 - 0.5) * self.pixel,
                (r as f64 - 0.5) * self.pixel,
            )
    }

    fn padded_cols(&self) -> usize {
        self.cols + 2
    }

    /// The discrete harmonic field `h(x, ·)` on the padded node grid.
    pub fn regular_field(&self, x: Point) -> Arc<[f64]> {
        let key = (x.x.to_bits(), x.y.to_bits());
        if let Some(f) = self.cache.lock().get(&key) {
            return f.clone();
        }
        let field: Arc<[f64]> = self.solve_harmonic(x).into();
        self.cache.lock().put(key, field.clone());
        field
    }

    fn solve_harmonic(&self, x: Point) -> Vec<f64> {
        let (pr, pc) = (self.rows + 2, self.cols + 2);
        let mut u = vec![0.0; pr * pc];
        let mut scale: f64 = 0.0;
        let mut bsum = 0.0;
        let mut bcount = 0usize;
        for r in 0..pr {
            for c in 0..pc {
                if !self.node_inside(r, c) {
                    let v = free_kernel(x, self.node_center(r, c));
                    u[r * pc + c] = v;
                    scale = scale.max(v.abs());
                    bsum += v;
                    bcount += 1;
                }
            }
        }
        let mean = bsum / bcount as f64;
        let interior: Vec<usize> = (0..pr * pc)
            .filter(|&k| self.node_inside(k / pc, k % pc))
            .collect();
        for &k in &interior {
            u[k] = mean;
        }
        let (red, black): (Vec<usize>, Vec<usize>) =
            interior.iter().partition(|&&k| (k / pc + k % pc) % 2 == 0);
        let n = self.rows.max(self.cols) as f64;
        let relax = 2.0 / (1.0 + (std::f64::consts::PI / (n + 1.0)).sin());
        let tol = HARMONIC_TOL * scale.max(1e-300);
        for sweep in 0..MAX_SWEEPS {
            for set in [&red, &black] {
                for &k in set.iter() {
                    let avg = 0.25 * (u[k - 1] + u[k + 1] + u[k - pc] + u[k + pc]);
                    u[k] += relax * (avg - u[k]);
                }
            }
            if sweep % 8 == 7 && max_residual(&u, &interior, pc) <= tol {
                break;
            }
        }
        u
    }

    /// Bilinear interpolation of a padded node field.
    pub fn interpolate(&self, field: &[f64], p: Point) -> f64 {
        let pc = self.padded_cols();
        let fx = (p.x - self.origin.x) / self.pixel + 0.5;
        let fy = (p.y - self.origin.y) / self.pixel + 0.5;
        let c0 = (fx.floor().max(0.0) as usize).min(self.cols);
        let r0 = (fy.floor().max(0.0) as usize).min(self.rows);
        let tx = (fx - c0 as f64).clamp(0.0, 1.0);
        let ty = (fy - r0 as f64).clamp(0.0, 1.0);
        let at = |r: usize, c: usize| field[r * pc + c];
        (1.0 - ty) * ((1.0 - tx) * at(r0, c0) + tx * at(r0, c0 + 1))
            + ty * ((1.0 - tx) * at(r0 + 1, c0) + tx * at(r0 + 1, c0 + 1))
    }

    pub fn regular(&self, x: Point, y: Point) -> f64 {
        self.interpolate(&self.regular_field(x), y)
    }

    /// `∇ₓ h(x, y)`, using the symmetry of `h` to differentiate the field of
    /// source `y` at `x` by central differences.
    pub fn regular_grad_x(&self, x: Point, y: Point) -> Point {
        let f = self.regular_field(y);
        let d = self.pixel;
        let gx = (self.interpolate(&f, x + Point::new(d, 0.0)) - self.interpolate(&f, x - Point::new(d, 0.0)))
            / (2.0 * d);
        let gy = (self.interpolate(&f, x + Point::new(0.0, d)) - self.interpolate(&f, x - Point::new(0.0, d)))
            / (2.0 * d);
        Point::new(gx, gy)
    }

    pub fn robin(&self, x: Point) -> f64 {
        0.5 * self.regular(x, x)
    }

    pub fn robin_grad(&self, x: Point) -> Point {
        let d = 0.25 * self.pixel;
        let diff = |e: Point| {
            let (p, m) = (x + e, x - e);
            match (self.contains(p), self.contains(m)) {
                (true, true) => (self.robin(p) - self.robin(m)) / (2.0 * d),
                (true, false) => (self.robin(p) - self.robin(x)) / d,
                (false, true) => (self.robin(x) - self.robin(m)) / d,
                (false, false) => 0.0,
            }
        };
        Point::new(diff(Point::new(d, 0.0)), diff(Point::new(0.0, d)))
    }

    /// Max-norm of the 5-point Laplacian of a cached field over interior nodes,
    /// relative to the largest boundary value.
    pub fn harmonic_residual(&self, field: &[f64]) -> f64 {
        let pc = self.padded_cols();
        let pr = self.rows + 2;
        let interior: Vec<usize> = (0..pr * pc)
            .filter(|&k| self.node_inside(k / pc, k % pc))
            .collect();
        let scale = (0..pr * pc)
            .filter(|&k| !self.node_inside(k / pc, k % pc))
            .map(|k| field[k].abs())
            .fold(0.0, f64::max);
        max_residual(field, &interior, pc) / scale.max(1e-300)
    }

    pub fn cached_sources(&self) -> usize {
        self.cache.lock().len()
    }
}

fn max_residual(u: &[f64], interior: &[usize], pc: usize) -> f64 {
    interior
        .iter()
        .map(|&k| (0.25 * (u[k - 1] + u[k + 1] + u[k - pc] + u[k + pc]) - u[k]).abs())
        .fold(0.0, f64::max)
}

/// Interior must be one 4-connected component and its complement (with a
/// one-pixel frame) one 8-connected component, i.e. no holes.
fn check_topology(inside: &[bool], rows: usize, cols: usize) -> Result<()> {
    let start = inside.iter().position(|&b| b).unwrap();
    let seen = flood(rows, cols, start, |k| inside[k], false);
    if seen != inside.iter().filter(|&&b| b).count() {
        return Err(Error::Domain("mask interior is not connected".into()));
    }
    let (pr, pc) = (rows + 2, cols + 2);
    let outside = |k: usize| {
        let (r, c) = (k / pc, k % pc);
        !(r >= 1 && c >= 1 && r <= rows && c <= cols && inside[(r - 1) * cols + (c - 1)])
    };
    let total = (0..pr * pc).filter(|&k| outside(k)).count();
    if flood(pr, pc, 0, outside, true) != total {
        return Err(Error::Domain(
            "mask domain is multiply connected (interior has holes)".into(),
        ));
    }
    Ok(())
}

fn flood(rows: usize, cols: usize, start: usize, member: impl Fn(usize) -> bool, diag: bool) -> usize {
    let mut seen = vec![false; rows * cols];
    let mut stack = vec![start];
    seen[start] = true;
    let mut count = 0;
    while let Some(k) = stack.pop() {
        count += 1;
        let (r, c) = ((k / cols) as isize, (k % cols) as isize);
        for dr in -1isize..=1 {
            for dc in -1isize..=1 {
                if (dr == 0 && dc == 0) || (!diag && dr != 0 && dc != 0) {
                    continue;
                }
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                    continue;
                }
                let nk = nr as usize * cols + nc as usize;
                if !seen[nk] && member(nk) {
                    seen[nk] = true;
                    stack.push(nk);
                }
            }
        }
    }
    count
}
