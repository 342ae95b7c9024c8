//! Green-kernel quadrature: stream functions, point-vortex potentials and
//! the interaction `G∗ω(x)` with its gradient.
//!
//! Two discretizations are used, each internally consistent:
//!
//! * `stream` is collocation at cell centres with the midpoint rule over
//!   source cells, except the self-cell term, which uses the exact cell mean
//!   of the log kernel. The resulting matrix is symmetric on the disk.
//! * `point_stream`, `interaction` and `interaction_gradient` all use the
//!   same per-cell kernel [`cell_kernel`]: the exact cell mean of the log
//!   part for cells within [`NEAR_CELLS`] spacings of the point, the midpoint
//!   value elsewhere. Hence `interaction(ω, x) = ∑ ω·point_stream(x)·a`.

use super::{PatchField, ScalarField};
use crate::domain::{disk, Domain, Grid, MaskedDomain};
use crate::error::{Error, Result};
use crate::kernel::{
    cell_mean_free_kernel, cell_mean_free_kernel_grad, free_kernel, free_kernel_grad,
    self_cell_free_kernel, INV_4PI, NEAR_CELLS,
};
use crate::point::Point;
use crate::sum::Accumulator;
use rayon::prelude::*;
use std::sync::Arc;

/// Anything that can act as a nonnegative vorticity on a grid.
pub trait Vorticity {
    fn grid(&self) -> &Arc<Grid>;
    /// Nonzero cells with their values, ascending by cell index.
    fn sparse(&self) -> Result<Vec<(usize, f64)>>;
}

impl Vorticity for ScalarField {
    fn grid(&self) -> &Arc<Grid> {
        ScalarField::grid(self)
    }

    fn sparse(&self) -> Result<Vec<(usize, f64)>> {
        let mut out = Vec::new();
        for (k, &v) in self.values().iter().enumerate() {
            if v < 0.0 {
                return Err(Error::Contract(format!(
                    "vorticity must be nonnegative, found {v} at cell {k}"
                )));
            }
            if v != 0.0 {
                out.push((k, v));
            }
        }
        Ok(out)
    }
}

impl Vorticity for PatchField {
    fn grid(&self) -> &Arc<Grid> {
        PatchField::grid(self)
    }

    fn sparse(&self) -> Result<Vec<(usize, f64)>> {
        Ok(self.sparse_values())
    }
}

/// Kernel of a fixed evaluation point `x` against cells of spacing `h`.
struct PointKernel<'a> {
    domain: &'a Domain,
    x: Point,
    h: f64,
    near2: f64,
    field: Option<(&'a MaskedDomain, Arc<[f64]>)>,
}

impl<'a> PointKernel<'a> {
    fn new(domain: &'a Domain, x: Point, h: f64) -> Self {
        let field = match domain {
            Domain::Masked(m) => Some((m, m.regular_field(x))),
            Domain::UnitDisk => None,
        };
        let r = NEAR_CELLS * h;
        PointKernel {
            domain,
            x,
            h,
            near2: r * r,
            field,
        }
    }

    #[inline]
    fn regular(&self, c: Point) -> f64 {
        match &self.field {
            Some((m, f)) => m.interpolate(f, c),
            None => disk::regular(self.x, c),
        }
    }

    #[inline]
    fn value(&self, c: Point) -> f64 {
        if (self.x - c).norm_sq() <= self.near2 {
            cell_mean_free_kernel(self.x, c, self.h) - self.regular(c)
        } else {
            match &self.field {
                Some(_) => free_kernel(self.x, c) - self.regular(c),
                None => disk::green(self.x, c),
            }
        }
    }

    fn grad(&self, c: Point) -> Point {
        let free = if (self.x - c).norm_sq() <= self.near2 {
            cell_mean_free_kernel_grad(self.x, c, self.h)
        } else {
            free_kernel_grad(self.x, c)
        };
        free - self.domain.regular_grad_x(self.x, c)
    }
}

/// Per-cell value of the potential of a unit point vortex at `x`.
pub fn cell_kernel(domain: &Domain, x: Point, center: Point, h: f64) -> f64 {
    PointKernel::new(domain, x, h).value(center)
}

/// Gradient in `x` of [`cell_kernel`].
pub fn cell_kernel_grad(domain: &Domain, x: Point, center: Point, h: f64) -> Point {
    PointKernel::new(domain, x, h).grad(center)
}

fn check_inside(grid: &Grid, x: Point) -> Result<()> {
    if grid.domain().contains(x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("point {x} is not an interior point")))
    }
}

/// Sources sharing one weight, stored column-wise for the inner loops.
/// Patch cells almost all fall in a single group.
struct SourceGroup {
    weight: f64,
    index: Vec<usize>,
    px: Vec<f64>,
    py: Vec<f64>,
    norm2: Vec<f64>,
}

impl SourceGroup {
    fn push(&mut self, k: usize, y: Point) {
        self.index.push(k);
        self.px.push(y.x);
        self.py.push(y.y);
        self.norm2.push(y.norm_sq());
    }
}

fn group_sources(grid: &Grid, sparse: &[(usize, f64)]) -> Vec<SourceGroup> {
    let a = grid.cell_area();
    let mut groups: Vec<SourceGroup> = Vec::new();
    for &(k, v) in sparse {
        let w = v * a;
        let pos = match groups.iter().position(|g| g.weight.to_bits() == w.to_bits()) {
            Some(p) => p,
            None => {
                groups.push(SourceGroup {
                    weight: w,
                    index: Vec::new(),
                    px: Vec::new(),
                    py: Vec::new(),
                    norm2: Vec::new(),
                });
                groups.len() - 1
            }
        };
        groups[pos].push(k, grid.center(k));
    }
    groups
}

/// Logarithms are batched: `∑ ln rⱼ = ln ∏ rⱼ` over chunks of this size.
/// Factors stay within about 1e±6, so chunk products cannot leave the f64 range.
const LOG_CHUNK: usize = 16;

/// `∑ⱼ ln(imageⱼ / |x − yⱼ|²)` over one group on the unit disk, skipping the
/// self cell `i`. Summing this times `weight/4π` gives the group's `G∗ω(x)`.
fn disk_log_sum(i: usize, x: Point, g: &SourceGroup) -> f64 {
    let xn = x.norm_sq();
    let (tx, ty) = (2.0 * x.x, 2.0 * x.y);
    let mut acc = Accumulator::new();
    let n = g.index.len();
    let mut start = 0;
    while start < n {
        let end = (start + LOG_CHUNK).min(n);
        let (mut num, mut den) = ([1.0f64; 2], [1.0f64; 2]);
        for j in start..end {
            let (yx, yy) = (g.px[j], g.py[j]);
            let dx = x.x - yx;
            let dy = x.y - yy;
            let same = g.index[j] == i;
            let nv = xn * g.norm2[j] - (tx * yx + ty * yy) + 1.0;
            let dv = dx * dx + dy * dy;
            let lane = j & 1;
            num[lane] *= if same { 1.0 } else { nv };
            den[lane] *= if same { 1.0 } else { dv };
        }
        acc.add(((num[0] * num[1]) / (den[0] * den[1])).ln());
        start = end;
    }
    acc.value()
}

/// `∑ⱼ ln |x − yⱼ|²` over one group, skipping the self cell `i`.
fn free_log_sum(i: usize, x: Point, g: &SourceGroup) -> f64 {
    let mut acc = Accumulator::new();
    let n = g.index.len();
    let mut start = 0;
    while start < n {
        let end = (start + LOG_CHUNK).min(n);
        let mut prod = [1.0f64; 2];
        for j in start..end {
            let dx = x.x - g.px[j];
            let dy = x.y - g.py[j];
            let dv = dx * dx + dy * dy;
            prod[j & 1] *= if g.index[j] == i { 1.0 } else { dv };
        }
        acc.add((prod[0] * prod[1]).ln());
        start = end;
    }
    acc.value()
}

/// `ψ = G∗ω` at every interior cell centre.
pub fn stream<V: Vorticity + ?Sized>(omega: &V) -> Result<ScalarField> {
    let grid = omega.grid().clone();
    let sparse = omega.sparse()?;
    if sparse.is_empty() {
        return Ok(ScalarField::zeros(grid));
    }
    let a = grid.cell_area();
    let self_free = self_cell_free_kernel(grid.spacing());
    let groups = group_sources(&grid, &sparse);
    let mut self_weight = vec![0.0; grid.len()];
    for &(k, v) in &sparse {
        self_weight[k] = v * a;
    }
    let values: Vec<f64> = match grid.domain().as_ref() {
        Domain::UnitDisk => (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let x = grid.center(i);
                let mut acc = Accumulator::new();
                for g in &groups {
                    acc.add(g.weight * INV_4PI * disk_log_sum(i, x, g));
                }
                if self_weight[i] != 0.0 {
                    acc.add(self_weight[i] * (self_free - disk::regular(x, x)));
                }
                acc.value()
            })
            .collect(),
        Domain::Masked(m) => {
            let fields: Vec<Vec<Arc<[f64]>>> = groups
                .iter()
                .map(|g| {
                    g.px.iter()
                        .zip(&g.py)
                        .map(|(&x, &y)| m.regular_field(Point::new(x, y)))
                        .collect()
                })
                .collect();
            (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let x = grid.center(i);
                    let mut acc = Accumulator::new();
                    for (g, fs) in groups.iter().zip(&fields) {
                        let mut reg = Accumulator::new();
                        for f in fs {
                            reg.add(m.interpolate(f, x));
                        }
                        // (1/2π) ln(1/|x − y|) = −(1/4π) ln |x − y|²
                        acc.add(g.weight * (-INV_4PI * free_log_sum(i, x, g) - reg.value()));
                    }
                    if self_weight[i] != 0.0 {
                        // h(x, x) was subtracted with the group; add the free part.
                        acc.add(self_weight[i] * self_free);
                    }
                    acc.value()
                })
                .collect()
        }
    };
    ScalarField::new(grid, values)
}

/// The field `G(x, ·)` sampled per cell (see [`cell_kernel`]).
pub fn point_stream(grid: &Arc<Grid>, x: Point) -> Result<ScalarField> {
    check_inside(grid, x)?;
    let kernel = PointKernel::new(grid.domain(), x, grid.spacing());
    let values = grid
        .cells()
        .par_iter()
        .map(|c| kernel.value(c.center))
        .collect();
    ScalarField::new(grid.clone(), values)
}

/// `G∗ω(x)`.
pub fn interaction<V: Vorticity + ?Sized>(omega: &V, x: Point) -> Result<f64> {
    let grid = omega.grid();
    check_inside(grid, x)?;
    let sparse = omega.sparse()?;
    let kernel = PointKernel::new(grid.domain(), x, grid.spacing());
    let a = grid.cell_area();
    let mut acc = Accumulator::new();
    for (k, v) in sparse {
        acc.add(v * a * kernel.value(grid.center(k)));
    }
    Ok(acc.value())
}

/// `∇(G∗ω)(x)`, differentiating the kernel rather than the sampled stream.
pub fn interaction_gradient<V: Vorticity + ?Sized>(omega: &V, x: Point) -> Result<Point> {
    let grid = omega.grid();
    check_inside(grid, x)?;
    let sparse = omega.sparse()?;
    let kernel = PointKernel::new(grid.domain(), x, grid.spacing());
    let a = grid.cell_area();
    let (mut gx, mut gy) = (Accumulator::new(), Accumulator::new());
    for (k, v) in sparse {
        let g = kernel.grad(grid.center(k));
        gx.add(v * a * g.x);
        gy.add(v * a * g.y);
    }
    Ok(Point::new(gx.value(), gy.value()))
}
