//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls the library's numerics: kernels, rankings and the
//! bathtub fill are re-derived from their definitions with plain loops.
#![allow(dead_code)]

use patchvortex::domain::MaskRaster;
use patchvortex::{build_grid, Domain, Grid, PatchField, Point};
use rand::Rng;
use std::f64::consts::PI;
use std::sync::Arc;

pub fn disk_grid(n: usize) -> Arc<Grid> {
    build_grid(Arc::new(Domain::unit_disk()), n).unwrap()
}

/// Rectangle of unit cells: `rows × cols` filled mask whose longer side is
/// `max(rows, cols)` units long.
pub fn unit_cell_grid(rows: usize, cols: usize) -> Arc<Grid> {
    let n = rows.max(cols);
    let domain = Domain::masked(&MaskRaster::filled(rows, cols), n as f64).unwrap();
    let grid = build_grid(Arc::new(domain), n).unwrap();
    assert_eq!(grid.cell_area(), 1.0);
    assert_eq!(grid.len(), rows * cols);
    grid
}

/// Green's function of the unit disk by reflection in the circle:
/// `G(x, y) = (1/2π) ln(|x − y*| |y| / |x − y|)`, `y* = y/|y|²`.
pub fn green_by_reflection(x: Point, y: Point) -> f64 {
    let free = -(x - y).norm().ln();
    let image = if y == Point::ORIGIN {
        0.0
    } else {
        let ys = y * (1.0 / y.norm_sq());
        ((x - ys).norm() * y.norm()).ln()
    };
    (free + image) / (2.0 * PI)
}

/// `h(x, x) = −(1/2π) ln(1 − |x|²)` on the disk.
pub fn regular_diagonal(x: Point) -> f64 {
    -(-x.norm_sq()).ln_1p() / (2.0 * PI)
}

/// Mean of `(1/2π) ln(1/|x − y|)` over the square of side `h` centred at `x`.
pub fn self_cell(h: f64) -> f64 {
    let c0 = 1.5 - PI / 4.0 + 0.5 * 2f64.ln();
    ((1.0 / h).ln() + c0) / (2.0 * PI)
}

/// Double-sum stream of a patch on the disk: midpoint rule between
/// distinct cells, exact free-space cell mean on the diagonal.
pub fn brute_stream(omega: &PatchField) -> Vec<f64> {
    let grid = omega.grid();
    let (a, h) = (grid.cell_area(), grid.spacing());
    let sources: Vec<(usize, f64)> = omega.sparse_values();
    (0..grid.len())
        .map(|i| {
            let x = grid.center(i);
            sources
                .iter()
                .map(|&(j, v)| {
                    let g = if i == j {
                        self_cell(h) - regular_diagonal(x)
                    } else {
                        green_by_reflection(x, grid.center(j))
                    };
                    v * a * g
                })
                .sum()
        })
        .collect()
}

/// Random patch of at most `max_cells` occupied cells, optionally with a
/// fractional cell.
pub fn random_patch(rng: &mut impl Rng, grid: &Arc<Grid>, max_cells: usize) -> PatchField {
    let count = rng.gen_range(1..=max_cells);
    let mut cells = Vec::new();
    while cells.len() < count {
        let k = rng.gen_range(0..grid.len());
        if !cells.contains(&k) {
            cells.push(k);
        }
    }
    let fractional = (count > 1 && rng.gen_bool(0.5)).then(|| (cells.pop().unwrap(), rng.gen_range(0.05..0.95)));
    let area = (cells.len() as f64 + fractional.map_or(0.0, |(_, w)| w)) * grid.cell_area();
    PatchField::new(grid.clone(), 1.0 / area, cells, fractional).unwrap()
}

/// Indices by decreasing value, equal values by increasing index, found by
/// repeated linear scans.
pub fn selection_order(values: &[f64]) -> Vec<usize> {
    let mut taken = vec![false; values.len()];
    let mut order = Vec::with_capacity(values.len());
    for _ in 0..values.len() {
        let mut best: Option<usize> = None;
        for (k, &v) in values.iter().enumerate() {
            if !taken[k] && best.map_or(true, |b| v > values[b]) {
                best = Some(k);
            }
        }
        let b = best.unwrap();
        taken[b] = true;
        order.push(b);
    }
    order
}

/// A fill of `cells` cell-areas: whole cells plus a partial cell in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fill {
    pub full: Vec<usize>,
    pub fractional: Option<(usize, f64)>,
}

fn fill(order: &[usize], start: usize, cells: f64) -> Fill {
    let whole = cells.floor() as usize;
    let rest = cells - whole as f64;
    let mut full = order[start..start + whole].to_vec();
    full.sort_unstable();
    Fill {
        full,
        fractional: (rest > 0.0).then(|| (order[start + whole], rest)),
    }
}

/// Single-level bathtub on unit cells: area `m` cells; threshold at the
/// fractional cell, else at the last whole cell.
pub fn greedy_single(psi: &[f64], m: f64) -> (Fill, f64) {
    let order = selection_order(psi);
    let f = fill(&order, 0, m);
    let b = match f.fractional {
        Some((k, _)) => psi[k],
        None => psi[order[f.full.len() - 1]],
    };
    (f, b)
}

/// Two-level bathtub on unit cells with upper area `m2` and lower area `m1`:
/// the upper level takes the top cells; the lower level first completes the
/// upper level's partial cell, then continues down the ranking.
pub fn greedy_two_level(psi: &[f64], m1: f64, m2: f64) -> (Fill, Option<(usize, f64)>, Fill, f64) {
    let order = selection_order(psi);
    let upper = fill(&order, 0, m2);
    let k2 = upper.full.len();
    let c = psi[order[k2]];
    let (shared, start, rest) = match upper.fractional {
        Some((k, w)) => {
            let take = (1.0 - w).min(m1);
            (Some((k, take)), k2 + 1, m1 - take)
        }
        None => (None, k2, m1),
    };
    (upper, shared, fill(&order, start, rest), c)
}

/// Largest relative deviation `|stream − brute| / max(1, |brute|)` over
/// `instances` random patches of at most 50 cells on disk grids.
pub fn stream_oracle_max_error(seed: u64, instances: usize) -> f64 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let grids = [disk_grid(16), disk_grid(32), disk_grid(64)];
    let mut worst = 0.0f64;
    for i in 0..instances {
        let grid = &grids[i % grids.len()];
        let omega = random_patch(&mut rng, grid, 50);
        let fast = patchvortex::field::stream(&omega).unwrap();
        for (f, b) in fast.values().iter().zip(brute_stream(&omega)) {
            worst = worst.max((f - b).abs() / b.abs().max(1.0));
        }
    }
    worst
}

fn random_psi(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    // Half the instances draw from a few integer levels to force ties.
    let levels = if rng.gen_bool(0.5) { Some(rng.gen_range(2..12)) } else { None };
    (0..len)
        .map(|_| match levels {
            Some(l) => rng.gen_range(0..l) as f64,
            None => rng.gen_range(-1.0..1.0),
        })
        .collect()
}

/// A cell count that is either whole or has a fraction well inside (0, 1).
fn random_area(rng: &mut impl Rng, lo: usize, hi: usize) -> f64 {
    let whole = rng.gen_range(lo..hi) as f64;
    if rng.gen_bool(0.3) {
        whole
    } else {
        whole + rng.gen_range(0.05..0.95)
    }
}

fn describe(patch: &PatchField) -> Fill {
    let mut full = patch.full_cells().to_vec();
    full.sort_unstable();
    Fill {
        full,
        fractional: patch.fractional(),
    }
}

fn same_fill(a: &Fill, b: &Fill) -> bool {
    a.full == b.full
        && match (a.fractional, b.fractional) {
            (None, None) => true,
            (Some((i, u)), Some((j, v))) => i == j && (u - v).abs() <= 1e-9,
            _ => false,
        }
}

/// Runs both bathtub variants against the greedy references on random
/// grids of 16..=32 unit cells per side; returns a description of every
/// mismatch.
pub fn bathtub_oracle_mismatches(seed: u64, instances: usize) -> Vec<String> {
    use patchvortex::solver::{bathtub_single, bathtub_two_level};
    use patchvortex::ScalarField;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for i in 0..instances {
        let (rows, cols) = (rng.gen_range(16..=32), rng.gen_range(16..=32));
        let grid = unit_cell_grid(rows, cols);
        let psi = random_psi(&mut rng, grid.len());
        let field = ScalarField::new(grid.clone(), psi.clone()).unwrap();
        let cells = grid.len();

        let m = random_area(&mut rng, 1, cells - 1);
        let (patch, b) = bathtub_single(&field, 1.0 / m).unwrap();
        let (want, want_b) = greedy_single(&psi, m);
        if !same_fill(&describe(&patch), &want) || b != want_b {
            bad.push(format!("single #{i} ({rows}x{cols}, m = {m})"));
        }

        let m2 = random_area(&mut rng, 1, cells / 4);
        let m1 = m2 + random_area(&mut rng, 1, cells / 2);
        let (lower, upper, c) = bathtub_two_level(&field, 1.0 / m1, 1.0 / m2).unwrap();
        let (want_upper, want_shared, want_lower, want_c) = greedy_two_level(&psi, m1, m2);
        let shared_ok = match (lower.shared(), want_shared) {
            (None, None) => true,
            (Some((i, u)), Some((j, v))) => i == j && (u - v).abs() <= 1e-9,
            _ => false,
        };
        if !same_fill(&describe(&upper), &want_upper)
            || !same_fill(&describe(&lower), &want_lower)
            || !shared_ok
            || c != want_c
        {
            bad.push(format!("two-level #{i} ({rows}x{cols}, m1 = {m1}, m2 = {m2})"));
        }
    }
    bad
}

/// One measured quantity against its tolerance.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tol: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.value <= self.tol
    }
}

fn random_disk_point(rng: &mut impl Rng, r_max: f64) -> Point {
    loop {
        let p = Point::new(rng.gen_range(-r_max..r_max), rng.gen_range(-r_max..r_max));
        if p.norm() < r_max {
            return p;
        }
    }
}

fn central_difference(f: impl Fn(Point) -> f64, x: Point, d: f64) -> Point {
    Point::new(
        (f(x + Point::new(d, 0.0)) - f(x - Point::new(d, 0.0))) / (2.0 * d),
        (f(x + Point::new(0.0, d)) - f(x - Point::new(0.0, d))) / (2.0 * d),
    )
}

/// Potential-theory checks on the disk: Green symmetry, gradients against
/// central differences (step 1e−5), `H(0) = 0`, and the uniform-vorticity
/// stream against `(1 − r²)/4` at `n = 256`.
pub fn potential_suite(seed: u64) -> Vec<Check> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = Domain::unit_disk();
    let mut sym = 0.0f64;
    let mut grad_g = 0.0f64;
    let mut pairs = 0;
    while pairs < 100 {
        let (x, y) = (random_disk_point(&mut rng, 0.9), random_disk_point(&mut rng, 0.9));
        if x.dist(y) < 0.05 {
            continue;
        }
        pairs += 1;
        let gxy = d.green(x, y).unwrap();
        sym = sym.max((gxy.value - d.green(y, x).unwrap().value).abs());
        let fd = central_difference(|p| d.green(p, y).unwrap().value, x, 1e-5);
        grad_g = grad_g.max((gxy.gradient_x - fd).norm() / gxy.gradient_x.norm());
    }
    let mut grad_h = 0.0f64;
    for _ in 0..100 {
        let mut x = random_disk_point(&mut rng, 0.9);
        if x.norm() < 0.05 {
            x = x * (0.05 / x.norm().max(1e-3));
        }
        let g = d.robin(x).unwrap().gradient;
        let fd = central_difference(|p| d.robin_value(p), x, 1e-5);
        grad_h = grad_h.max((g - fd).norm() / g.norm());
    }
    let h0 = d.robin(Point::ORIGIN).unwrap().value.abs();

    let grid = disk_grid(256);
    let omega = patchvortex::ScalarField::from_fn(grid.clone(), |_| 1.0).unwrap();
    let psi = patchvortex::field::stream(&omega).unwrap();
    let uniform = (0..grid.len())
        .map(|k| (psi.get(k) - 0.25 * (1.0 - grid.center(k).norm_sq())).abs())
        .fold(0.0, f64::max);

    vec![
        Check { name: "Green symmetry (100 pairs)", value: sym, tol: 1e-12 },
        Check { name: "grad_x G vs finite differences (relative)", value: grad_g, tol: 1e-6 },
        Check { name: "grad H vs finite differences (relative)", value: grad_h, tol: 1e-6 },
        Check { name: "|H(0)|", value: h0, tol: 0.0 },
        Check { name: "uniform stream vs (1 - r^2)/4, n = 256", value: uniform, tol: 5e-3 },
    ]
}
