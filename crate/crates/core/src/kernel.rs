//! Exact cell integrals of the planar logarithmic kernel.
//!
//! The free-space part of every Green's function here is `(1/2π) ln(1/|x−y|)`.
//! Over an axis-aligned rectangle its integral has a closed form built from
//! the mixed antiderivative
//!
//! ```text
//! Φ(u, v) = u v ln r − (3/2) u v + (u²/2) atan(v/u) + (v²/2) atan(u/v),   r = |(u, v)|
//! ```
//!
//! which satisfies `∂²Φ/∂u∂v = ln r`. Rectangle integrals follow by
//! inclusion–exclusion over the four corners.

use crate::point::Point;
use std::f64::consts::PI;

pub const INV_2PI: f64 = 1.0 / (2.0 * PI);
pub const INV_4PI: f64 = 1.0 / (4.0 * PI);

/// Mean of `ln(1/|u|)` over the unit square centred at the origin.
///
/// Closed form `3/2 − π/4 + (ln 2)/2`; the test suite re-derives it with
/// adaptive quadrature. The mean of `ln(1/|x−y|)` over a square cell of side
/// `h` centred at `x` is then `ln(1/h) + SELF_CELL_LOG_MEAN`.
pub const SELF_CELL_LOG_MEAN: f64 = 1.061_175_426_882_524_4;

/// Cells whose centre lies within this many spacings of an evaluation point
/// are integrated exactly instead of by the midpoint rule.
pub const NEAR_CELLS: f64 = 6.0;

#[inline]
fn half_ln_r2(u: f64, v: f64) -> f64 {
    let r2 = u * u + v * v;
    if r2 == 0.0 {
        0.0
    } else {
        0.5 * r2.ln()
    }
}

#[inline]
fn u2_atan(u: f64, v: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u * (v / u).atan()
    }
}

#[inline]
fn phi(u: f64, v: f64) -> f64 {
    let ln_r = half_ln_r2(u, v);
    u * v * ln_r - 1.5 * u * v + 0.5 * u2_atan(u, v) + 0.5 * u2_atan(v, u)
}

/// ∂Φ/∂u = v ln r − v + u atan(v/u).
#[inline]
fn phi_u(u: f64, v: f64) -> f64 {
    let ln_r = half_ln_r2(u, v);
    let t = if u == 0.0 { 0.0 } else { u * (v / u).atan() };
    v * ln_r - v + t
}

/// `∫_{[lo, hi]} ln|p − y| dy` for an axis-aligned rectangle.
pub fn rect_log_integral(p: Point, lo: Point, hi: Point) -> f64 {
    let (u0, u1) = (lo.x - p.x, hi.x - p.x);
    let (v0, v1) = (lo.y - p.y, hi.y - p.y);
    phi(u1, v1) - phi(u0, v1) - phi(u1, v0) + phi(u0, v0)
}

/// Gradient with respect to `p` of [`rect_log_integral`].
pub fn rect_log_integral_grad(p: Point, lo: Point, hi: Point) -> Point {
    let (u0, u1) = (lo.x - p.x, hi.x - p.x);
    let (v0, v1) = (lo.y - p.y, hi.y - p.y);
    // d/dp_x of Φ(U − p_x, V − p_y) = −Φ_u; Φ is symmetric so Φ_v(u, v) = Φ_u(v, u).
    let gx = -(phi_u(u1, v1) - phi_u(u0, v1) - phi_u(u1, v0) + phi_u(u0, v0));
    let gy = -(phi_u(v1, u1) - phi_u(v1, u0) - phi_u(v0, u1) + phi_u(v0, u0));
    Point::new(gx, gy)
}

/// Mean of `(1/2π) ln(1/|p − y|)` over the square cell of side `h` centred at `c`.
pub fn cell_mean_free_kernel(p: Point, c: Point, h: f64) -> f64 {
    let half = Point::new(0.5 * h, 0.5 * h);
    -INV_2PI * rect_log_integral(p, c - half, c + half) / (h * h)
}

/// Gradient in `p` of [`cell_mean_free_kernel`].
pub fn cell_mean_free_kernel_grad(p: Point, c: Point, h: f64) -> Point {
    let half = Point::new(0.5 * h, 0.5 * h);
    rect_log_integral_grad(p, c - half, c + half) * (-INV_2PI / (h * h))
}

/// `(1/2π) ln(1/|p − c|)` for `p ≠ c`.
#[inline]
pub fn free_kernel(p: Point, c: Point) -> f64 {
    -INV_4PI * (p - c).norm_sq().ln()
}

/// `∇_p (1/2π) ln(1/|p − c|) = −(p − c) / (2π |p − c|²)`.
#[inline]
pub fn free_kernel_grad(p: Point, c: Point) -> Point {
    let d = p - c;
    d * (-INV_2PI / d.norm_sq())
}

/// Self-cell value `(1/2π)(ln(1/h) + c₀)`.
pub fn self_cell_free_kernel(h: f64) -> f64 {
    INV_2PI * ((1.0 / h).ln() + SELF_CELL_LOG_MEAN)
}
