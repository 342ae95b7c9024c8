//! Closed forms on the unit disk via the method of images.
//!
//! With `y* = y/|y|²`, `G(x, y) = (1/2π) ln(|x − y*| |y| / |x − y|)`. Using
//! `|x − y*|² |y|² = |x|²|y|² − 2 x·y + 1` the regular part becomes
//! `h(x, y) = −(1/4π) ln(|x|²|y|² − 2 x·y + 1)`, which is smooth on the open
//! disk and vanishes when either argument is the origin.

use crate::kernel::{INV_2PI, INV_4PI};
use crate::point::Point;

#[inline]
pub(crate) fn image_factor(x: Point, y: Point) -> f64 {
    x.norm_sq() * y.norm_sq() - 2.0 * x.dot(y) + 1.0
}

#[inline]
pub(crate) fn regular(x: Point, y: Point) -> f64 {
    -INV_4PI * (x.norm_sq() * y.norm_sq() - 2.0 * x.dot(y)).ln_1p()
}

pub(crate) fn regular_grad_x(x: Point, y: Point) -> Point {
    let d = image_factor(x, y);
    let num = x * (2.0 * y.norm_sq()) - y * 2.0;
    num * (-INV_4PI / d)
}

/// `G(x, y)` in one logarithm: `(1/4π) ln(image_factor / |x − y|²)`.
#[inline]
pub(crate) fn green(x: Point, y: Point) -> f64 {
    INV_4PI * (image_factor(x, y) / (x - y).norm_sq()).ln()
}

pub(crate) fn robin(x: Point) -> f64 {
    -INV_4PI * (-x.norm_sq()).ln_1p()
}

pub(crate) fn robin_grad(x: Point) -> Point {
    x * (INV_2PI / (1.0 - x.norm_sq()))
}
