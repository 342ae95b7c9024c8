//! Steady vortex patches of the planar vortex-wave system.
//!
//! A point vortex of unit strength at `x` interacts with a vortex patch of
//! prescribed strength `μ` and unit circulation. Steady states maximize
//! `F(ω, x) = E(ω) + G∗ω(x) − H(x)`; this crate computes them by alternating
//! rearrangement ascent on a Cartesian grid, certifies them numerically, and
//! runs the parameter sweeps that exhibit their asymptotics.

pub mod cli;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod field;
pub mod kernel;
mod point;
pub mod solver;
pub mod sum;
pub mod verify;

pub use domain::{build_grid, Domain, Grid};
pub use error::{Error, Result};
pub use field::{PatchField, ScalarField};
pub use point::Point;
