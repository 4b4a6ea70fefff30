//! Convex-layer peeling for point sets in the d-dimensional unit ball.
//!
//! The crate is organised bottom-up:
//!
//! - [`geom`]: points, point sets, ball constants, minimum distance and support values.
//! - [`peeling`]: extreme-point detection and the peeling process.
//! - [`nets`]: maximal δ-separated sets on spheres.
//! - [`tangent`]: the tangent polytope of a spherical net and its radial/support checks.
//! - [`constructions`]: every point-set family used for layer-number experiments.
//! - [`analysis`]: evenness estimation, outward push, caps, bound ratios, exponent fits, sweeps.
//! - [`io`]: the `PSET v1`, `LAYERS v1` and `SWEEP v1` text formats.

pub mod analysis;
pub mod constructions;
mod error;
pub mod geom;
pub mod grid;
pub mod io;
pub mod nets;
pub mod peeling;
pub mod rng;
pub mod tangent;

pub use error::{Error, Result};
pub use geom::{PointSet, EPS_GEOM};
