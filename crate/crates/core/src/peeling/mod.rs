//! Extreme points and the peeling process.
//!
//! A point of `X` is *extreme* (a vertex of `conv X`) when its distance to
//! the hull of the remaining points exceeds the margin `eps`. Points on a
//! hull facet or edge that are not vertices are therefore kept for a later
//! round. Peeling repeatedly removes the extreme points of the survivors;
//! the number of rounds is the layer number `L(X)`.

mod frame;
mod index;
pub(crate) mod minnorm;
mod planar;

use serde::{Deserialize, Serialize};

use crate::geom::{closest_pair, PointSet, EPS_GEOM};
use crate::{Error, Result};

pub(crate) use minnorm::{nearest_in_hull, Outcome, Stop};

/// Ordered convex layers of a point set and the depth of every point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layering {
    layers: Vec<Vec<usize>>,
    depths: Vec<usize>,
}

impl Layering {
    /// Validates that `layers` partitions `0..n` into nonempty sorted layers.
    pub fn from_layers(n: usize, layers: Vec<Vec<usize>>) -> Result<Self> {
        let mut depths = vec![0usize; n];
        for (k, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::InvalidParameter(format!("layer {} is empty", k + 1)));
            }
            for &i in layer {
                if i >= n {
                    return Err(Error::InvalidParameter(format!(
                        "index {i} out of range for {n} points"
                    )));
                }
                if depths[i] != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "index {i} appears in more than one layer"
                    )));
                }
                depths[i] = k + 1;
            }
        }
        if let Some(i) = depths.iter().position(|&d| d == 0) {
            return Err(Error::InvalidParameter(format!("index {i} is in no layer")));
        }
        let mut layers = layers;
        layers.iter_mut().for_each(|l| l.sort_unstable());
        Ok(Self { layers, depths })
    }

    /// `L(X)`.
    pub fn layer_number(&self) -> usize {
        self.layers.len()
    }

    /// Layers in peeling order, each sorted ascending. Layer `k` (1-based)
    /// is `layers()[k - 1]`.
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    /// Peeling round (1-based) in which point `i` is removed.
    pub fn depth(&self, i: usize) -> usize {
        self.depths[i]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn len(&self) -> usize {
        self.depths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depths.is_empty()
    }

    pub fn max_layer_size(&self) -> usize {
        self.layers.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Which vertex finder drives [`peel_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HullBackend {
    /// Sorted sweep in d = 1, monotone chain in d = 2, frame search otherwise.
    #[default]
    Auto,
    /// The dimension-generic nearest-point frame search in every dimension.
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeelOptions {
    pub eps: f64,
    pub backend: HullBackend,
}

impl Default for PeelOptions {
    fn default() -> Self {
        Self {
            eps: EPS_GEOM,
            backend: HullBackend::Auto,
        }
    }
}

fn check_separated(x: &PointSet, eps: f64) -> Result<()> {
    if x.len() >= 2 {
        let (first, second, distance) = closest_pair(x)?;
        if distance <= eps {
            return Err(Error::Duplicate {
                first,
                second,
                distance,
            });
        }
    }
    Ok(())
}

/// Indices of the vertices of `conv X`, ascending, with the default margin.
pub fn extreme_points(x: &PointSet) -> Result<Vec<usize>> {
    extreme_points_with(x, EPS_GEOM)
}

/// Vertex test by nearest-point solves: index `i` is returned iff point `i`
/// is farther than `eps` from the hull of the other points.
pub fn extreme_points_with(x: &PointSet, eps: f64) -> Result<Vec<usize>> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    check_separated(x, eps)?;
    let all: Vec<usize> = (0..x.len()).collect();
    Ok(frame::extreme_among(x, &all, eps))
}

/// Planar monotone-chain vertices; an independent check on [`extreme_points`].
pub fn extreme_points_2d_oracle(x: &PointSet) -> Result<Vec<usize>> {
    extreme_points_2d_oracle_with(x, EPS_GEOM)
}

pub fn extreme_points_2d_oracle_with(x: &PointSet, eps: f64) -> Result<Vec<usize>> {
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: x.dim(),
        });
    }
    if x.is_empty() {
        return Err(Error::Empty);
    }
    check_separated(x, eps)?;
    Ok(planar::oracle_vertices(x, eps))
}

/// Peels `X` with default options.
pub fn peel(x: &PointSet) -> Result<Layering> {
    peel_with(x, &PeelOptions::default())
}

pub fn peel_with(x: &PointSet, opts: &PeelOptions) -> Result<Layering> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    check_separated(x, opts.eps)?;
    match (opts.backend, x.dim()) {
        (HullBackend::Auto, 1) => Ok(peel_line(x)),
        (HullBackend::Auto, 2) => peel_planar(x, opts.eps),
        _ => peel_by(x, |active| Ok(frame::extreme_among(x, active, opts.eps))),
    }
}

/// Peeling driven by an arbitrary vertex finder. `finder` receives the
/// surviving indices (ascending) and returns the subset to remove.
pub fn peel_by<F>(x: &PointSet, mut finder: F) -> Result<Layering>
where
    F: FnMut(&[usize]) -> Result<Vec<usize>>,
{
    let n = x.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut removed = vec![false; n];
    let mut layers = Vec::new();
    while !active.is_empty() {
        let layer = finder(&active)?;
        if layer.is_empty() {
            return Err(Error::PeelStalled {
                remaining: active.len(),
            });
        }
        for &i in &layer {
            removed[i] = true;
        }
        active.retain(|&i| !removed[i]);
        layers.push(layer);
    }
    Layering::from_layers(n, layers)
}

/// Peels using the planar oracle at every round (cross-validation only).
pub fn peel_with_oracle(x: &PointSet, eps: f64) -> Result<Layering> {
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: x.dim(),
        });
    }
    if x.is_empty() {
        return Err(Error::Empty);
    }
    check_separated(x, eps)?;
    peel_by(x, |active| {
        let sub = x.subset(active);
        Ok(planar::oracle_vertices(&sub, eps)
            .into_iter()
            .map(|j| active[j])
            .collect())
    })
}

fn peel_line(x: &PointSet) -> Layering {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x.point(a)[0].total_cmp(&x.point(b)[0]));
    let (mut lo, mut hi) = (0usize, order.len());
    let mut layers = Vec::new();
    while lo < hi {
        let mut layer = vec![order[lo]];
        if hi - lo > 1 {
            layer.push(order[hi - 1]);
        }
        layer.sort_unstable();
        layers.push(layer);
        lo += 1;
        hi -= 1;
    }
    Layering::from_layers(x.len(), layers).expect("sweep produces a partition")
}

fn peel_planar(x: &PointSet, eps: f64) -> Result<Layering> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| planar::lex_cmp(x.point(a), x.point(b)));
    let mut removed = vec![false; x.len()];
    let mut layers = Vec::new();
    while !order.is_empty() {
        let layer = planar::chain_vertices(x, &order, eps);
        if layer.is_empty() {
            return Err(Error::PeelStalled {
                remaining: order.len(),
            });
        }
        for &i in &layer {
            removed[i] = true;
        }
        order.retain(|&i| !removed[i]);
        layers.push(layer);
    }
    Layering::from_layers(x.len(), layers)
}

/// `L(X)`; an empty set has layer number 0.
pub fn layer_number(x: &PointSet) -> Result<usize> {
    if x.is_empty() {
        return Ok(0);
    }
    Ok(peel(x)?.layer_number())
}

#[cfg(test)]
mod tests;
