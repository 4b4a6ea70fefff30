use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::SweepRecord;
use crate::geom::{check_unit, dot, PointSet, UNIT_TOL};
use crate::rng::{self, stream};
use crate::{Error, Result};

fn check_inner_radius(inner_radius: f64) -> Result<()> {
    if !(inner_radius > 0.0 && inner_radius < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "inner radius must lie in (0, 1), got {inner_radius}"
        )));
    }
    Ok(())
}

/// Points of `X` in the cap `{y : ⟨y, u⟩ ≥ inner_radius}` cut off by the
/// supporting hyperplane of `inner_radius·B^d` with outer normal `u`.
pub fn cap_count(x: &PointSet, u: &[f64], inner_radius: f64) -> Result<usize> {
    if u.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: u.len(),
        });
    }
    check_unit(u, UNIT_TOL)?;
    check_inner_radius(inner_radius)?;
    Ok(x.iter().filter(|p| dot(p, u) >= inner_radius).count())
}

/// Largest cap count over sampled directions. This is only a lower bound
/// on the maximum over all caps, which `sampled` records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapEstimate {
    pub inner_radius: f64,
    pub directions: usize,
    pub max_count: usize,
    pub sampled: bool,
}

pub fn max_cap_sampled(
    x: &PointSet,
    inner_radius: f64,
    directions: usize,
    seed: u64,
) -> Result<CapEstimate> {
    check_inner_radius(inner_radius)?;
    if directions == 0 {
        return Err(Error::InvalidParameter("directions must be at least 1".into()));
    }
    let mut rng = rng::stream_rng(seed, stream::CAPS);
    let dirs: Vec<Vec<f64>> = (0..directions)
        .map(|_| rng::unit_vector(&mut rng, x.dim()))
        .collect();
    let max_count = dirs
        .par_iter()
        .map(|u| x.iter().filter(|p| dot(p, u) >= inner_radius).count())
        .max()
        .unwrap_or(0);
    Ok(CapEstimate {
        inner_radius,
        directions,
        max_count,
        sampled: true,
    })
}

/// Dimensionless ratios of one sweep record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// `L / n^{1/d}`, bounded below for evenly distributed families.
    pub lower_ratio: f64,
    /// `L / n^{2/d}`, bounded above for evenly distributed families.
    pub upper_ratio: f64,
    /// `max_layer · μ^{d−1}`, bounded above for separated sets.
    pub layer_density: f64,
}

pub fn check_bounds(record: &SweepRecord) -> BoundsReport {
    let d = record.spec.dim as f64;
    let n = record.n as f64;
    let l = record.layers as f64;
    BoundsReport {
        lower_ratio: l / n.powf(1.0 / d),
        upper_ratio: l / n.powf(2.0 / d),
        layer_density: record.max_layer as f64 * record.mu.powf(d - 1.0),
    }
}
