//! Dimension-generic point storage and the handful of metric primitives every
//! other module builds on.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::grid::SpatialGrid;
use crate::{Error, Result};

/// Default geometric tolerance. All constructions live in the unit ball, so
/// this is both an absolute and a relative tolerance.
pub const EPS_GEOM: f64 = 1e-9;

/// Tolerance on `|u| = 1` for direction arguments.
pub const UNIT_TOL: f64 = 1e-12;

/// A finite list of points sharing one dimension, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self {
            dim,
            coords: Vec::new(),
        })
    }

    pub fn with_capacity(dim: usize, n: usize) -> Result<Self> {
        let mut set = Self::new(dim)?;
        set.coords.reserve(n * dim);
        Ok(set)
    }

    /// Builds a set from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len() % dim,
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim });
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<I, P>(dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[f64]>,
    {
        let mut set = Self::new(dim)?;
        for p in points {
            set.push(p.as_ref())?;
        }
        Ok(set)
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: self.len() });
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub fn extend_from(&mut self, other: &PointSet) -> Result<()> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        self.coords.extend_from_slice(&other.coords);
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// The points at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            coords,
        }
    }

    pub fn scaled(&self, factor: f64) -> PointSet {
        PointSet {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * factor).collect(),
        }
    }

    /// Largest Euclidean norm over the set (0 for an empty set).
    pub fn max_norm(&self) -> f64 {
        self.iter().map(norm).fold(0.0, f64::max)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// Returns `v / |v|`, or `None` for the zero vector.
pub fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| v.iter().map(|c| c / n).collect())
}

pub(crate) fn check_unit(u: &[f64], tol: f64) -> Result<()> {
    let n = norm(u);
    if (n - 1.0).abs() > tol || !n.is_finite() {
        return Err(Error::NotUnit { norm: n });
    }
    Ok(())
}

/// Volume of the unit ball and surface area of the unit sphere in dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallConstants {
    pub dim: usize,
    pub kappa: f64,
    pub surface: f64,
}

/// `kappa = π^{d/2} / Γ(d/2 + 1)` and `surface = d · kappa`.
///
/// Computed through the two-step recurrence `κ_d = 2π/d · κ_{d−2}` from
/// `κ_0 = 1`, `κ_1 = 2`, which avoids a Gamma function entirely.
pub fn ball_constants(dim: usize) -> Result<BallConstants> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut kappa = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if dim.is_multiple_of(2) { 2 } else { 3 };
    while k <= dim {
        kappa *= 2.0 * PI / k as f64;
        k += 2;
    }
    Ok(BallConstants {
        dim,
        kappa,
        surface: dim as f64 * kappa,
    })
}

/// Minimum pairwise distance by the plain O(n²) scan.
pub fn min_distance_brute(x: &PointSet) -> Result<f64> {
    Ok(closest_pair_brute(x)?.2)
}

fn closest_pair_brute(x: &PointSet) -> Result<(usize, usize, f64)> {
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..n {
        let p = x.point(i);
        for j in i + 1..n {
            let d = dist(p, x.point(j));
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    Ok(best)
}

/// Minimum pairwise Euclidean distance `μ(X)`.
///
/// Uses a bucket grid when the set is large and the dimension small; the
/// distances compared are computed with the same expression as
/// [`min_distance_brute`], so both paths return the identical value.
pub fn min_distance(x: &PointSet) -> Result<f64> {
    Ok(closest_pair(x)?.2)
}

/// Indices and distance of a closest pair (`i < j`).
pub fn closest_pair(x: &PointSet) -> Result<(usize, usize, f64)> {
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    if n < 64 || x.dim() > 6 {
        return closest_pair_brute(x);
    }
    // An upper bound h on μ: nearest-neighbour distances of a few strided
    // probes. The closest pair then lies in neighbouring cells of size h.
    let stride = (n / 16).max(1);
    let mut h = f64::INFINITY;
    let mut best = (0, 1, f64::INFINITY);
    for i in (0..n).step_by(stride) {
        let p = x.point(i);
        for j in 0..n {
            if j != i {
                let d = dist(p, x.point(j));
                if d < best.2 {
                    best = (i.min(j), i.max(j), d);
                }
                h = h.min(d);
            }
        }
    }
    if h == 0.0 {
        return Ok(best);
    }
    let mut grid = SpatialGrid::new(x.dim(), h);
    for i in 0..n {
        grid.insert(i, x.point(i));
    }
    for i in 0..n {
        let p = x.point(i);
        grid.for_each_near(p, |j| {
            if j > i {
                let d = dist(p, x.point(j));
                if d < best.2 || (d == best.2 && (i, j) < (best.0, best.1)) {
                    best = (i, j, d);
                }
            }
        });
    }
    Ok(best)
}

/// Support value `max_{x∈X} ⟨u, x⟩` for a unit direction `u`.
pub fn support_value(x: &PointSet, u: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    if u.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: u.len(),
        });
    }
    check_unit(u, UNIT_TOL)?;
    Ok(x.iter().map(|p| dot(u, p)).fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ball_constants_known_values() {
        let c1 = ball_constants(1).unwrap();
        assert_eq!((c1.kappa, c1.surface), (2.0, 2.0));
        let c2 = ball_constants(2).unwrap();
        assert!((c2.kappa - PI).abs() < 1e-15);
        assert!((c2.surface - 2.0 * PI).abs() < 1e-15);
        let c3 = ball_constants(3).unwrap();
        assert!((c3.kappa - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((c3.surface - 4.0 * PI).abs() < 1e-14);
        assert_eq!(ball_constants(0), Err(Error::ZeroDimension));
    }

    #[test]
    fn surface_is_dim_times_kappa() {
        for d in 1..=10 {
            let c = ball_constants(d).unwrap();
            assert!((c.surface - d as f64 * c.kappa).abs() <= 1e-12 * c.surface);
        }
        // κ_10 = π^5 / 120
        let c10 = ball_constants(10).unwrap();
        assert!((c10.kappa - PI.powi(5) / 120.0).abs() < 1e-12);
    }

    #[test]
    fn min_distance_line() {
        let x = PointSet::from_points(1, [[0.0], [1.0 / 3.0], [2.0 / 3.0], [1.0]]).unwrap();
        assert!((min_distance(&x).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn min_distance_coincident() {
        let x = PointSet::from_points(2, [[0.3, 0.2], [0.3, 0.2]]).unwrap();
        assert_eq!(min_distance(&x).unwrap(), 0.0);
        let single = PointSet::from_points(2, [[0.3, 0.2]]).unwrap();
        assert!(matches!(
            min_distance(&single),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn bucket_path_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100 {
            let d = 1 + trial % 4;
            let n = rng.random_range(2..2000);
            let coords: Vec<f64> = (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = PointSet::from_flat(d, coords).unwrap();
            assert_eq!(min_distance(&x).unwrap(), min_distance_brute(&x).unwrap());
        }
    }

    #[test]
    fn support_value_cases() {
        let sq = PointSet::from_points(2, [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(support_value(&sq, &[1.0, 0.0]).unwrap(), 1.0);
        let p = [0.3, -0.4];
        let single = PointSet::from_points(2, [p]).unwrap();
        let u = [0.6, -0.8];
        assert!((support_value(&single, &u).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            support_value(&sq, &[2.0, 0.0]),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn point_set_validation() {
        assert!(matches!(
            PointSet::from_flat(2, vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 0 })
        ));
        assert!(PointSet::from_flat(3, vec![0.0; 4]).is_err());
        let mut x = PointSet::new(2).unwrap();
        assert!(x.push(&[1.0]).is_err());
    }
}
