//! Maximal δ-separated point sets on spheres.
//!
//! Generation is rejection-greedy: uniform sphere samples are accepted when
//! they keep distance ≥ δ from everything accepted so far, until `T`
//! consecutive samples are rejected. A completion pass then fills the holes
//! greedy sampling tends to leave behind: exactly on the circle, through
//! spherical circumcentres of neighbour triples on S², and by local sampling
//! around each net point in higher dimensions.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::{dist, dot, norm, PointSet, EPS_GEOM};
use crate::grid::SpatialGrid;
use crate::rng::{self, stream};
use crate::{Error, Result};

/// Constant `C` in the rejection budget `T = ⌈C (r/δ)^{d−1} ln(10⁴)⌉`.
const REJECTION_C: f64 = 2.0;
/// Target residual uncovered fraction of the sphere.
const RESIDUAL: f64 = 1e-4;
/// Relative slack so that inserted points clear δ after rounding.
const SLACK: f64 = 1e-12;

/// A δ-separated set on the sphere of the given radius centred at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereNet {
    pub dim: usize,
    pub radius: f64,
    pub delta: f64,
    pub seed: u64,
    pub points: PointSet,
}

/// JSON sidecar written next to a net's point file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetMeta {
    pub dim: usize,
    pub radius: f64,
    pub delta: f64,
    pub seed: u64,
    pub size: usize,
}

impl SphereNet {
    /// Wraps existing points, checking that each lies on the sphere.
    pub fn from_points(radius: f64, delta: f64, seed: u64, points: PointSet) -> Result<Self> {
        check_params(points.dim(), radius, delta)?;
        for (i, p) in points.iter().enumerate() {
            if (norm(p) - radius).abs() > EPS_GEOM {
                return Err(Error::InvalidParameter(format!(
                    "point {i} has norm {} on a sphere of radius {radius}",
                    norm(p)
                )));
            }
        }
        Ok(Self {
            dim: points.dim(),
            radius,
            delta,
            seed,
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn meta(&self) -> NetMeta {
        NetMeta {
            dim: self.dim,
            radius: self.radius,
            delta: self.delta,
            seed: self.seed,
            size: self.len(),
        }
    }

    /// The same net with point `index` removed.
    pub fn without(&self, index: usize) -> SphereNet {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != index).collect();
        SphereNet {
            points: self.points.subset(&keep),
            ..self.clone()
        }
    }
}

fn check_params(dim: usize, radius: f64, delta: f64) -> Result<()> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

/// Number of consecutive rejections that ends the greedy phase.
pub fn rejection_budget(dim: usize, radius: f64, delta: f64) -> usize {
    let t = REJECTION_C * (radius / delta).powi(dim as i32 - 1) * (1.0 / RESIDUAL).ln();
    t.ceil() as usize
}

/// Builds a maximal δ-separated set on the sphere of radius `radius` in R^d.
///
/// In d = 1 the sphere is the two poles. When `delta ≥ 2·radius` no two
/// points fit with the required separation except an antipodal pair, which
/// is returned.
pub fn maximal_separated_net(dim: usize, radius: f64, delta: f64, seed: u64) -> Result<SphereNet> {
    check_params(dim, radius, delta)?;
    if dim == 1 || delta >= 2.0 * radius {
        let mut pts = PointSet::with_capacity(dim, 2)?;
        let mut p = vec![0.0; dim];
        p[0] = radius;
        pts.push(&p)?;
        p[0] = -radius;
        pts.push(&p)?;
        return Ok(SphereNet {
            dim,
            radius,
            delta,
            seed,
            points: pts,
        });
    }

    let mut net = Builder::new(dim, radius, delta);
    let mut rng = rng::stream_rng(seed, stream::NET);
    let budget = rejection_budget(dim, radius, delta);
    let mut rejected = 0;
    while rejected < budget {
        let mut c = rng::unit_vector(&mut rng, dim);
        c.iter_mut().for_each(|x| *x *= radius);
        if net.try_insert(&c) {
            rejected = 0;
        } else {
            rejected += 1;
        }
    }
    match dim {
        2 => net.fill_circle(),
        3 => net.fill_circumcentres(),
        _ => net.fill_local(&mut rng),
    }
    Ok(SphereNet {
        dim,
        radius,
        delta,
        seed,
        points: net.points,
    })
}

struct Builder {
    radius: f64,
    delta: f64,
    points: PointSet,
    grid: SpatialGrid,
}

impl Builder {
    fn new(dim: usize, radius: f64, delta: f64) -> Self {
        Self {
            radius,
            delta,
            points: PointSet::new(dim).expect("dim ≥ 1"),
            grid: SpatialGrid::new(dim, delta),
        }
    }

    fn clear(&self, c: &[f64]) -> bool {
        !self
            .grid
            .any_near(c, |j| dist(c, self.points.point(j)) < self.delta)
    }

    fn try_insert(&mut self, c: &[f64]) -> bool {
        if !self.clear(c) {
            return false;
        }
        let id = self.points.len();
        self.points.push(c).expect("finite candidate");
        self.grid.insert(id, c);
        true
    }

    /// On the circle, a point can be added exactly when two angularly
    /// consecutive net points are at least two separation angles apart.
    fn fill_circle(&mut self) {
        let r = self.radius;
        let theta = 2.0 * (self.delta / (2.0 * r)).min(1.0).asin() * (1.0 + SLACK);
        let mut angles: Vec<f64> = self.points.iter().map(|p| p[1].atan2(p[0])).collect();
        angles.sort_by(f64::total_cmp);
        let mut fresh = Vec::new();
        for k in 0..angles.len() {
            let a = angles[k];
            let b = if k + 1 < angles.len() {
                angles[k + 1]
            } else {
                angles[0] + 2.0 * std::f64::consts::PI
            };
            let gap = b - a;
            if gap >= 2.0 * theta {
                let parts = (gap / theta).floor() as usize;
                let step = gap / parts as f64;
                for j in 1..parts {
                    fresh.push(a + j as f64 * step);
                }
            }
        }
        for t in fresh {
            let c = [r * t.cos(), r * t.sin()];
            self.try_insert(&c);
        }
    }

    /// On S², the points farthest from the net are circumcentres of
    /// neighbour triples; insert any that clear δ until none does.
    fn fill_circumcentres(&mut self) {
        let reach = 4.0 * self.delta;
        loop {
            let mut near = SpatialGrid::new(3, reach);
            for i in 0..self.points.len() {
                near.insert(i, self.points.point(i));
            }
            let mut inserted = false;
            let n = self.points.len();
            for i in 0..n {
                let pi = self.points.point(i).to_vec();
                let mut nb = Vec::new();
                near.for_each_near(&pi, |j| {
                    if j > i && dist(&pi, self.points.point(j)) <= reach {
                        nb.push(j);
                    }
                });
                nb.sort_unstable();
                for a in 0..nb.len() {
                    for b in a + 1..nb.len() {
                        let pj = self.points.point(nb[a]).to_vec();
                        let pk = self.points.point(nb[b]).to_vec();
                        if dist(&pj, &pk) > reach {
                            continue;
                        }
                        if let Some(c) = self.circumcentre(&pi, &pj, &pk) {
                            if dist(&c, &pi) >= self.delta * (1.0 + SLACK) && self.try_insert(&c) {
                                inserted = true;
                            }
                        }
                    }
                }
            }
            if !inserted {
                break;
            }
        }
    }

    fn circumcentre(&self, a: &[f64], b: &[f64], c: &[f64]) -> Option<Vec<f64>> {
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let n = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let len = norm(&n);
        if len < 1e-14 * self.radius * self.radius {
            return None;
        }
        let s = if dot(&n, a) >= 0.0 { 1.0 } else { -1.0 };
        Some(n.iter().map(|x| s * self.radius * x / len).collect())
    }

    /// Samples the annulus of angular radii [θ, 2θ] around every net point,
    /// repeating until a full pass inserts nothing.
    fn fill_local<R: Rng>(&mut self, rng: &mut R) {
        let dim = self.points.dim();
        let r = self.radius;
        let theta = 2.0 * (self.delta / (2.0 * r)).min(1.0).asin() * (1.0 + SLACK);
        let tries = 64 << dim.min(8);
        loop {
            let before = self.points.len();
            for i in 0..before {
                let p: Vec<f64> = self.points.point(i).iter().map(|x| x / r).collect();
                for _ in 0..tries {
                    let mut w = rng::unit_vector(rng, dim);
                    let along = dot(&w, &p);
                    w.iter_mut().zip(&p).for_each(|(wk, pk)| *wk -= along * pk);
                    let wn = norm(&w);
                    if wn < 1e-12 {
                        continue;
                    }
                    let t = theta * (1.0 + rng.random::<f64>());
                    let c: Vec<f64> = p
                        .iter()
                        .zip(&w)
                        .map(|(pk, wk)| r * (t.cos() * pk + t.sin() * wk / wn))
                        .collect();
                    self.try_insert(&c);
                }
            }
            if self.points.len() == before {
                break;
            }
        }
    }
}

/// Largest distance from `samples` uniform sphere points to the net, minus δ.
/// Negative for a δ-net, up to sampling.
pub fn is_delta_net(net: &SphereNet, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    if net.is_empty() {
        return Err(Error::Empty);
    }
    let mut rng = rng::stream_rng(seed, stream::NET_CHECK);
    let probes: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let mut u = rng::unit_vector(&mut rng, net.dim);
            u.iter_mut().for_each(|x| *x *= net.radius);
            u
        })
        .collect();
    let mut grid = SpatialGrid::new(net.dim, net.delta);
    for (i, p) in net.points.iter().enumerate() {
        grid.insert(i, p);
    }
    let worst = probes
        .par_iter()
        .map(|q| {
            let mut best = f64::INFINITY;
            grid.for_each_near(q, |j| best = best.min(dist(q, net.points.point(j))));
            if best > net.delta {
                // Nothing within δ: anything outside the neighbouring cells
                // is farther than δ too, so scan everything.
                best = net
                    .points
                    .iter()
                    .map(|p| dist(q, p))
                    .fold(f64::INFINITY, f64::min);
            }
            best - net.delta
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(worst)
}

/// `|X| · (δ/r)^{d−1}`, bounded above and below for maximal nets.
pub fn cardinality_ratio(net: &SphereNet) -> f64 {
    net.len() as f64 * (net.delta / net.radius).powi(net.dim as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::min_distance;

    fn check_net(net: &SphereNet) {
        for p in net.points.iter() {
            assert!((norm(p) - net.radius).abs() <= EPS_GEOM);
        }
        if net.len() >= 2 && net.delta < 2.0 * net.radius {
            assert!(min_distance(&net.points).unwrap() >= net.delta - EPS_GEOM);
        }
    }

    #[test]
    fn antipodal_pair_for_large_delta() {
        let net = maximal_separated_net(2, 1.0, 2.0, 1).unwrap();
        assert_eq!(net.len(), 2);
        assert_eq!(cardinality_ratio(&net), 4.0);
        let m = is_delta_net(&net, 10_000, 2).unwrap();
        assert!(m <= 2f64.sqrt() - 2.0 + 1e-12);
    }

    #[test]
    fn poles_in_one_dimension() {
        let net = maximal_separated_net(1, 0.5, 0.3, 0).unwrap();
        assert_eq!(net.points.as_flat(), &[0.5, -0.5]);
    }

    #[test]
    fn circle_nets_are_maximal() {
        for (k, delta) in [0.765, 0.3, 0.1, 0.03].into_iter().enumerate() {
            let net = maximal_separated_net(2, 1.0, delta, k as u64).unwrap();
            check_net(&net);
            assert!(is_delta_net(&net, 10_000, 9).unwrap() < 0.0);
            // every angular gap is below two separation angles
            let theta = 2.0 * (delta / 2.0).asin();
            let mut a: Vec<f64> = net.points.iter().map(|p| p[1].atan2(p[0])).collect();
            a.sort_by(f64::total_cmp);
            a.push(a[0] + 2.0 * std::f64::consts::PI);
            assert!(a.windows(2).all(|w| w[1] - w[0] < 2.0 * theta * (1.0 + 1e-9)));
        }
    }

    #[test]
    fn sphere_nets_cover() {
        for delta in [0.4, 0.2] {
            let net = maximal_separated_net(3, 1.0, delta, 4).unwrap();
            check_net(&net);
            assert!(is_delta_net(&net, 10_000, 5).unwrap() < 0.0);
        }
        let net = maximal_separated_net(4, 1.0, 0.5, 4).unwrap();
        check_net(&net);
        assert!(is_delta_net(&net, 100_000, 5).unwrap() < 0.0);
    }

    #[test]
    fn other_radii() {
        let net = maximal_separated_net(3, 0.5, 0.1, 8).unwrap();
        check_net(&net);
        assert!(is_delta_net(&net, 10_000, 1).unwrap() < 0.0);
    }

    #[test]
    fn deterministic() {
        let a = maximal_separated_net(3, 1.0, 0.3, 77).unwrap();
        let b = maximal_separated_net(3, 1.0, 0.3, 77).unwrap();
        assert_eq!(a.points.as_flat(), b.points.as_flat());
        let c = maximal_separated_net(3, 1.0, 0.3, 78).unwrap();
        assert_ne!(a.points.as_flat(), c.points.as_flat());
    }

    #[test]
    fn checker_sees_a_missing_point() {
        // Deleting a point of a square net leaves a hole of angular radius π/2.
        let pts = PointSet::from_points(2, [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
            .unwrap();
        let net = SphereNet::from_points(1.0, 1.3, 0, pts).unwrap();
        assert!(is_delta_net(&net, 10_000, 3).unwrap() < 0.0);
        assert!(is_delta_net(&net.without(0), 10_000, 3).unwrap() > 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(maximal_separated_net(2, 1.0, 0.0, 0).is_err());
        assert!(maximal_separated_net(2, -1.0, 0.1, 0).is_err());
        assert!(maximal_separated_net(0, 1.0, 0.1, 0).is_err());
        assert!(is_delta_net(&maximal_separated_net(2, 1.0, 0.5, 0).unwrap(), 0, 0).is_err());
    }
}
