//! The tangent polytope `P(X) = {y : ⟨y, x⟩ ≤ 1 for all x ∈ X}` of a net on
//! the unit sphere, kept as its list of contact points. Every check here is
//! a radial or support evaluation; no vertex of `P` is ever computed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::{check_unit, dot, norm, support_value, EPS_GEOM};
use crate::nets::SphereNet;
use crate::rng::{self, stream};
use crate::{Error, Result};

/// Tangent polytope of a net on the unit sphere.
#[derive(Clone, Debug)]
pub struct TangentPolytope {
    net: SphereNet,
}

/// Outcome of one sampled containment check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub lemma: String,
    pub delta: f64,
    pub samples: usize,
    pub worst_margin: f64,
    pub pass: bool,
}

impl TangentPolytope {
    pub fn new(net: SphereNet) -> Result<Self> {
        if (net.radius - 1.0).abs() > EPS_GEOM {
            return Err(Error::InvalidParameter(format!(
                "tangent polytope needs a net on the unit sphere, got radius {}",
                net.radius
            )));
        }
        if net.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self { net })
    }

    pub fn net(&self) -> &SphereNet {
        &self.net
    }

    pub fn delta(&self) -> f64 {
        self.net.delta
    }

    /// Whether `y` satisfies every facet inequality up to `eps`.
    pub fn contains(&self, y: &[f64], eps: f64) -> bool {
        self.net.points.iter().all(|x| dot(x, y) <= 1.0 + eps)
    }
}

/// Exit parameter `λ` of the ray `{t p : t ≥ 0}` through the boundary of `P`.
pub fn radial_exit(p_poly: &TangentPolytope, p: &[f64]) -> Result<f64> {
    if p.len() != p_poly.net.dim {
        return Err(Error::DimensionMismatch {
            expected: p_poly.net.dim,
            got: p.len(),
        });
    }
    check_unit(p, EPS_GEOM)?;
    let h = support_value(&p_poly.net.points, p)?;
    if h <= 0.0 {
        return Err(Error::UnboundedRay);
    }
    Ok(1.0 / h)
}

fn sample_directions(dim: usize, samples: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let mut rng = rng::stream_rng(seed, stream::DIRECTIONS);
    Ok((0..samples).map(|_| rng::unit_vector(&mut rng, dim)).collect())
}

fn check_delta_sq(delta: f64) -> Result<f64> {
    let d2 = delta * delta;
    if d2 >= 2.0 - EPS_GEOM {
        return Err(Error::DegenerateBound { delta_sq: d2 });
    }
    Ok(d2)
}

/// `max_p λ(p) − 1/(1 − δ²/2)` over sampled directions; at most zero when
/// the polytope lies in the ball of radius `1/(1 − δ²/2)`.
pub fn check_outer_bound(p_poly: &TangentPolytope, samples: usize, seed: u64) -> Result<f64> {
    let d2 = check_delta_sq(p_poly.delta())?;
    let bound = 1.0 / (1.0 - d2 / 2.0);
    let dirs = sample_directions(p_poly.net.dim, samples, seed)?;
    let exits: Vec<Result<f64>> = dirs.par_iter().map(|u| radial_exit(p_poly, u)).collect();
    let mut worst = f64::NEG_INFINITY;
    for e in exits {
        worst = worst.max(e? - bound);
    }
    Ok(worst)
}

/// `min_u h_X(u) − (1 − δ²/2)` over sampled directions; at least zero when
/// `conv X` contains the ball of radius `1 − δ²/2`.
pub fn check_inner_bound(net: &SphereNet, samples: usize, seed: u64) -> Result<f64> {
    let bound = 1.0 - net.delta * net.delta / 2.0;
    let dirs = sample_directions(net.dim, samples, seed)?;
    let worst = dirs
        .par_iter()
        .map(|u| support_value(&net.points, u).expect("nonempty net, unit direction") - bound)
        .reduce(|| f64::INFINITY, f64::min);
    Ok(worst)
}

/// Largest violation `max_{x'} ⟨q, x'⟩ − 1` over points `q = x + (δ/2) v` of
/// the tangent disk at the contact point `x`, for sampled unit `v ⊥ x`.
pub fn check_face_inradius(
    p_poly: &TangentPolytope,
    x: &[f64],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let net = &p_poly.net;
    if x.len() != net.dim {
        return Err(Error::DimensionMismatch {
            expected: net.dim,
            got: x.len(),
        });
    }
    if !net.points.iter().any(|p| p == x) {
        return Err(Error::NotInNet);
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let frame = tangent_frame(x)?;
    let mut rng = rng::stream_rng(seed, stream::FRAME_SAMPLES);
    let half = net.delta / 2.0;
    let probes: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let c = rng::unit_vector(&mut rng, frame.len().max(1));
            let mut q = x.to_vec();
            for (ck, v) in c.iter().zip(&frame) {
                for (qk, vk) in q.iter_mut().zip(v) {
                    *qk += half * ck * vk;
                }
            }
            q
        })
        .collect();
    let worst = probes
        .par_iter()
        .map(|q| {
            net.points
                .iter()
                .map(|p| dot(p, q) - 1.0)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(worst)
}

/// Orthonormal basis of `x^⊥` for a unit vector `x`.
///
/// The coordinate axis with the largest `|x_j|` (lowest `j` on ties) is
/// dropped, the remaining axes are orthogonalised against `x` and each other
/// in increasing order, and each vector's sign is fixed so that its last
/// nonzero component is positive.
pub fn tangent_frame(x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = x.len();
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let n = norm(x);
    if n == 0.0 {
        return Err(Error::InvalidParameter("zero vector has no tangent frame".into()));
    }
    check_unit(x, EPS_GEOM)?;
    let pivot = (0..d)
        .max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()).then(b.cmp(&a)))
        .unwrap();
    let xhat: Vec<f64> = x.iter().map(|c| c / n).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for j in (0..d).filter(|&j| j != pivot) {
        let mut v = vec![0.0; d];
        v[j] = 1.0;
        // two passes of modified Gram-Schmidt for orthogonality near 1e-16
        for _ in 0..2 {
            let a = dot(&v, &xhat);
            v.iter_mut().zip(&xhat).for_each(|(vk, xk)| *vk -= a * xk);
            for b in &basis {
                let a = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(vk, bk)| *vk -= a * bk);
            }
        }
        let vn = norm(&v);
        v.iter_mut().for_each(|c| *c /= vn);
        if let Some(last) = v.iter().rev().find(|c| **c != 0.0) {
            if *last < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Runs all three checks on a net and reports each against its tolerance.
/// `face_samples` probes are drawn at every contact point.
pub fn verify_net(net: &SphereNet, samples: usize, face_samples: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let poly = TangentPolytope::new(net.clone())?;
    let outer = check_outer_bound(&poly, samples, rng::derive_seed(seed, 1))?;
    let inner = check_inner_bound(net, samples, rng::derive_seed(seed, 2))?;
    let faces: Vec<Result<f64>> = (0..net.len())
        .into_par_iter()
        .map(|i| {
            check_face_inradius(
                &poly,
                net.points.point(i),
                face_samples,
                rng::derive_seed(seed, 3 + i as u64),
            )
        })
        .collect();
    let mut face = f64::NEG_INFINITY;
    for f in faces {
        face = face.max(f?);
    }
    let report = |lemma: &str, samples, worst_margin: f64, pass| CheckReport {
        lemma: lemma.to_string(),
        delta: net.delta,
        samples,
        worst_margin,
        pass,
    };
    Ok(vec![
        report("outer_radius", samples, outer, outer <= EPS_GEOM),
        report("inner_radius", samples, inner, inner >= -EPS_GEOM),
        report("face_inradius", face_samples * net.len(), face, face <= EPS_GEOM),
    ])
}
