use rayon::prelude::*;

use crate::geom::{dot, norm, PointSet, EPS_GEOM, UNIT_TOL};
use crate::peeling::{nearest_in_hull, Outcome, Stop};
use crate::{Error, Result};

/// Max-margin outer normal of `conv X` at point `i`: the unit `u` maximising
/// `min_{j≠i} ⟨u, x_i − x_j⟩`. That margin equals the distance from `x_i`
/// to the hull of the other points, and `u` points from the nearest hull
/// point to `x_i`.
pub fn outer_normal(x: &PointSet, i: usize) -> Result<(Vec<f64>, f64)> {
    let others: Vec<usize> = (0..x.len()).filter(|&j| j != i).collect();
    if others.is_empty() {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: x.len(),
        });
    }
    match nearest_in_hull(x, &others, x.point(i), Stop::Converge) {
        Outcome::Converged {
            distance,
            direction: Some(u),
        } if distance > EPS_GEOM => Ok((u, distance)),
        Outcome::Converged { distance, .. } if distance <= EPS_GEOM => {
            Err(Error::NotConvexPosition { index: i })
        }
        _ => Err(Error::NoOuterNormal { index: i }),
    }
}

/// Moves every point of a convex-position set in `B^d` to the unit sphere
/// along its max-margin outer normal.
///
/// All normals are taken from the input set and all points move at once.
/// For a pair `x, y` with normals `u, v` we have `⟨u, x − y⟩ ≥ 0` and
/// `⟨v, y − x⟩ ≥ 0`, so
/// `|x + λu − y − μv|² ≥ |x − y|² + 2λ⟨u, x−y⟩ + 2μ⟨v, y−x⟩ ≥ |x − y|²`:
/// no distance shrinks. Points already on the sphere stay put.
pub fn outward_push(x: &PointSet) -> Result<PointSet> {
    if x.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: x.len(),
        });
    }
    if let Some(i) = x.iter().position(|p| norm(p) > 1.0 + EPS_GEOM) {
        return Err(Error::InvalidParameter(format!("point {i} lies outside the unit ball")));
    }
    let moved: Vec<Result<Vec<f64>>> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            let p = x.point(i);
            let r = norm(p);
            let (u, _) = outer_normal(x, i)?;
            if r >= 1.0 - UNIT_TOL {
                return Ok(p.iter().map(|c| c / r).collect());
            }
            let b = dot(p, &u);
            let lambda = -b + (b * b + 1.0 - r * r).sqrt();
            let q: Vec<f64> = p.iter().zip(&u).map(|(c, uk)| c + lambda * uk).collect();
            let qn = norm(&q);
            Ok(q.into_iter().map(|c| c / qn).collect())
        })
        .collect();
    let mut out = PointSet::with_capacity(x.dim(), x.len())?;
    for q in moved {
        out.push(&q?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{dist, min_distance};
    use crate::peeling::extreme_points;
    use crate::rng;

    #[test]
    fn antipodal_pair() {
        let x = PointSet::from_points(2, [[0.5, 0.0], [-0.5, 0.0]]).unwrap();
        let y = outward_push(&x).unwrap();
        assert_eq!(y.as_flat(), &[1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn centred_square_doubles() {
        let h = 0.5 / 2f64.sqrt();
        let x = PointSet::from_points(2, [[h, h], [-h, h], [-h, -h], [h, -h]]).unwrap();
        let y = outward_push(&x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let (a, b) = (dist(x.point(i), x.point(j)), dist(y.point(i), y.point(j)));
                assert!((b - 2.0 * a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_interior_points() {
        let x = PointSet::from_points(2, [[0.5, 0.0], [-0.5, 0.0], [0.0, 0.5], [0.0, 0.0]])
            .unwrap();
        assert_eq!(outward_push(&x), Err(Error::NotConvexPosition { index: 3 }));
        let x = PointSet::from_points(2, [[0.5, 0.0], [-0.5, 0.0], [0.0, 0.0]]).unwrap();
        assert_eq!(outward_push(&x), Err(Error::NotConvexPosition { index: 2 }));
    }

    #[test]
    fn random_planar_instances() {
        let mut rng = rng::stream_rng(31, 0);
        for _ in 0..10 {
            let pts: Vec<Vec<f64>> = (0..200).map(|_| rng::ball_point(&mut rng, 2)).collect();
            let all = PointSet::from_points(2, &pts).unwrap().scaled(0.9);
            let x = all.subset(&extreme_points(&all).unwrap());
            let y = outward_push(&x).unwrap();
            for p in y.iter() {
                assert!((norm(p) - 1.0).abs() < 1e-12);
            }
            for i in 0..x.len() {
                for j in i + 1..x.len() {
                    assert!(dist(y.point(i), y.point(j)) >= dist(x.point(i), x.point(j)) - EPS_GEOM);
                }
            }
            assert!(min_distance(&y).unwrap() >= min_distance(&x).unwrap() - EPS_GEOM);
        }
    }
}
