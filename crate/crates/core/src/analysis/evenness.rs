use rand::Rng;
use rayon::prelude::*;

use crate::geom::{ball_constants, dist_sq, PointSet};
use crate::rng::{self, stream};
use crate::{Error, Result};

/// Smallest `α` with `|X ∩ D| ≤ ⌈α |X| Vol(D)⌉` for every sampled ball `D`.
///
/// Balls have centres uniform in `2B^d` and radii uniform in `(0, 1]`. Since
/// the condition only has to hold on the sampled balls, the value is a lower
/// bound on the evenness constant of `X`. For a count `c ≥ 1` the ceiling
/// condition is `α > (c − 1)/(|X| Vol(D))`; the returned value is the
/// infimum of the admissible `α`.
///
/// The balls drawn for `samples = k` are a prefix of those drawn for any
/// larger `samples` with the same seed.
pub fn evenness_alpha(x: &PointSet, samples: usize, seed: u64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let d = x.dim();
    let kappa = ball_constants(d)?.kappa;
    let mut rng = rng::stream_rng(seed, stream::EVENNESS);
    let balls: Vec<(Vec<f64>, f64)> = (0..samples)
        .map(|_| {
            let mut c = rng::ball_point(&mut rng, d);
            c.iter_mut().for_each(|v| *v *= 2.0);
            let r = 1.0 - rng.random::<f64>();
            (c, r)
        })
        .collect();
    let n = x.len() as f64;
    let alpha = balls
        .par_iter()
        .map(|(c, r)| {
            let r2 = r * r;
            let count = x.iter().filter(|p| dist_sq(p, c) <= r2).count();
            if count <= 1 {
                0.0
            } else {
                (count - 1) as f64 / (n * kappa * r.powi(d as i32))
            }
        })
        .reduce(|| 0.0, f64::max);
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{base_line, random_ball};

    #[test]
    fn single_point_needs_no_alpha() {
        let x = PointSet::from_points(2, [[0.1, 0.2]]).unwrap();
        assert_eq!(evenness_alpha(&x, 1000, 0).unwrap(), 0.0);
    }

    #[test]
    fn base_line_stays_bounded() {
        let a: Vec<f64> = [10, 100, 1000]
            .into_iter()
            .map(|n| evenness_alpha(&base_line(n).unwrap(), 2000, 1).unwrap())
            .collect();
        // an interval of length 2r holds at most 2rn + 1 of the 2n + 1 points
        for v in &a {
            assert!(*v > 0.0 && *v <= 1.0 + 1e-12, "{a:?}");
        }
    }

    #[test]
    fn cluster_is_detected() {
        let mut x = random_ball(2, 200, 3).unwrap();
        let even = evenness_alpha(&x, 5000, 4).unwrap();
        let mut rng = rng::stream_rng(5, 0);
        for _ in 0..200 {
            let p = rng::ball_point(&mut rng, 2);
            x.push(&[0.3 + 1e-3 * p[0], 0.1 + 1e-3 * p[1]]).unwrap();
        }
        let clustered = evenness_alpha(&x, 5000, 4).unwrap();
        assert!(clustered > 5.0 * even, "{even} {clustered}");
    }

    #[test]
    fn monotone_in_sample_count() {
        for s in 0..10 {
            let x = random_ball(3, 300, s).unwrap();
            let mut prev = 0.0;
            for k in [1, 10, 100, 1000] {
                let a = evenness_alpha(&x, k, s).unwrap();
                assert!(a >= prev);
                prev = a;
            }
        }
    }
}
