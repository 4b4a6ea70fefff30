//! Nearest point of a convex hull to a query point (Wolfe's min-norm-point
//! algorithm), with an early-exit mode that only decides whether the
//! distance is within a margin.
//!
//! All work happens in coordinates shifted by the query `q`, so the problem
//! is always "min-norm point of conv{a_i}" with `a_i = p_i - q`.

use super::index::{Candidates, Scan};
use crate::geom::{dot, PointSet};

/// Relative tolerance of the optimality test `|x|² - min⟨x, a_i⟩ ≤ tol · max|a_i|²`.
const OPT_TOL: f64 = 1e-13;
/// Barycentric weights at or below this are treated as zero.
const WEIGHT_TOL: f64 = 1e-14;
/// Relative pivot threshold for the affine subproblem.
const PIVOT_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Stop {
    /// Stop as soon as `dist ≤ eps` or `dist > eps` is certified.
    Decide(f64),
    /// Run to the optimum.
    Converge,
}

#[derive(Clone, Debug)]
pub(crate) enum Outcome {
    /// A convex combination within `eps` of the query exists.
    Inside,
    /// Every candidate lies more than `eps` behind the hyperplane through the
    /// query with normal `direction` (unit, pointing away from the hull).
    Outside { direction: Vec<f64> },
    /// Optimum reached. `direction` is the unit vector from the nearest hull
    /// point towards the query (`None` when the distance is zero).
    Converged {
        distance: f64,
        direction: Option<Vec<f64>>,
    },
}

/// Distance from `q` to `conv{pts[c] : c ∈ cand}`, decided or converged per `stop`.
///
/// `cand` must be nonempty.
pub(crate) fn nearest_in_hull(pts: &PointSet, cand: &[usize], q: &[f64], stop: Stop) -> Outcome {
    debug_assert!(!cand.is_empty());
    nearest_in(pts, &Scan { pts, ids: cand }, q, stop)
}

/// [`nearest_in_hull`] over any candidate index.
pub(crate) fn nearest_in<C: Candidates>(pts: &PointSet, cand: &C, q: &[f64], stop: Stop) -> Outcome {
    let d = pts.dim();
    let shifted = |id: usize, out: &mut [f64]| {
        let p = pts.point(id);
        for k in 0..d {
            out[k] = p[k] - q[k];
        }
    };
    let mut buf = vec![0.0; d];

    let start = cand.nearest(q);
    let scale2 = cand.spread_sq(q).max(1e-300);

    let mut set: Vec<usize> = vec![start];
    let mut lam: Vec<f64> = vec![1.0];
    let mut x = vec![0.0; d];
    shifted(start, &mut x);

    let max_major = 64 * (d + 2) + 1024;
    let mut work = Affine::new(d);
    let mut neg = vec![0.0; d];
    for _ in 0..max_major {
        let xx = dot(&x, &x);
        if let Stop::Decide(eps) = stop {
            if xx <= eps * eps {
                return Outcome::Inside;
            }
        }
        if xx == 0.0 {
            return Outcome::Converged {
                distance: 0.0,
                direction: None,
            };
        }

        // Support query: the candidate minimising ⟨x, a_i⟩.
        for (n, c) in neg.iter_mut().zip(&x) {
            *n = -c;
        }
        let (j, top) = cand.argmax(&neg);
        let val = -top - dot(&x, q);
        let xn = xx.sqrt();
        let lower = val / xn;
        if let Stop::Decide(eps) = stop {
            if lower > eps {
                return Outcome::Outside {
                    direction: x.iter().map(|c| -c / xn).collect(),
                };
            }
        }
        if xx - val <= OPT_TOL * scale2 || set.contains(&j) {
            return finish(stop, &x, xn);
        }

        set.push(j);
        lam.push(0.0);
        // Minor cycle: move towards the affine minimiser of the current set,
        // dropping points whose weight reaches zero.
        loop {
            let Some((mu, y)) = work.solve(&set, |c, out| shifted(c, out), scale2) else {
                // Affinely dependent set: numerically stuck, report what we have.
                return finish(stop, &x, xn);
            };
            if mu.iter().all(|&m| m > WEIGHT_TOL) {
                lam = mu;
                x = y;
                break;
            }
            let mut theta = f64::INFINITY;
            for (l, m) in lam.iter().zip(&mu) {
                if *m <= WEIGHT_TOL {
                    let denom = l - m;
                    let t = if denom > 0.0 { l / denom } else { 0.0 };
                    if t < theta {
                        theta = t;
                    }
                }
            }
            let theta = theta.clamp(0.0, 1.0);
            for (l, m) in lam.iter_mut().zip(&mu) {
                *l += theta * (m - *l);
            }
            // Drop the weights that hit zero (at least the smallest one).
            let min_pos = lam
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap();
            let mut keep_set = Vec::with_capacity(set.len());
            let mut keep_lam = Vec::with_capacity(set.len());
            for (i, (&s, &l)) in set.iter().zip(&lam).enumerate() {
                if i != min_pos && l > WEIGHT_TOL {
                    keep_set.push(s);
                    keep_lam.push(l);
                }
            }
            set = keep_set;
            lam = keep_lam;
            let total: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= total);
            x.iter_mut().for_each(|c| *c = 0.0);
            for (&s, &l) in set.iter().zip(&lam) {
                shifted(s, &mut buf);
                for k in 0..d {
                    x[k] += l * buf[k];
                }
            }
            if set.len() <= 1 {
                break;
            }
        }
    }
    let xx = dot(&x, &x);
    let xn = xx.sqrt();
    finish(stop, &x, xn)
}

fn finish(stop: Stop, x: &[f64], xn: f64) -> Outcome {
    match stop {
        Stop::Decide(eps) => {
            if xn <= eps {
                Outcome::Inside
            } else {
                Outcome::Outside {
                    direction: x.iter().map(|c| -c / xn).collect(),
                }
            }
        }
        Stop::Converge => Outcome::Converged {
            distance: xn,
            direction: (xn > 0.0).then(|| x.iter().map(|c| -c / xn).collect()),
        },
    }
}

/// Scratch space for the affine min-norm subproblem
/// `min |Σ μ_i b_i|` subject to `Σ μ_i = 1`.
struct Affine {
    d: usize,
    base: Vec<f64>,
    edges: Vec<Vec<f64>>,
}

impl Affine {
    fn new(d: usize) -> Self {
        Self {
            d,
            base: vec![0.0; d],
            edges: Vec::new(),
        }
    }

    /// Returns the weights and the minimiser, or `None` if the points are
    /// (numerically) affinely dependent.
    fn solve(
        &mut self,
        set: &[usize],
        shifted: impl Fn(usize, &mut [f64]),
        scale2: f64,
    ) -> Option<(Vec<f64>, Vec<f64>)> {
        let d = self.d;
        let k = set.len();
        shifted(set[0], &mut self.base);
        if k == 1 {
            return Some((vec![1.0], self.base.clone()));
        }
        if k - 1 > d {
            return None;
        }
        self.edges.resize_with(k - 1, || vec![0.0; d]);
        let mut tmp = vec![0.0; d];
        for i in 1..k {
            shifted(set[i], &mut tmp);
            for c in 0..d {
                self.edges[i - 1][c] = tmp[c] - self.base[c];
            }
        }
        // Normal equations G t = -E^T b0 with G = E^T E, solved by Cholesky.
        let m = k - 1;
        let mut g = vec![0.0; m * m];
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            for j in 0..=i {
                let v = dot(&self.edges[i], &self.edges[j]);
                g[i * m + j] = v;
                g[j * m + i] = v;
            }
            rhs[i] = -dot(&self.edges[i], &self.base);
        }
        let tol = PIVOT_TOL * scale2;
        for j in 0..m {
            let mut diag = g[j * m + j];
            for p in 0..j {
                diag -= g[j * m + p] * g[j * m + p];
            }
            if diag <= tol {
                return None;
            }
            let diag = diag.sqrt();
            g[j * m + j] = diag;
            for i in j + 1..m {
                let mut v = g[i * m + j];
                for p in 0..j {
                    v -= g[i * m + p] * g[j * m + p];
                }
                g[i * m + j] = v / diag;
            }
        }
        // forward then backward substitution
        let mut t = rhs;
        for i in 0..m {
            for p in 0..i {
                t[i] -= g[i * m + p] * t[p];
            }
            t[i] /= g[i * m + i];
        }
        for i in (0..m).rev() {
            for p in i + 1..m {
                t[i] -= g[p * m + i] * t[p];
            }
            t[i] /= g[i * m + i];
        }
        let mut y = self.base.clone();
        for i in 0..m {
            for c in 0..d {
                y[c] += t[i] * self.edges[i][c];
            }
        }
        let mut mu = Vec::with_capacity(k);
        mu.push(1.0 - t.iter().sum::<f64>());
        mu.extend_from_slice(&t);
        Some((mu, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dim: usize, pts: &[&[f64]]) -> PointSet {
        PointSet::from_points(dim, pts.iter().copied()).unwrap()
    }

    fn converge(pts: &PointSet, q: &[f64]) -> (f64, Option<Vec<f64>>) {
        let all: Vec<usize> = (0..pts.len()).collect();
        match nearest_in_hull(pts, &all, q, Stop::Converge) {
            Outcome::Converged {
                distance,
                direction,
            } => (distance, direction),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn distance_to_triangle() {
        let tri = set(2, &[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]]);
        let (dist, dir) = converge(&tri, &[2.0, 2.0]);
        assert!((dist - 2f64.sqrt()).abs() < 1e-12);
        let dir = dir.unwrap();
        assert!((dir[0] - dir[1]).abs() < 1e-12 && dir[0] > 0.0);
        assert_eq!(converge(&tri, &[0.5, 0.5]).0, 0.0);
        let (dist, _) = converge(&tri, &[-1.0, 1.0]);
        assert!((dist - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decide_mode() {
        let sq = set(
            3,
            &[
                &[1.0, 0.0, 0.0],
                &[-1.0, 0.0, 0.0],
                &[0.0, 1.0, 0.0],
                &[0.0, -1.0, 0.0],
                &[0.0, 0.0, 1.0],
                &[0.0, 0.0, -1.0],
            ],
        );
        let all: Vec<usize> = (0..6).collect();
        assert!(matches!(
            nearest_in_hull(&sq, &all, &[0.1, 0.2, 0.3], Stop::Decide(1e-9)),
            Outcome::Inside
        ));
        match nearest_in_hull(&sq, &all, &[1.0, 1.0, 1.0], Stop::Decide(1e-9)) {
            Outcome::Outside { direction } => {
                for p in sq.iter() {
                    let s: f64 = p.iter().zip(&direction).map(|(a, b)| (a - 1.0) * b).sum();
                    assert!(s < -1e-9);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        // on a facet: distance zero
        let q = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        assert!(matches!(
            nearest_in_hull(&sq, &all, &q, Stop::Decide(1e-9)),
            Outcome::Inside
        ));
    }
}
