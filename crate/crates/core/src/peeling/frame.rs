//! Dimension-generic vertex detection.
//!
//! A point is a vertex iff its distance to the hull of the other points
//! exceeds `eps`. Testing each point against all others costs a full
//! nearest-point solve over n candidates; instead we grow a *frame* `E` of
//! certified vertices and test points against `conv E` only:
//!
//! - `dist(p, conv E) ≤ eps` already proves `p` is not a vertex, since `E`
//!   consists of other points of the set.
//! - otherwise the solve returns a direction in which `p` sticks out of
//!   `conv E`; the maximiser of that direction over the whole set is a vertex
//!   not yet in `E`, which is added before `p` is tested again.
//!
//! Frame members are certified at the end by a separating direction with a
//! margin above `eps`, falling back to the full test only for ties.

use rayon::prelude::*;

use super::index::{BallTree, Candidates};
use super::minnorm::{nearest_in, nearest_in_hull, Outcome, Stop};
use crate::geom::{dot, PointSet};
use crate::rng::{self, stream};

/// Scores within this of the maximum count as tied in a support query.
const TIE_TOL: f64 = 1e-12;
/// Below this many pending points the frame loop stays single-threaded.
const PAR_THRESHOLD: usize = 512;
const DIRECTION_SEED: u64 = 0x5eed_f4a3;

struct Directions {
    seeds: Vec<Vec<f64>>,
    tiebreak: Vec<Vec<f64>>,
}

impl Directions {
    fn new(dim: usize) -> Self {
        let mut rng = rng::stream_rng(DIRECTION_SEED ^ dim as u64, stream::HULL);
        let seeds = (0..16 * dim + 16)
            .map(|_| rng::unit_vector(&mut rng, dim))
            .collect();
        let tiebreak = (0..dim + 1)
            .map(|_| rng::unit_vector(&mut rng, dim))
            .collect();
        Self { seeds, tiebreak }
    }
}

/// Index maximising `⟨u, x⟩` over the active points, with near-ties
/// resolved by a chain of fixed generic directions and finally the lowest index.
fn select_vertex(pts: &PointSet, tree: &BallTree, u: &[f64], dirs: &Directions) -> usize {
    let best = tree.argmax(u).1;
    let mut tied = tree.at_least(u, best - TIE_TOL);
    for w in &dirs.tiebreak {
        if tied.len() == 1 {
            break;
        }
        let top = tied
            .iter()
            .map(|&i| dot(w, pts.point(i)))
            .fold(f64::NEG_INFINITY, f64::max);
        tied.retain(|&i| dot(w, pts.point(i)) >= top - TIE_TOL);
    }
    tied[0]
}

/// `⟨u, v⟩ - max_{i≠v} ⟨u, x_i⟩` for unit `u`: a lower bound on the distance
/// from `v` to the hull of the others when positive.
fn separation_gap(pts: &PointSet, tree: &BallTree, v: usize, u: &[f64]) -> f64 {
    dot(u, pts.point(v)) - tree.argmax_excluding(u, Some(v)).1
}

fn certify(
    pts: &PointSet,
    active: &[usize],
    tree: &BallTree,
    v: usize,
    u: &[f64],
    dirs: &Directions,
    eps: f64,
) -> bool {
    if separation_gap(pts, tree, v, u) > eps {
        return true;
    }
    // Tie-broken selections: tilt the direction towards the tie-break chain.
    for eta in [1e-6, 1e-4, 1e-3, 1e-2, 1e-1] {
        let mut tilted: Vec<f64> = u.to_vec();
        let mut scale = eta;
        for w in &dirs.tiebreak {
            for (t, wk) in tilted.iter_mut().zip(w) {
                *t += scale * wk;
            }
            scale *= eta;
        }
        let n = dot(&tilted, &tilted).sqrt();
        tilted.iter_mut().for_each(|t| *t /= n);
        if separation_gap(pts, tree, v, &tilted) > eps {
            return true;
        }
    }
    let others: Vec<usize> = active.iter().copied().filter(|&i| i != v).collect();
    matches!(
        nearest_in_hull(pts, &others, pts.point(v), Stop::Decide(eps)),
        Outcome::Outside { .. }
    )
}

/// Vertices of `conv {pts[i] : i ∈ active}` under the `eps` margin contract.
/// `active` must be sorted ascending and free of near-duplicates. The result
/// is sorted ascending.
pub(crate) fn extreme_among(pts: &PointSet, active: &[usize], eps: f64) -> Vec<usize> {
    match active.len() {
        0 => return Vec::new(),
        1 => return active.to_vec(),
        _ => {}
    }
    let dirs = Directions::new(pts.dim());
    let tree = BallTree::new(pts, active);
    let mut in_frame = vec![false; pts.len()];
    let mut frame: Vec<usize> = Vec::new();
    let mut frame_dirs: Vec<Vec<f64>> = Vec::new();

    let add = |v: usize,
               u: Vec<f64>,
               in_frame: &mut Vec<bool>,
               frame: &mut Vec<usize>,
               frame_dirs: &mut Vec<Vec<f64>>|
     -> bool {
        if in_frame[v] {
            return false;
        }
        in_frame[v] = true;
        frame.push(v);
        frame_dirs.push(u);
        true
    };

    for u in &dirs.seeds {
        let v = select_vertex(pts, &tree, u, &dirs);
        add(v, u.clone(), &mut in_frame, &mut frame, &mut frame_dirs);
    }

    // Most interior points are already inside the hull of the seed vertices.
    let core = frame.clone();
    let mut pending: Vec<usize> = active.iter().copied().filter(|&i| !in_frame[i]).collect();
    while !pending.is_empty() {
        let frame_tree = BallTree::new(pts, &frame);
        let test = |&p: &usize| {
            let q = pts.point(p);
            if let Outcome::Inside = nearest_in_hull(pts, &core, q, Stop::Decide(eps)) {
                return None;
            }
            match nearest_in(pts, &frame_tree, q, Stop::Decide(eps)) {
                Outcome::Inside => None,
                Outcome::Outside { direction, .. } => Some(direction),
                Outcome::Converged { .. } => unreachable!("decide mode never converges"),
            }
        };
        let results: Vec<Option<Vec<f64>>> = if pending.len() >= PAR_THRESHOLD {
            pending.par_iter().with_min_len(64).map(test).collect()
        } else {
            pending.iter().map(test).collect()
        };
        let mut next = Vec::new();
        let mut grew = false;
        for (&p, res) in pending.iter().zip(results) {
            let Some(dir) = res else { continue };
            if in_frame[p] {
                continue;
            }
            let v = select_vertex(pts, &tree, &dir, &dirs);
            grew |= add(v, dir, &mut in_frame, &mut frame, &mut frame_dirs);
            if v != p {
                next.push(p);
            }
        }
        if !grew && !next.is_empty() {
            // Cannot happen with exact support queries; settle the leftovers
            // with the full test rather than loop.
            for &p in &next {
                let others: Vec<usize> = active.iter().copied().filter(|&i| i != p).collect();
                if let Outcome::Outside { direction, .. } =
                    nearest_in_hull(pts, &others, pts.point(p), Stop::Decide(eps))
                {
                    add(p, direction, &mut in_frame, &mut frame, &mut frame_dirs);
                }
            }
            break;
        }
        pending = next;
    }

    let keep: Vec<bool> = if frame.len() >= 64 {
        frame
            .par_iter()
            .zip(&frame_dirs)
            .map(|(&v, u)| certify(pts, active, &tree, v, u, &dirs, eps))
            .collect()
    } else {
        frame
            .iter()
            .zip(&frame_dirs)
            .map(|(&v, u)| certify(pts, active, &tree, v, u, &dirs, eps))
            .collect()
    };
    let mut out: Vec<usize> = frame
        .into_iter()
        .zip(keep)
        .filter_map(|(v, k)| k.then_some(v))
        .collect();
    out.sort_unstable();
    out
}
