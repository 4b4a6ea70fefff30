//! Planar vertex detection: the fast monotone-chain path used by peeling in
//! d = 2, and the independent oracle used only for cross-validation.

use std::cmp::Ordering;

use crate::geom::{dist, PointSet};

#[inline]
fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

/// Vertices of the hull of the points in `order`, which must be sorted
/// lexicographically. A chain point is dropped when it lies within `eps` of
/// (or beyond) the chord between its neighbours.
pub(crate) fn chain_vertices(pts: &PointSet, order: &[usize], eps: f64) -> Vec<usize> {
    if order.len() <= 2 {
        return order.to_vec();
    }
    let half = |iter: &mut dyn Iterator<Item = usize>| {
        let mut h: Vec<usize> = Vec::new();
        for i in iter {
            let b = pts.point(i);
            while h.len() >= 2 {
                let o = pts.point(h[h.len() - 2]);
                let a = pts.point(h[h.len() - 1]);
                if cross(o, a, b) <= eps * dist(o, b) {
                    h.pop();
                } else {
                    break;
                }
            }
            h.push(i);
        }
        h
    };
    let lower = half(&mut order.iter().copied());
    let upper = half(&mut order.iter().rev().copied());
    let mut out: Vec<usize> = lower[..lower.len() - 1]
        .iter()
        .chain(&upper[..upper.len() - 1])
        .copied()
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Oracle: monotone chain with an exact strict-turn test, followed by a
/// vertex filter that repeatedly removes chain points within `eps` of the
/// segment joining their chain neighbours.
pub(crate) fn oracle_vertices(pts: &PointSet, eps: f64) -> Vec<usize> {
    let n = pts.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| lex_cmp(pts.point(a), pts.point(b)));
    if n <= 2 {
        idx.sort_unstable();
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross(
                pts.point(lower[lower.len() - 2]),
                pts.point(lower[lower.len() - 1]),
                pts.point(i),
            ) <= 0.0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross(
                pts.point(upper[upper.len() - 2]),
                pts.point(upper[upper.len() - 1]),
                pts.point(i),
            ) <= 0.0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    let mut ring: Vec<usize> = lower.into_iter().chain(upper).collect();

    // Filter near-collinear chain points against their neighbours.
    loop {
        if ring.len() <= 2 {
            break;
        }
        let k = ring.len();
        let drop = (0..k).find(|&i| {
            let prev = pts.point(ring[(i + k - 1) % k]);
            let cur = pts.point(ring[i]);
            let next = pts.point(ring[(i + 1) % k]);
            segment_distance(cur, prev, next) <= eps
        });
        match drop {
            Some(i) => {
                ring.remove(i);
            }
            None => break,
        }
    }
    ring.sort_unstable();
    ring
}

fn segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let c = [a[0] + t * ab[0], a[1] + t * ab[1]];
    dist(p, &c)
}
