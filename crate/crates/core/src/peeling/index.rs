//! Candidate sets for the nearest-point solver: a plain scan over a list of
//! indices, and a bounding-ball tree answering support, threshold and
//! nearest-neighbour queries by branch and bound.

use crate::geom::{dist_sq, dot, PointSet};

/// Queries the nearest-point solver makes against its candidate points.
pub(crate) trait Candidates {
    /// `(id, ⟨u, p_id⟩)` maximising `⟨u, p⟩` over the candidates.
    fn argmax(&self, u: &[f64]) -> (usize, f64);
    /// Candidate closest to `q`.
    fn nearest(&self, q: &[f64]) -> usize;
    /// An upper bound on `max |p − q|²` over the candidates.
    fn spread_sq(&self, q: &[f64]) -> f64;
}

/// Linear scan over `ids`.
pub(crate) struct Scan<'a> {
    pub pts: &'a PointSet,
    pub ids: &'a [usize],
}

impl Candidates for Scan<'_> {
    fn argmax(&self, u: &[f64]) -> (usize, f64) {
        let mut best = (self.ids[0], f64::NEG_INFINITY);
        for &i in self.ids {
            let v = dot(u, self.pts.point(i));
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }

    fn nearest(&self, q: &[f64]) -> usize {
        let mut best = (self.ids[0], f64::INFINITY);
        for &i in self.ids {
            let v = dist_sq(q, self.pts.point(i));
            if v < best.1 {
                best = (i, v);
            }
        }
        best.0
    }

    fn spread_sq(&self, q: &[f64]) -> f64 {
        self.ids
            .iter()
            .map(|&i| dist_sq(q, self.pts.point(i)))
            .fold(0.0, f64::max)
    }
}

const LEAF: usize = 12;
/// Relative slack on node bounds so that rounding never prunes a winner.
const BOUND_SLACK: f64 = 1e-12;

struct Node {
    center: Vec<f64>,
    radius: f64,
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

/// Ball tree over a subset of a point set. Points are copied into a
/// contiguous buffer in tree order.
pub(crate) struct BallTree {
    dim: usize,
    ids: Vec<usize>,
    coords: Vec<f64>,
    nodes: Vec<Node>,
}

impl BallTree {
    /// `ids` must be nonempty.
    pub fn new(pts: &PointSet, ids: &[usize]) -> Self {
        debug_assert!(!ids.is_empty());
        let dim = pts.dim();
        let mut order: Vec<usize> = ids.to_vec();
        let mut nodes = Vec::with_capacity(2 * ids.len() / LEAF + 1);
        build(pts, &mut order, 0, ids.len(), &mut nodes);
        let mut coords = Vec::with_capacity(order.len() * dim);
        for &i in &order {
            coords.extend_from_slice(pts.point(i));
        }
        Self {
            dim,
            ids: order,
            coords,
            nodes,
        }
    }

    fn p(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    fn upper(&self, node: &Node, u: &[f64], unorm: f64) -> f64 {
        let c = dot(u, &node.center);
        c + node.radius * unorm + BOUND_SLACK * (c.abs() + node.radius * unorm)
    }

    /// Largest `⟨u, p⟩` over points other than `skip`, with its id.
    pub fn argmax_excluding(&self, u: &[f64], skip: Option<usize>) -> (usize, f64) {
        let unorm = dot(u, u).sqrt();
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            if self.upper(node, u, unorm) < best.1 {
                continue;
            }
            match node.children {
                Some((a, b)) => {
                    // visit the more promising child first
                    let (ua, ub) = (
                        dot(u, &self.nodes[a].center),
                        dot(u, &self.nodes[b].center),
                    );
                    if ua >= ub {
                        stack.push(b);
                        stack.push(a);
                    } else {
                        stack.push(a);
                        stack.push(b);
                    }
                }
                None => {
                    for k in node.start..node.end {
                        let id = self.ids[k];
                        if Some(id) == skip {
                            continue;
                        }
                        let v = dot(u, self.p(k));
                        if v > best.1 || (v == best.1 && id < best.0) {
                            best = (id, v);
                        }
                    }
                }
            }
        }
        best
    }

    /// Ids of all points with `⟨u, p⟩ ≥ t`, ascending.
    pub fn at_least(&self, u: &[f64], t: f64) -> Vec<usize> {
        let unorm = dot(u, u).sqrt();
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            if self.upper(node, u, unorm) < t {
                continue;
            }
            match node.children {
                Some((a, b)) => {
                    stack.push(a);
                    stack.push(b);
                }
                None => {
                    for k in node.start..node.end {
                        if dot(u, self.p(k)) >= t {
                            out.push(self.ids[k]);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

impl Candidates for BallTree {
    fn argmax(&self, u: &[f64]) -> (usize, f64) {
        self.argmax_excluding(u, None)
    }

    fn nearest(&self, q: &[f64]) -> usize {
        let mut best = (usize::MAX, f64::INFINITY);
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            let gap = dist_sq(q, &node.center).sqrt() - node.radius;
            if gap > 0.0 && gap * gap > best.1 {
                continue;
            }
            match node.children {
                Some((a, b)) => {
                    let (da, db) = (
                        dist_sq(q, &self.nodes[a].center),
                        dist_sq(q, &self.nodes[b].center),
                    );
                    if da <= db {
                        stack.push(b);
                        stack.push(a);
                    } else {
                        stack.push(a);
                        stack.push(b);
                    }
                }
                None => {
                    for k in node.start..node.end {
                        let v = dist_sq(q, self.p(k));
                        if v < best.1 {
                            best = (self.ids[k], v);
                        }
                    }
                }
            }
        }
        best.0
    }

    fn spread_sq(&self, q: &[f64]) -> f64 {
        let root = &self.nodes[0];
        let r = dist_sq(q, &root.center).sqrt() + root.radius;
        r * r
    }
}

fn build(pts: &PointSet, order: &mut [usize], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let dim = pts.dim();
    let slice = &mut order[start..end];
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &i in slice.iter() {
        for (k, &c) in pts.point(i).iter().enumerate() {
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let radius = slice
        .iter()
        .map(|&i| dist_sq(&center, pts.point(i)))
        .fold(0.0, f64::max)
        .sqrt();
    let me = nodes.len();
    nodes.push(Node {
        center,
        radius,
        start,
        end,
        children: None,
    });
    if end - start > LEAF {
        let axis = (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap();
        let mid = (end - start) / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            pts.point(a)[axis]
                .total_cmp(&pts.point(b)[axis])
                .then(a.cmp(&b))
        });
        let left = build(pts, order, start, start + mid, nodes);
        let right = build(pts, order, start + mid, end, nodes);
        nodes[me].children = Some((left, right));
    }
    me
}
