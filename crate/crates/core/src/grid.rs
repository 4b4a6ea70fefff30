//! Uniform bucket grid over R^d for fixed-radius neighbour queries.

use std::collections::HashMap;

/// Points are bucketed by `floor(x / cell)`; a query visits the 3^d cells
/// around the query cell, so every stored point within distance `cell` of
/// the query is visited (plus some farther ones).
#[derive(Clone, Debug)]
pub struct SpatialGrid {
    dim: usize,
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl SpatialGrid {
    pub fn new(dim: usize, cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "cell size must be positive");
        Self {
            dim,
            cell,
            cells: HashMap::new(),
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn key(&self, p: &[f64]) -> Vec<i64> {
        p.iter().map(|c| (c / self.cell).floor() as i64).collect()
    }

    pub fn insert(&mut self, id: usize, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        let key = self.key(p);
        self.cells.entry(key).or_default().push(id);
    }

    /// Calls `f` for every stored id in the cells adjacent to `p`'s cell.
    /// Cells are visited in a fixed order; ids within a cell in insertion order.
    pub fn for_each_near(&self, p: &[f64], mut f: impl FnMut(usize)) {
        let base = self.key(p);
        let mut offset = vec![-1i64; self.dim];
        let mut probe = base.clone();
        loop {
            for k in 0..self.dim {
                probe[k] = base[k] + offset[k];
            }
            if let Some(ids) = self.cells.get(&probe) {
                ids.iter().copied().for_each(&mut f);
            }
            // odometer over {-1, 0, 1}^d
            let mut k = 0;
            loop {
                if k == self.dim {
                    return;
                }
                offset[k] += 1;
                if offset[k] <= 1 {
                    break;
                }
                offset[k] = -1;
                k += 1;
            }
        }
    }

    /// Whether any stored id satisfies `pred` among the neighbours of `p`.
    pub fn any_near(&self, p: &[f64], mut pred: impl FnMut(usize) -> bool) -> bool {
        let mut hit = false;
        self.for_each_near(p, |id| {
            if !hit && pred(id) {
                hit = true;
            }
        });
        hit
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_neighbours_across_cell_boundaries() {
        let pts = [[0.05, 0.05], [0.95, 0.05], [0.11, 0.0], [-0.04, 0.02]];
        let mut g = SpatialGrid::new(2, 0.1);
        for (i, p) in pts.iter().enumerate() {
            g.insert(i, p);
        }
        let mut seen = Vec::new();
        g.for_each_near(&pts[0], |id| seen.push(id));
        seen.sort();
        assert_eq!(seen, vec![0, 2, 3]);
    }
}
