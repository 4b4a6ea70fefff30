use serde::{Deserialize, Serialize};

use crate::analysis::{max_cap_sampled, CapEstimate};
use crate::constructions::recursive_family;
use crate::geom::{norm, PointSet, UNIT_TOL};
use crate::peeling::{peel_with, PeelOptions};
use crate::rng;
use crate::Result;

/// Cap directions sampled per shell.
pub const CAP_DIRECTIONS: usize = 1000;

/// Layer structure of one recursive construction, measured by peeling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellReport {
    pub dim: usize,
    pub n: u64,
    pub size: usize,
    pub shells: u64,
    /// Layer number of the embedded sub-family, peeled on its own.
    pub sub_layers: usize,
    pub layers: usize,
    /// `shells · sub_layers + 1`.
    pub expected: usize,
    /// Every layer before the last lies in a single shell, shells peel
    /// outermost first and each takes exactly `sub_layers` rounds.
    pub lockstep: bool,
    /// The last layer is the origin alone.
    pub origin_last: bool,
    /// Every point lies in the closed unit ball.
    pub in_ball: bool,
    /// Sampled largest cap of shell `j` beyond the ball through shell
    /// `j + 1`, for every shell but the innermost.
    pub caps: Vec<CapEstimate>,
    /// Layer count, origin and ball checks; lockstep as well for `d ≤ 3`.
    pub pass: bool,
}

/// Peels `X_n^d` and its sub-family and compares the layer structure with
/// `L = N·L(sub) + 1`.
pub fn check_shells(d: usize, n: u64, seed: u64, eps: f64) -> Result<ShellReport> {
    let (x, trace) = recursive_family(d, n, seed)?;
    let top = &trace.levels[0];
    let opts = PeelOptions {
        eps,
        ..PeelOptions::default()
    };
    let (sub, _) = recursive_family(d - 1, top.m, seed)?;
    let sub_layers = peel_with(&sub, &opts)?.layer_number();
    let layering = peel_with(&x, &opts)?;

    let shell_size = top.shell_size;
    let big = top.shells as usize;
    let lockstep = (0..big * shell_size).all(|i| {
        let first = (i / shell_size) * sub_layers + 1;
        (first..first + sub_layers).contains(&layering.depth(i))
    });
    let origin = x.len() - 1;
    let origin_last = layering.layers().last().is_some_and(|l| l == &[origin]);
    let in_ball = x.iter().all(|p| norm(p) <= 1.0 + UNIT_TOL);

    let mut caps = Vec::new();
    for j in 0..big.saturating_sub(1) {
        let r = top.radii[j];
        let shell = PointSet::from_flat(
            d,
            x.as_flat()[j * shell_size * d..(j + 1) * shell_size * d]
                .iter()
                .map(|c| c / r)
                .collect(),
        )?;
        let inner = top.radii[j + 1] / r;
        caps.push(max_cap_sampled(
            &shell,
            inner,
            CAP_DIRECTIONS,
            rng::derive_seed(seed, j as u64),
        )?);
    }

    let layers = layering.layer_number();
    let expected = big * sub_layers + 1;
    let pass = layers == expected && origin_last && in_ball && (d > 3 || lockstep);
    Ok(ShellReport {
        dim: d,
        n,
        size: x.len(),
        shells: top.shells,
        sub_layers,
        layers,
        expected,
        lockstep,
        origin_last,
        in_ball,
        caps,
        pass,
    })
}
