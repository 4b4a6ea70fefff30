//! Point-set families for layer-number experiments.
//!
//! | kind          | dim    | size parameter | layer number            |
//! |---------------|--------|----------------|-------------------------|
//! | `base_line`   | 1      | n              | n + 1                   |
//! | `shell_family`| ≥ 2    | i              | i                       |
//! | `recursive`   | 1..=5  | n              | N·L(sub-family) + 1     |
//! | `spiral`      | 2      | n              | number of polygons      |
//! | `grid`        | 2      | n (square)     | Θ(n^{2/3})              |
//! | `random_ball` | ≥ 1    | n              | Θ(n^{2/(d+1)})          |

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::geom::{PointSet, EPS_GEOM};
use crate::nets::maximal_separated_net;
use crate::rng::{self, stream};
use crate::tangent::tangent_frame;
use crate::{Error, Result};

/// Largest dimension the recursive family supports.
pub const MAX_RECURSIVE_DIM: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    BaseLine,
    ShellFamily,
    Recursive,
    Spiral,
    Grid,
    RandomBall,
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 6] = [
        Self::BaseLine,
        Self::ShellFamily,
        Self::Recursive,
        Self::Spiral,
        Self::Grid,
        Self::RandomBall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::BaseLine => "base_line",
            Self::ShellFamily => "shell_family",
            Self::Recursive => "recursive",
            Self::Spiral => "spiral",
            Self::Grid => "grid",
            Self::RandomBall => "random_ball",
        }
    }

    /// Whether the family has minimum distance `Θ(|X|^{−1/d})`, the
    /// hypothesis of the layer-number bounds. Only uniform random samples
    /// fall short.
    pub fn is_evenly_distributed(self) -> bool {
        self != Self::RandomBall
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstructionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown construction kind `{s}`")))
    }
}

/// Everything needed to regenerate a point set bit for bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    pub dim: usize,
    pub size_param: u64,
    pub seed: u64,
}

/// A generated set, with the parameter trace for the recursive family.
#[derive(Clone, Debug, PartialEq)]
pub struct Construction {
    pub points: PointSet,
    pub trace: Option<RecursiveTrace>,
}

impl ConstructionSpec {
    pub fn new(kind: ConstructionKind, dim: usize, size_param: u64, seed: u64) -> Self {
        Self {
            kind,
            dim,
            size_param,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.size_param == 0 {
            return Err(Error::InvalidParameter("size parameter must be at least 1".into()));
        }
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{} requires {what}, got dim {}",
                    self.kind, self.dim
                )))
            }
        };
        match self.kind {
            ConstructionKind::BaseLine => need(self.dim == 1, "dim 1"),
            ConstructionKind::Spiral | ConstructionKind::Grid => need(self.dim == 2, "dim 2"),
            ConstructionKind::ShellFamily => need(self.dim >= 2, "dim ≥ 2"),
            ConstructionKind::Recursive => need(
                self.dim <= MAX_RECURSIVE_DIM,
                &format!("dim ≤ {MAX_RECURSIVE_DIM}"),
            ),
            ConstructionKind::RandomBall => Ok(()),
        }
    }

    pub fn generate(&self) -> Result<Construction> {
        self.validate()?;
        let n = self.size_param;
        let plain = |points| {
            Ok(Construction {
                points,
                trace: None,
            })
        };
        match self.kind {
            ConstructionKind::BaseLine => plain(base_line(n)?),
            ConstructionKind::ShellFamily => plain(shell_family(self.dim, n, self.seed)?),
            ConstructionKind::Recursive => {
                let (points, trace) = recursive_family(self.dim, n, self.seed)?;
                Ok(Construction {
                    points,
                    trace: Some(trace),
                })
            }
            ConstructionKind::Spiral => plain(spiral_planar(n)?),
            ConstructionKind::Grid => plain(grid_planar(n)?),
            ConstructionKind::RandomBall => plain(random_ball(self.dim, to_usize(n)?, self.seed)?),
        }
    }
}

fn to_usize(n: u64) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::InvalidParameter(format!("size {n} too large")))
}

/// `{i/n : −n ≤ i ≤ n}` on the line.
pub fn base_line(n: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("base_line needs n ≥ 1".into()));
    }
    let n = to_usize(n)?;
    let coords = (0..=2 * n)
        .map(|k| (k as f64 - n as f64) / n as f64)
        .collect();
    PointSet::from_flat(1, coords)
}

/// `i` concentric copies `(1 + j/i)·D` (`j = 0..i`) of a maximal
/// `1/i`-separated net `D` on the sphere of radius 1/2.
///
/// Copy `j` occupies indices `j·|D| .. (j+1)·|D|`; the outermost copy is last.
pub fn shell_family(dim: usize, i: u64, seed: u64) -> Result<PointSet> {
    Ok(shell_family_parts(dim, i, seed)?.0)
}

/// [`shell_family`] together with the size of each copy.
pub fn shell_family_parts(dim: usize, i: u64, seed: u64) -> Result<(PointSet, usize)> {
    if dim < 2 {
        return Err(Error::InvalidParameter("shell_family needs dim ≥ 2".into()));
    }
    if i < 2 {
        return Err(Error::InvalidParameter("shell_family needs i ≥ 2".into()));
    }
    let i = to_usize(i)?;
    let net = maximal_separated_net(dim, 0.5, 1.0 / i as f64, seed)?;
    let mut out = PointSet::with_capacity(dim, i * net.len())?;
    let mut buf = vec![0.0; dim];
    for j in 0..i {
        let f = (i + j) as f64 / i as f64;
        for p in net.points.iter() {
            buf.iter_mut().zip(p).for_each(|(b, c)| *b = f * c);
            out.push(&buf)?;
        }
    }
    Ok((out, net.len()))
}

/// Parameters of one level of the recursive construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceLevel {
    pub d: usize,
    pub n: u64,
    pub delta: f64,
    pub m: u64,
    #[serde(rename = "N")]
    pub shells: u64,
    pub net_size: usize,
    /// `|S|`: the net size times the size of the embedded sub-family.
    pub shell_size: usize,
    pub radii: Vec<f64>,
    /// `N·|S| + 1`.
    pub size: usize,
}

/// Level-by-level parameters, outermost dimension first, ending at the
/// one-dimensional base `base_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursiveTrace {
    pub levels: Vec<TraceLevel>,
    pub base_n: u64,
    pub size: usize,
    pub predicted_layers: u64,
}

/// `a^p` compared with `b^q`, exactly while the powers fit in 128 bits.
fn cmp_pow(a: u64, p: u32, b: u64, q: u32) -> std::cmp::Ordering {
    match ((a as u128).checked_pow(p), (b as u128).checked_pow(q)) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => (p as f64 * (a as f64).ln()).total_cmp(&(q as f64 * (b as f64).ln())),
    }
}

/// `m = ⌊δ^{−(d−1)}⌋` for `δ = n^{−1/(2d)}`: the largest `m` with `m^{2d} ≤ n^{d−1}`.
pub fn sub_size(d: usize, n: u64) -> u64 {
    if d < 2 {
        return 0;
    }
    let (p, q) = (2 * d as u32, d as u32 - 1);
    let mut m = (n as f64).powf(q as f64 / p as f64).floor() as u64;
    while m > 0 && cmp_pow(m, p, n, q).is_gt() {
        m -= 1;
    }
    while cmp_pow(m + 1, p, n, q).is_le() {
        m += 1;
    }
    m
}

/// `N = ⌊1/(4δ²)⌋ = ⌊n^{1/d}/4⌋`: the largest `N` with `(4N)^d ≤ n`.
pub fn shell_count(d: usize, n: u64) -> u64 {
    if d < 2 {
        return 0;
    }
    let mut big = ((n as f64).powf(1.0 / d as f64) / 4.0).floor() as u64;
    while big > 0 && cmp_pow(4 * big, d as u32, n, 1).is_gt() {
        big -= 1;
    }
    while cmp_pow(4 * (big + 1), d as u32, n, 1).is_le() {
        big += 1;
    }
    big
}

/// Smallest `n` for which the recursive family in dimension `d` is defined
/// at every level (`N ≥ 1` here and an admissible sub-family below).
pub fn min_admissible_n(d: usize) -> Result<u128> {
    match d {
        0 => Err(Error::ZeroDimension),
        1 => Ok(1),
        _ => {
            let below = min_admissible_n(d - 1)?;
            // smallest n with n^{d−1} ≥ below^{2d}
            let (p, q) = (d as u32 - 1, 2 * d as u32);
            let exact = |n: u128| -> Option<bool> {
                Some(n.checked_pow(p)? >= below.checked_pow(q)?)
            };
            let guess = ((below as f64).ln() * q as f64 / p as f64).exp().round() as u128;
            let mut n = guess.max(1);
            if let Some(true) = exact(n) {
                while n > 1 && exact(n - 1) == Some(true) {
                    n -= 1;
                }
            } else {
                while exact(n) == Some(false) {
                    n += 1;
                }
            }
            Ok(n.max(4u128.pow(d as u32)))
        }
    }
}

fn admissible(d: usize, n: u64) -> Result<()> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if d > MAX_RECURSIVE_DIM {
        return Err(Error::InvalidParameter(format!(
            "recursive family supports dim ≤ {MAX_RECURSIVE_DIM}"
        )));
    }
    let refuse = |reason: String| -> Result<()> {
        Err(Error::BelowThreshold {
            dim: d,
            n,
            reason,
            min_n: min_admissible_n(d)?,
        })
    };
    if n == 0 {
        return refuse("n must be at least 1".into());
    }
    if d == 1 {
        return Ok(());
    }
    if shell_count(d, n) == 0 {
        return refuse("shell count N = ⌊n^{1/d}/4⌋ is 0".into());
    }
    let m = sub_size(d, n);
    if admissible(d - 1, m).is_err() {
        return refuse(format!("sub-family size m = {m} is not admissible in dim {}", d - 1));
    }
    Ok(())
}

/// Layer number the recursive construction is designed to have:
/// `n + 1` on the line and `N·L(sub-family) + 1` above.
pub fn predicted_layer_number(d: usize, n: u64) -> Result<u64> {
    admissible(d, n)?;
    Ok(predicted_unchecked(d, n))
}

fn predicted_unchecked(d: usize, n: u64) -> u64 {
    if d == 1 {
        n + 1
    } else {
        shell_count(d, n) * predicted_unchecked(d - 1, sub_size(d, n)) + 1
    }
}

type Memo = Mutex<HashMap<(usize, u64, u64), Arc<(PointSet, RecursiveTrace)>>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The recursive family `X_n^d`: shells `r_i·S`, `r_i = 1 − 2iδ²`, of the
/// set `S` made of one copy of `X_m^{d−1}`, scaled by `δ/4`, in the tangent
/// hyperplane at every point of a maximal δ-separated net on the unit
/// sphere, followed by the origin.
///
/// Point order: shell 1 (outermost) first, the origin last. Within a shell,
/// net points in net order, each followed by its copy in sub-family order.
pub fn recursive_family(d: usize, n: u64, seed: u64) -> Result<(PointSet, RecursiveTrace)> {
    admissible(d, n)?;
    build(d, n, seed)
}

fn build(d: usize, n: u64, seed: u64) -> Result<(PointSet, RecursiveTrace)> {
    if d == 1 {
        return Ok((
            base_line(n)?,
            RecursiveTrace {
                levels: Vec::new(),
                base_n: n,
                size: 2 * n as usize + 1,
                predicted_layers: n + 1,
            },
        ));
    }
    let m = sub_size(d, n);
    let sub = sub_family(d - 1, m, seed)?;
    let (y, sub_trace) = (&sub.0, &sub.1);

    let delta = (n as f64).powf(-1.0 / (2.0 * d as f64));
    let net = maximal_separated_net(d, 1.0, delta, rng::derive_seed(seed, d as u64))?;
    let scale = delta / 4.0;
    let mut shell = PointSet::with_capacity(d, net.len() * y.len())?;
    let mut buf = vec![0.0; d];
    for x in net.points.iter() {
        let frame = tangent_frame(x)?;
        for p in y.iter() {
            buf.copy_from_slice(x);
            for (pk, v) in p.iter().zip(&frame) {
                buf.iter_mut().zip(v).for_each(|(b, vk)| *b += scale * pk * vk);
            }
            shell.push(&buf)?;
        }
    }

    let big = shell_count(d, n);
    let d2 = delta * delta;
    let radii: Vec<f64> = (1..=big).map(|i| 1.0 - 2.0 * i as f64 * d2).collect();
    let mut out = PointSet::with_capacity(d, big as usize * shell.len() + 1)?;
    for &r in &radii {
        for p in shell.iter() {
            buf.iter_mut().zip(p).for_each(|(b, c)| *b = r * c);
            out.push(&buf)?;
        }
    }
    out.push(&vec![0.0; d])?;

    let mut levels = vec![TraceLevel {
        d,
        n,
        delta,
        m,
        shells: big,
        net_size: net.len(),
        shell_size: shell.len(),
        radii,
        size: out.len(),
    }];
    levels.extend(sub_trace.levels.iter().cloned());
    let trace = RecursiveTrace {
        levels,
        base_n: sub_trace.base_n,
        size: out.len(),
        predicted_layers: big * sub_trace.predicted_layers + 1,
    };
    Ok((out, trace))
}

/// Memoised lower levels, so every face of one construction (and every
/// construction sharing a seed) embeds the same congruent copy.
fn sub_family(d: usize, n: u64, seed: u64) -> Result<Arc<(PointSet, RecursiveTrace)>> {
    let key = (d, n, seed);
    if let Some(hit) = memo().lock().expect("memo lock").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let built = Arc::new(build(d, n, seed)?);
    let mut map = memo().lock().expect("memo lock");
    Ok(Arc::clone(map.entry(key).or_insert(built)))
}

/// Parameters of [`spiral_planar`]: `K` vertices per polygon, at most `M`
/// polygons, and step length `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpiralParams {
    pub k: usize,
    pub max_polygons: usize,
    pub step: f64,
}

impl SpiralParams {
    pub fn for_n(n: u64) -> Self {
        let nf = n as f64;
        Self {
            k: (nf.powf(0.25).round() as usize).max(3),
            max_polygons: nf.powf(0.75).round() as usize,
            step: nf.powf(-0.5),
        }
    }
}

/// Nested regular polygons: the first is a regular `K`-gon inscribed in the
/// unit circle, and each next one moves every vertex a distance `s` along
/// its side in positive orientation. Generation ends after `M` polygons or
/// once a side is shorter than `2s`, whichever comes first, so no new vertex
/// lands closer than `s` to an old one.
///
/// Polygon `t` occupies indices `t·K .. (t+1)·K`.
pub fn spiral_planar(n: u64) -> Result<PointSet> {
    if n < 16 {
        return Err(Error::InvalidParameter("spiral needs n ≥ 16".into()));
    }
    let SpiralParams {
        k,
        max_polygons,
        step,
    } = SpiralParams::for_n(n);
    let mut poly: Vec<[f64; 2]> = (0..k)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / k as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let mut out = PointSet::with_capacity(2, k * max_polygons)?;
    for depth in 0..max_polygons {
        if depth > 0 {
            let side = side_length(&poly);
            if side < 2.0 * step {
                break;
            }
            let next: Vec<[f64; 2]> = (0..k)
                .map(|j| {
                    let (a, b) = (poly[j], poly[(j + 1) % k]);
                    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                    [
                        a[0] + step * (b[0] - a[0]) / len,
                        a[1] + step * (b[1] - a[1]) / len,
                    ]
                })
                .collect();
            if !nested(&poly, &next) {
                return Err(Error::NestingFailure { depth });
            }
            poly = next;
        }
        for p in &poly {
            out.push(p)?;
        }
    }
    Ok(out)
}

fn side_length(poly: &[[f64; 2]]) -> f64 {
    let k = poly.len();
    (0..k)
        .map(|j| {
            let (a, b) = (poly[j], poly[(j + 1) % k]);
            ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// `inner` is strictly convex (counter-clockwise) and inside `outer` up to `EPS_GEOM`.
fn nested(outer: &[[f64; 2]], inner: &[[f64; 2]]) -> bool {
    let k = inner.len();
    let convex = (0..k).all(|j| {
        let (a, b, c) = (inner[j], inner[(j + 1) % k], inner[(j + 2) % k]);
        let ab = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        cross(a, b, c) > EPS_GEOM * ab
    });
    let inside = inner.iter().all(|&p| {
        (0..outer.len()).all(|j| {
            let (a, b) = (outer[j], outer[(j + 1) % outer.len()]);
            let ab = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            cross(a, b, p) >= -EPS_GEOM * ab
        })
    });
    convex && inside
}

/// The `√n × √n` grid scaled so that its corners lie on the unit circle.
/// Row-major: point `a·√n + b` has coordinates indexed by `(a, b)`.
pub fn grid_planar(n: u64) -> Result<PointSet> {
    let k = n.isqrt();
    if n < 4 || k * k != n {
        return Err(Error::InvalidParameter(format!(
            "grid needs a perfect square n ≥ 4, got {n}"
        )));
    }
    let k = to_usize(k)?;
    let coord = |a: usize| (-1.0 + 2.0 * a as f64 / (k - 1) as f64) / SQRT_2;
    let mut out = PointSet::with_capacity(2, k * k)?;
    for a in 0..k {
        for b in 0..k {
            out.push(&[coord(a), coord(b)])?;
        }
    }
    Ok(out)
}

/// Grid spacing of [`grid_planar`].
pub fn grid_spacing(n: u64) -> f64 {
    SQRT_2 / (n.isqrt() - 1) as f64
}

/// `n` independent uniform points in the unit ball.
pub fn random_ball(dim: usize, n: usize, seed: u64) -> Result<PointSet> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if n == 0 {
        return Err(Error::InvalidParameter("random_ball needs n ≥ 1".into()));
    }
    let mut rng = rng::stream_rng(seed, stream::BALL);
    let mut out = PointSet::with_capacity(dim, n)?;
    for _ in 0..n {
        out.push(&rng::ball_point(&mut rng, dim))?;
    }
    Ok(out)
}
