//! The `verify` suites. Each returns one JSON object per check, with the
//! measured margins and a verdict.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use convex_layers::analysis::{
    check_bounds, check_shells, lower_band, outward_push, run_sweep, upper_band, BandCheck,
};
use convex_layers::constructions::ConstructionKind;
use convex_layers::geom::{dist, norm, PointSet};
use convex_layers::io::write_pset;
use convex_layers::nets::{cardinality_ratio, is_delta_net, maximal_separated_net};
use convex_layers::peeling::extreme_points_with;
use convex_layers::rng::{self, derive_seed};
use convex_layers::tangent::verify_net;
use serde::Serialize;
use serde_json::{json, Value};

use crate::manifest::{sibling, write_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Nets,
    Tangent,
    Push,
    Bounds,
    Shells,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub pass: bool,
    pub checks: Vec<Value>,
}

/// Largest allowed ratio between extremes of a quantity meant to be stable.
pub const BAND_FACTOR: f64 = 2.0;
/// Points per random instance of the push suite, before taking the hull.
const PUSH_POINTS: usize = 40;
const PUSH_RADIUS: f64 = 0.9;
const PUSH_STREAM: u64 = 0x7075_7368;

pub struct Params {
    pub dims: Option<Vec<usize>>,
    pub deltas: Option<Vec<f64>>,
    pub n: Option<u64>,
    pub random: usize,
    pub samples: usize,
    pub face_samples: usize,
    pub kind: ConstructionKind,
    pub sizes: Vec<u64>,
    pub seeds: Vec<u64>,
    pub seed: u64,
    pub eps: f64,
    pub jobs: usize,
    pub save_nets: Option<PathBuf>,
}

impl Params {
    fn dims(&self, default: &[usize]) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| default.to_vec())
    }

    fn deltas(&self, default: &[f64]) -> Vec<f64> {
        self.deltas.clone().unwrap_or_else(|| default.to_vec())
    }
}

pub fn run(suite: Suite, p: &Params) -> Result<Report> {
    let checks = match suite {
        Suite::Nets => nets(p)?,
        Suite::Tangent => tangent(p)?,
        Suite::Push => push(p)?,
        Suite::Bounds => bounds(p)?,
        Suite::Shells => shells(p)?,
    };
    let pass = checks.iter().all(|c| c["pass"] == json!(true));
    Ok(Report {
        suite,
        pass,
        checks,
    })
}

fn nets(p: &Params) -> Result<Vec<Value>> {
    let mut checks = Vec::new();
    for d in p.dims(&[2, 3]) {
        let mut ratios = Vec::new();
        for (k, &delta) in p.deltas(&[0.05, 0.1, 0.2, 0.5]).iter().enumerate() {
            let net = maximal_separated_net(d, 1.0, delta, derive_seed(p.seed, (d * 64 + k) as u64))?;
            let margin = is_delta_net(&net, p.samples, derive_seed(p.seed, 1 << 32 | k as u64))?;
            let ratio = cardinality_ratio(&net);
            ratios.push(ratio);
            if let Some(dir) = &p.save_nets {
                let path = dir.join(format!("net_d{d}_delta{delta}.pset"));
                let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
                write_pset(BufWriter::new(f), &net.points)?;
                write_json(&sibling(&path, "json"), &net.meta())?;
            }
            checks.push(json!({
                "check": "delta_net",
                "dim": d,
                "delta": delta,
                "size": net.len(),
                "samples": p.samples,
                "worst_margin": margin,
                "cardinality_ratio": ratio,
                "pass": margin < 0.0,
            }));
        }
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        checks.push(json!({
            "check": "cardinality_stability",
            "dim": d,
            "min": lo,
            "max": hi,
            "spread": hi / lo,
            "pass": hi <= BAND_FACTOR * lo,
        }));
    }
    Ok(checks)
}

fn tangent(p: &Params) -> Result<Vec<Value>> {
    let mut checks = Vec::new();
    for d in p.dims(&[2, 3]) {
        for (k, &delta) in p.deltas(&[0.1, 0.2, 0.3]).iter().enumerate() {
            let net = maximal_separated_net(d, 1.0, delta, derive_seed(p.seed, (d * 64 + k) as u64))?;
            for r in verify_net(&net, p.samples, p.face_samples, p.seed)? {
                let mut v = serde_json::to_value(&r)?;
                v["dim"] = json!(d);
                v["net_size"] = json!(net.len());
                checks.push(v);
            }
        }
    }
    Ok(checks)
}

/// Extreme points of `PUSH_POINTS` uniform points in `PUSH_RADIUS·B^d`.
fn convex_instance(d: usize, seed: u64, eps: f64) -> Result<PointSet> {
    let mut r = rng::stream_rng(seed, PUSH_STREAM);
    let x = PointSet::from_points(
        d,
        (0..PUSH_POINTS).map(|_| {
            rng::ball_point(&mut r, d)
                .into_iter()
                .map(|c| PUSH_RADIUS * c)
                .collect::<Vec<_>>()
        }),
    )?;
    Ok(x.subset(&extreme_points_with(&x, eps)?))
}

fn push(p: &Params) -> Result<Vec<Value>> {
    let mut checks = Vec::new();
    for d in p.dims(&[2, 3, 4]) {
        let mut norm_err: f64 = 0.0;
        let mut drop = f64::NEG_INFINITY;
        for k in 0..p.random {
            let x = convex_instance(d, derive_seed(p.seed, (d << 32 | k) as u64), p.eps)?;
            let y = outward_push(&x)?;
            for (i, q) in y.iter().enumerate() {
                norm_err = norm_err.max((norm(q) - 1.0).abs());
                for j in 0..i {
                    drop = drop.max(dist(x.point(i), x.point(j)) - dist(q, y.point(j)));
                }
            }
        }
        checks.push(json!({
            "check": "outward_push",
            "dim": d,
            "instances": p.random,
            "worst_norm_error": norm_err,
            "worst_distance_drop": drop,
            "pass": norm_err <= 1e-12 && drop <= p.eps,
        }));
    }
    Ok(checks)
}

fn band_json(name: &str, band: Option<BandCheck>, counted: bool) -> Value {
    match band {
        Some(b) => json!({
            "check": name,
            "start": b.start,
            "extreme": b.extreme,
            "factor": BAND_FACTOR,
            "counted": counted,
            "pass": b.pass || !counted,
        }),
        None => json!({ "check": name, "note": "no completed rows", "pass": false }),
    }
}

fn bounds(p: &Params) -> Result<Vec<Value>> {
    let dim = p.dims(&[2])[0];
    let rows = run_sweep(p.kind, dim, &p.sizes, &p.seeds, p.jobs, p.eps)?;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut density = Vec::new();
    for r in rows.iter().filter_map(|r| r.record()) {
        let b = check_bounds(r);
        let n = r.n as f64;
        lower.push((n, b.lower_ratio));
        upper.push((n, b.upper_ratio));
        density.push((n, b.layer_density));
    }
    let refused = rows.len() - lower.len();
    // the density bound needs an evenly distributed family
    let even = p.kind.is_evenly_distributed();
    let mut checks = vec![
        band_json("lower_ratio", lower_band(&lower, BAND_FACTOR), true),
        band_json("upper_ratio", upper_band(&upper, BAND_FACTOR), true),
        band_json("layer_density", upper_band(&density, BAND_FACTOR), even),
    ];
    for c in &mut checks {
        c["kind"] = json!(p.kind);
        c["dim"] = json!(dim);
        c["refused_rows"] = json!(refused);
    }
    Ok(checks)
}

fn shells(p: &Params) -> Result<Vec<Value>> {
    let mut checks = Vec::new();
    for d in p.dims(&[2]) {
        let r = check_shells(d, p.n.unwrap_or(256), p.seed, p.eps)?;
        let mut v = serde_json::to_value(&r)?;
        v["check"] = json!("shell_lockstep");
        checks.push(v);
    }
    Ok(checks)
}
