use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{ConstructionKind, ConstructionSpec};
use crate::geom::min_distance;
use crate::peeling::{peel_with, PeelOptions};
use crate::{Error, Result};

/// One measured set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub spec: ConstructionSpec,
    pub n: usize,
    /// Minimum pairwise distance; infinite for a single point.
    pub mu: f64,
    pub layers: usize,
    pub max_layer: usize,
    /// Generation plus peeling time.
    pub wall_seconds: f64,
}

/// A sweep row: a measurement, or the reason the generator refused the spec.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepRow {
    Done(SweepRecord),
    Refused { spec: ConstructionSpec, note: String },
}

impl SweepRow {
    pub fn spec(&self) -> &ConstructionSpec {
        match self {
            SweepRow::Done(r) => &r.spec,
            SweepRow::Refused { spec, .. } => spec,
        }
    }

    pub fn record(&self) -> Option<&SweepRecord> {
        match self {
            SweepRow::Done(r) => Some(r),
            SweepRow::Refused { .. } => None,
        }
    }
}

/// Generates and peels one set.
pub fn measure(spec: &ConstructionSpec, eps: f64) -> Result<SweepRecord> {
    let start = Instant::now();
    let x = spec.generate()?.points;
    let mu = if x.len() >= 2 {
        min_distance(&x)?
    } else {
        f64::INFINITY
    };
    let opts = PeelOptions {
        eps,
        ..PeelOptions::default()
    };
    let layering = peel_with(&x, &opts)?;
    Ok(SweepRecord {
        spec: *spec,
        n: x.len(),
        mu,
        layers: layering.layer_number(),
        max_layer: layering.max_layer_size(),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Measures every `(size, seed)` pair on a pool of `jobs` threads (`0`
/// means one per core). Rows come back sorted by `(size, seed)`.
pub fn run_sweep(
    kind: ConstructionKind,
    dim: usize,
    sizes: &[u64],
    seeds: &[u64],
    jobs: usize,
    eps: f64,
) -> Result<Vec<SweepRow>> {
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one size".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one seed".into()));
    }
    let mut specs: Vec<ConstructionSpec> = sizes
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| ConstructionSpec::new(kind, dim, n, s)))
        .collect();
    specs.sort_by_key(|s| (s.size_param, s.seed));
    specs.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| match measure(spec, eps) {
                Ok(r) => SweepRow::Done(r),
                Err(e) => SweepRow::Refused {
                    spec: *spec,
                    note: e.to_string(),
                },
            })
            .collect()
    });
    Ok(rows)
}

/// Points `(n, v)` with `n` within a factor 10 of the largest `n`, by `n`.
pub fn top_decade(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let top = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0 * 10.0 >= top).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Band-stability verdict for a ratio over the top decade of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    /// Mean ratio at the smallest size of the top decade.
    pub start: f64,
    /// Smallest (lower band) or largest (upper band) ratio in the decade.
    pub extreme: f64,
    pub pass: bool,
}

fn band(points: &[(f64, f64)], factor: f64, lower: bool) -> Option<BandCheck> {
    let dec = top_decade(points);
    let n0 = dec.first()?.0;
    let first: Vec<f64> = dec.iter().filter(|p| p.0 == n0).map(|p| p.1).collect();
    let start = first.iter().sum::<f64>() / first.len() as f64;
    let values = dec.iter().map(|p| p.1);
    let (extreme, pass) = if lower {
        let e = values.fold(f64::INFINITY, f64::min);
        (e, e > 0.0 && e * factor >= start)
    } else {
        let e = values.fold(f64::NEG_INFINITY, f64::max);
        (e, e.is_finite() && e <= factor * start)
    };
    Some(BandCheck {
        start,
        extreme,
        pass,
    })
}

/// A ratio meant to stay bounded below: positive, and never below
/// `start / factor` over the top decade.
pub fn lower_band(points: &[(f64, f64)], factor: f64) -> Option<BandCheck> {
    band(points, factor, true)
}

/// A ratio meant to stay bounded above: never above `factor · start`
/// over the top decade.
pub fn upper_band(points: &[(f64, f64)], factor: f64) -> Option<BandCheck> {
    band(points, factor, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::EPS_GEOM;

    #[test]
    fn rows_sorted_and_refusals_kept() {
        let rows = run_sweep(ConstructionKind::Grid, 2, &[25, 10, 9], &[2, 1], 2, EPS_GEOM).unwrap();
        let keys: Vec<(u64, u64)> = rows
            .iter()
            .map(|r| (r.spec().size_param, r.spec().seed))
            .collect();
        assert_eq!(keys, vec![(9, 1), (9, 2), (10, 1), (10, 2), (25, 1), (25, 2)]);
        assert!(matches!(rows[2], SweepRow::Refused { .. }));
        assert_eq!(rows[0].record().unwrap().layers, 3);
        assert!(run_sweep(ConstructionKind::Grid, 2, &[], &[1], 1, EPS_GEOM).is_err());
    }

    #[test]
    fn sweep_matches_direct_measurement() {
        let rows = run_sweep(ConstructionKind::RandomBall, 2, &[200], &[5], 1, EPS_GEOM).unwrap();
        let direct = measure(&ConstructionSpec::new(ConstructionKind::RandomBall, 2, 200, 5), EPS_GEOM)
            .unwrap();
        let r = rows[0].record().unwrap();
        assert_eq!((r.n, r.mu, r.layers, r.max_layer), (direct.n, direct.mu, direct.layers, direct.max_layer));
    }

    #[test]
    fn bands() {
        let pts = [(10.0, 5.0), (100.0, 4.0), (1000.0, 3.0), (5000.0, 2.0)];
        assert_eq!(top_decade(&pts).len(), 2);
        let lo = lower_band(&pts, 2.0).unwrap();
        assert_eq!((lo.start, lo.extreme, lo.pass), (3.0, 2.0, true));
        assert!(!lower_band(&pts, 1.4).unwrap().pass);
        let up = upper_band(&[(100.0, 1.0), (1000.0, 2.5)], 2.0).unwrap();
        assert!(!up.pass);
        assert!(lower_band(&[], 2.0).is_none());
    }
}
