use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fraction of the smallest sizes dropped by [`fit_exponent`].
pub const DEFAULT_DISCARD: f64 = 0.2;

/// Least-squares line through `(log n, log L)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Data points used.
    pub count: usize,
    /// Data points dropped from the small end.
    pub discarded_prefix: usize,
}

/// [`fit_exponent_with`] using [`DEFAULT_DISCARD`].
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult> {
    fit_exponent_with(points, DEFAULT_DISCARD)
}

/// Ordinary least squares of `ln L` on `ln n`.
///
/// The points belonging to the smallest `⌊discard · k⌋` of the `k` distinct
/// sizes are dropped first. At least three points must remain.
pub fn fit_exponent_with(points: &[(f64, f64)], discard: f64) -> Result<FitResult> {
    if !(0.0..1.0).contains(&discard) {
        return Err(Error::InvalidParameter(format!(
            "discard fraction must lie in [0, 1), got {discard}"
        )));
    }
    if let Some(&(n, l)) = points
        .iter()
        .find(|(n, l)| !(*n > 0.0 && *l > 0.0 && n.is_finite() && l.is_finite()))
    {
        return Err(Error::InvalidParameter(format!(
            "fit needs positive finite values, got ({n}, {l})"
        )));
    }
    let mut sizes: Vec<f64> = points.iter().map(|p| p.0).collect();
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    let drop = (discard * sizes.len() as f64).floor() as usize;
    let cutoff = sizes.get(drop).copied().unwrap_or(f64::INFINITY);
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 >= cutoff)
        .map(|&(n, l)| (n.ln(), l.ln()))
        .collect();
    if used.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: used.len(),
        });
    }
    let k = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / k;
    let my = used.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = used.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit needs at least two distinct sizes".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = used
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(FitResult {
        slope,
        intercept,
        r2,
        count: used.len(),
        discarded_prefix: points.len() - used.len(),
    })
}

const MAX_EXPONENT_DIM: usize = 100;

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if d > MAX_EXPONENT_DIM {
        return Err(Error::InvalidParameter(format!(
            "exponent is computed for d ≤ {MAX_EXPONENT_DIM}"
        )));
    }
    Ok(())
}

/// `L_1 = 1`, `2d·L_d = 2 + (d − 1)·L_{d−1}`.
pub fn exponent_by_recurrence(d: usize) -> Result<Ratio<i128>> {
    check_dim(d)?;
    let mut l = Ratio::from_integer(1i128);
    for k in 2..=d as i128 {
        l = (Ratio::from_integer(2) + Ratio::from_integer(k - 1) * l) / Ratio::from_integer(2 * k);
    }
    Ok(l)
}

/// `2/d − 2/(d·2^d)`.
pub fn exponent_closed_form(d: usize) -> Result<Ratio<i128>> {
    check_dim(d)?;
    let d = d as i128;
    Ok(Ratio::new(2, d) - Ratio::new(2, d << d))
}

/// Layer-number exponent of the recursive construction, from the
/// recurrence, checked against the closed form.
pub fn theoretical_exponent(d: usize) -> Result<Ratio<i128>> {
    let rec = exponent_by_recurrence(d)?;
    let closed = exponent_closed_form(d)?;
    assert_eq!(rec, closed, "recurrence and closed form disagree at d = {d}");
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [10.0f64, 100.0, 1000.0]
            .iter()
            .map(|&n| (n, n.powf(0.75)))
            .collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 0.75).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert_eq!((f.count, f.discarded_prefix), (3, 0));
    }

    #[test]
    fn constant_series() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|k| (10f64.powi(k), 7.0)).collect();
        let f = fit_exponent(&pts).unwrap();
        assert!(f.slope.abs() < 1e-12);
        assert_eq!((f.count, f.discarded_prefix), (4, 1));
    }

    #[test]
    fn synthetic_exponents() {
        for e in [0.1, 0.5, 2.0 / 3.0, 1.3] {
            let pts: Vec<(f64, f64)> = (0..12)
                .map(|k| {
                    let n = 50.0 * 1.7f64.powi(k);
                    (n, 3.0 * n.powf(e))
                })
                .collect();
            let f = fit_exponent(&pts).unwrap();
            assert!((f.slope - e).abs() < 1e-12);
            assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn fit_validation() {
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_exponent(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
        assert!(fit_exponent_with(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)], 1.0).is_err());
    }

    #[test]
    fn exponents() {
        assert_eq!(theoretical_exponent(1).unwrap(), Ratio::from_integer(1));
        assert_eq!(theoretical_exponent(2).unwrap(), Ratio::new(3, 4));
        assert_eq!(theoretical_exponent(3).unwrap(), Ratio::new(7, 12));
        for d in 1..=30 {
            assert_eq!(exponent_by_recurrence(d).unwrap(), exponent_closed_form(d).unwrap());
        }
        assert!(theoretical_exponent(0).is_err());
    }
}
