use serde::{Deserialize, Serialize};

use super::counting::{level_region, shell};
use super::fit::{ols, LinearFit};
use super::AnalysisError;
use crate::geometry::covering_number;
use crate::instances::Instance;
use crate::Scalar;

/// Slope fit of `ln count` against `ln(1/r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// `(r, count)` pairs, including zero counts that were left out of the fit.
    pub counts: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// From shell coverings `M(X_r ∖ X_{r/2}, r/16)`.
    pub dz: DimensionFit,
    /// From maximizer coverings `M(X★, r)`.
    pub dstar: DimensionFit,
}

/// Geometric grid `r = 2^{-3}, …` with fewer levels in higher dimension so
/// that the finest coverings stay tractable.
pub fn default_r_grid(dim: usize) -> Vec<f64> {
    let last = match dim {
        1 => 10,
        2 => 8,
        _ => 6,
    };
    (3..=last).map(|k| 0.5f64.powi(k)).collect()
}

fn fit_counts(counts: Vec<(f64, usize)>) -> Result<DimensionFit, AnalysisError> {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        counts.iter().filter(|c| c.1 > 0).map(|&(r, c)| ((1.0 / r).ln(), (c as f64).ln())).unzip();
    if xs.len() < 3 {
        return Err(AnalysisError::DegenerateFit);
    }
    let LinearFit { slope, intercept, residual } = ols(&xs, &ys)?;
    Ok(DimensionFit { slope, intercept, residual, counts })
}

/// Estimates `d_z` and `d★` from covering counts of closed-form level sets.
pub fn estimate_dimensions<S: Scalar>(instance: &Instance<S>, r_grid: &[f64]) -> Result<DimensionEstimate, AnalysisError> {
    let mut shells = Vec::with_capacity(r_grid.len());
    let mut tops = Vec::with_capacity(r_grid.len());
    // Validate that closed forms exist before any counting.
    level_region(instance, S::zero())?;
    for &r in r_grid {
        if !(r > 0.0) {
            return Err(AnalysisError::InvalidArgument(format!("scale must be positive, got {r}")));
        }
        let rs = S::lit(r);
        let annulus = shell(instance, rs, rs / S::lit(2.0))?;
        shells.push((r, covering_number(&annulus, rs / S::lit(16.0))?.proxy));
        tops.push((r, covering_number(instance.maximizer(), rs)?.proxy));
    }
    Ok(DimensionEstimate { dz: fit_counts(shells)?, dstar: fit_counts(tops)? })
}
