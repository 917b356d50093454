//! Instance-dependent regret bounds: truncated and lower integrals, phase
//! budgets, packing sums, dimension estimates and empirical exponent fits.

mod counting;
mod dimensions;
mod fit;
mod integrals;

pub use counting::{kt_from_budget, packing_sum_bound, PackingSum, C_SEP};
pub use dimensions::{default_r_grid, estimate_dimensions, DimensionEstimate, DimensionFit};
pub use fit::{fit_exponent, ols, BootstrapOptions, ExponentFit, LinearFit, MIN_DECADES, MIN_HORIZONS, MIN_SEEDS};
pub use integrals::{kt_lower, lower_integral, truncated_integral, Quadrature, MAXIMIZER_TOLERANCE};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::instances::Instance;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("quadrature did not settle: coarse {coarse}, fine {fine}")]
    QuadratureUnstable { coarse: f64, fine: f64 },
    #[error("not enough nonzero counts to fit a slope")]
    DegenerateFit,
    #[error("insufficient data for an exponent fit: {0}")]
    InsufficientData(String),
    #[error("mean regret must be positive at every horizon")]
    NonPositiveRegret,
    #[error("instance has no closed-form level sets")]
    NoClosedForm,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Predicted regret exponent `(d_z + 1)/(max(d_z, d★) + 2)`.
pub fn predicted_exponent(dz: f64, dstar: f64) -> f64 {
    (dz + 1.0) / (dz.max(dstar) + 2.0)
}

/// Mean regret per horizon for one algorithm, plus the per-seed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub algorithm: String,
    pub horizons: Vec<u64>,
    pub per_seed: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    /// Fit over the curve, when it has enough horizons and seeds.
    pub exponent: Option<ExponentFit>,
    /// Why no fit was produced.
    pub fit_error: Option<String>,
}

impl RegretCurve {
    pub fn new(algorithm: impl Into<String>, horizons: Vec<u64>, per_seed: Vec<Vec<f64>>, options: BootstrapOptions) -> Self {
        let mean = per_seed.iter().map(|v| v.iter().sum::<f64>() / v.len().max(1) as f64).collect();
        let (exponent, fit_error) = match fit_exponent(&horizons, &per_seed, options) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self { algorithm: algorithm.into(), horizons, per_seed, mean, exponent, fit_error }
    }
}

fn keep_or_note<T>(notes: &mut Vec<String>, what: &str, r: Result<T, AnalysisError>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{what}: {e}"));
            None
        }
    }
}

/// Which of the more expensive report entries to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub dimensions: bool,
    pub packing_sum: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { dimensions: true, packing_sum: true }
    }
}

/// Everything the analysis suite knows about one instance at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub family: String,
    pub dim: usize,
    pub lipschitz: f64,
    pub horizon: u64,
    pub dz_advertised: Option<f64>,
    pub dstar_advertised: Option<f64>,
    pub predicted_exponent: Option<f64>,
    pub dimensions: Option<DimensionEstimate>,
    pub kt_budget: Option<u32>,
    pub kt_lower: u32,
    /// Truncated integral at `k_T = kt_lower`.
    pub upper_integral: Option<f64>,
    pub lower_integral: Option<f64>,
    pub packing_sum: Option<PackingSum>,
    pub curves: Vec<RegretCurve>,
    /// Errors from entries that could not be computed.
    pub notes: Vec<String>,
}

impl AnalysisReport {
    /// Computes the simulation-free part of the report. Entries that fail
    /// (no closed form, unstable quadrature) are left empty and noted.
    pub fn for_instance<S: Scalar>(
        instance: &Instance<S>,
        horizon: u64,
        lipschitz: S,
        quadrature: &Quadrature,
        options: ReportOptions,
    ) -> Self {
        let mut notes = Vec::new();
        let dim = instance.dim();
        let k_lower = kt_lower(horizon, dim);
        let dz = instance.dz().map(|v| v.as_f64());
        let dstar = instance.dstar().map(|v| v.as_f64());
        let dimensions = if options.dimensions {
            keep_or_note(&mut notes, "dimensions", estimate_dimensions(instance, &default_r_grid(dim)))
        } else {
            None
        };
        let kt_budget = keep_or_note(&mut notes, "kt_budget", kt_from_budget(instance, horizon, lipschitz));
        let upper = keep_or_note(&mut notes, "upper_integral", truncated_integral(instance, k_lower, quadrature).map(|v| v.as_f64()));
        let lower = keep_or_note(&mut notes, "lower_integral", lower_integral(instance, horizon, quadrature).map(|v| v.as_f64()));
        let packing = if options.packing_sum {
            keep_or_note(&mut notes, "packing_sum", packing_sum_bound(instance, k_lower.max(1), lipschitz))
        } else {
            None
        };
        Self {
            family: instance.kind().name().to_string(),
            dim,
            lipschitz: lipschitz.as_f64(),
            horizon,
            dz_advertised: dz,
            dstar_advertised: dstar,
            predicted_exponent: dz.zip(dstar).map(|(a, b)| predicted_exponent(a, b)),
            dimensions,
            kt_budget,
            kt_lower: k_lower,
            upper_integral: upper,
            lower_integral: lower,
            packing_sum: packing,
            curves: Vec::new(),
            notes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicted_rates() {
        assert_eq!(predicted_exponent(0.0, 0.0), 0.5);
        assert!((predicted_exponent(0.0, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((predicted_exponent(1.0, 1.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn report_orders_integrals() {
        let cone = Instance::cone(vec![0.5], 1.0).unwrap();
        let r = AnalysisReport::for_instance(&cone, 4096, 1.0, &Quadrature::default(), ReportOptions::default());
        assert!(r.notes.is_empty(), "{:?}", r.notes);
        assert_eq!(r.kt_lower, 4);
        assert!(r.upper_integral.unwrap() >= r.lower_integral.unwrap());
    }

    #[test]
    fn custom_instance_notes_missing_closed_forms() {
        use crate::geometry::{Aabb, Point, Region};
        let max = Region::singleton(Aabb::unit(1).unwrap(), &Point::from_f64(&[0.5]).unwrap()).unwrap();
        let c = Instance::custom(1, 1.0, 1.0, max, |x: &[f64]| 1.0 - (x[0] - 0.5).abs()).unwrap();
        let r = AnalysisReport::for_instance(&c, 1000, 1.0, &Quadrature::default(), ReportOptions::default());
        assert!(r.upper_integral.is_some());
        assert!(r.dimensions.is_none() && r.kt_budget.is_none());
        assert_eq!(r.notes.len(), 3);
    }
}
