use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit, AnalysisError> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(AnalysisError::DegenerateFit);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return Err(AnalysisError::DegenerateFit);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Ok(LinearFit { slope, intercept, residual: (sse / n).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub resamples: usize,
    pub seed: u64,
    /// Two-sided coverage of the percentile interval.
    pub level: f64,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self { resamples: 2000, seed: 0, level: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub horizons: Vec<u64>,
    pub mean_regret: Vec<f64>,
}

pub const MIN_HORIZONS: usize = 4;
pub const MIN_DECADES: f64 = 2.5;
pub const MIN_SEEDS: usize = 10;

/// Fits `log mean regret ≈ slope·log T + c` with a seed-resampling bootstrap
/// interval. `regrets[i]` holds one value per seed at `horizons[i]`.
pub fn fit_exponent(
    horizons: &[u64],
    regrets: &[Vec<f64>],
    options: BootstrapOptions,
) -> Result<ExponentFit, AnalysisError> {
    if horizons.len() != regrets.len() {
        return Err(AnalysisError::InsufficientData("one regret list per horizon is required".into()));
    }
    if horizons.len() < MIN_HORIZONS {
        return Err(AnalysisError::InsufficientData(format!(
            "need at least {MIN_HORIZONS} horizons, got {}",
            horizons.len()
        )));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) || horizons[0] == 0 {
        return Err(AnalysisError::InsufficientData("horizons must be positive and increasing".into()));
    }
    let decades = (horizons[horizons.len() - 1] as f64 / horizons[0] as f64).log10();
    if decades < MIN_DECADES {
        return Err(AnalysisError::InsufficientData(format!("horizons span {decades:.2} decades, need {MIN_DECADES}")));
    }
    if let Some(r) = regrets.iter().find(|r| r.len() < MIN_SEEDS) {
        return Err(AnalysisError::InsufficientData(format!("need {MIN_SEEDS} seeds per horizon, got {}", r.len())));
    }
    let xs: Vec<f64> = horizons.iter().map(|&t| (t as f64).ln()).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let means: Vec<f64> = regrets.iter().map(|r| mean(r)).collect();
    if means.iter().any(|&m| !(m > 0.0)) {
        return Err(AnalysisError::NonPositiveRegret);
    }
    let fit = ols(&xs, &means.iter().map(|m| m.ln()).collect::<Vec<_>>())?;

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut slopes = Vec::with_capacity(options.resamples);
    let mut ys = vec![0.0; xs.len()];
    for _ in 0..options.resamples {
        for (y, r) in ys.iter_mut().zip(regrets) {
            let s: f64 = (0..r.len()).map(|_| r[rng.gen_range(0..r.len())]).sum();
            *y = (s / r.len() as f64).max(f64::MIN_POSITIVE).ln();
        }
        slopes.push(ols(&xs, &ys)?.slope);
    }
    slopes.sort_by(f64::total_cmp);
    let (ci_low, ci_high) = if slopes.is_empty() {
        (fit.slope, fit.slope)
    } else {
        let tail = (1.0 - options.level) / 2.0;
        let at = |q: f64| slopes[((q * (slopes.len() - 1) as f64).round() as usize).min(slopes.len() - 1)];
        (at(tail), at(1.0 - tail))
    };
    Ok(ExponentFit {
        slope: fit.slope,
        intercept: fit.intercept,
        residual: fit.residual,
        ci_low,
        ci_high,
        horizons: horizons.to_vec(),
        mean_regret: means,
    })
}
