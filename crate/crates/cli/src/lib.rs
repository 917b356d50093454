//! Experiment harness: TOML configs, multi-seed sweeps with reproducible
//! per-run random streams, CSV traces and JSON summaries.

pub mod config;
pub mod experiment;

pub use config::{parse_config, ConfigError, ExperimentConfig, InstanceSpec};
pub use experiment::{analyze_dir, run_experiment, run_rng, simulate, ExperimentError, Manifest, RunOptions, Summary};

use lipbandit::analysis::{default_r_grid, estimate_dimensions, AnalysisError, AnalysisReport, DimensionEstimate, ReportOptions};

/// Simulation-free report for every configured horizon.
pub fn bound_reports(config: &ExperimentConfig) -> Result<Vec<AnalysisReport>, ExperimentError> {
    let instance = config.instance.build()?;
    let lipschitz = config.lipschitz.unwrap_or_else(|| instance.lipschitz());
    let opts = ReportOptions { dimensions: false, packing_sum: config.analysis.packing_sum };
    Ok(config
        .horizons
        .iter()
        .map(|&t| AnalysisReport::for_instance(&instance, t, lipschitz, &config.analysis.quadrature, opts))
        .collect())
}

pub fn dimension_estimate(config: &ExperimentConfig) -> Result<Result<DimensionEstimate, AnalysisError>, ExperimentError> {
    let instance = config.instance.build()?;
    Ok(estimate_dimensions(&instance, &default_r_grid(instance.dim())))
}
