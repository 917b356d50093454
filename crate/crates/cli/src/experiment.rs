use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use lipbandit::analysis::{AnalysisReport, RegretCurve, ReportOptions};
use lipbandit::bandit::{
    run_grid_ucb_baseline, run_paco, run_paco_one_sided, run_positive_gap_ucb, Algorithm, BanditError,
    ConfidenceParams,
};
use lipbandit::experts::{run_sous, ExpertsError};
use lipbandit::instances::InstanceError;
use lipbandit::{ExpertDistribution, Instance, RunTrace};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::ExperimentConfig;

/// Version of the trace CSV layout. Bumped whenever columns change.
pub const CSV_SCHEMA_VERSION: u32 = 1;
/// Version of `summary.json` and `manifest.json`.
pub const SUMMARY_SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRACE_DIR: &str = "traces";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("run T={horizon} seed={seed}: {source}")]
    Bandit { horizon: u64, seed: u64, source: BanditError },
    #[error("run T={horizon} seed={seed}: {source}")]
    Experts { horizon: u64, seed: u64, source: ExpertsError },
    #[error("positive_gap_ucb needs `run.gap`; the instance has no positive gap")]
    MissingGap,
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("{path}: hash mismatch, manifest has {expected}, file has {actual}")]
    HashMismatch { path: PathBuf, expected: String, actual: String },
    #[error("{0}")]
    Inconsistent(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.to_path_buf(), source }
}

/// Flags that change how a config is executed.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` lets the pool decide.
    pub workers: Option<usize>,
    /// Added to every configured seed.
    pub seed_offset: u64,
    /// Overrides `output.dir`.
    pub out: Option<PathBuf>,
}

/// One `(T, seed)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub horizon: u64,
    pub seed: u64,
    pub regret: f64,
    pub k_t: u32,
    pub pulls: u64,
    /// Path relative to the output directory, when traces are written.
    pub trace: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub code_version: String,
    pub config_sha256: String,
    /// The config with `output.dir` cleared.
    pub config: ExperimentConfig,
    pub seed_offset: u64,
    pub runs: Vec<RunSummary>,
    pub curve: RegretCurve,
    pub report: Option<AnalysisReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub csv_schema_version: u32,
    pub code_version: String,
    pub config_sha256: String,
    /// sha256 of every output file, keyed by path relative to the output directory.
    pub files: BTreeMap<String, String>,
}

/// Config with the output location removed, so that hashes and summaries do
/// not depend on where the run was written.
fn portable(config: &ExperimentConfig) -> ExperimentConfig {
    let mut c = config.clone();
    c.output.dir = PathBuf::new();
    c
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    let bytes = serde_json::to_vec(&portable(config)).expect("config serializes");
    hex(&Sha256::digest(bytes))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_sha256(path: &Path) -> Result<String, ExperimentError> {
    Ok(hex(&Sha256::digest(fs::read(path).map_err(io_err(path))?)))
}

/// Independent stream for one run, keyed on the master seed, the horizon
/// value and the seed value, so adding horizons or seeds leaves every other
/// run untouched.
pub fn run_rng(master_seed: u64, horizon: u64, seed: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"lipbandit/run");
    h.update(master_seed.to_le_bytes());
    h.update(horizon.to_le_bytes());
    h.update(seed.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Runs the configured algorithm once.
pub fn simulate(config: &ExperimentConfig, instance: &Instance, horizon: u64, seed: u64) -> Result<RunTrace, ExperimentError> {
    let mut rng = run_rng(config.master_seed, horizon, seed);
    let bandit = |source| ExperimentError::Bandit { horizon, seed, source };
    let lipschitz = config.lipschitz.unwrap_or_else(|| instance.lipschitz());
    let delta = match config.delta {
        Some(d) => d,
        None => ConfidenceParams::<f64>::for_horizon(horizon).map_err(bandit)?.delta,
    };
    let noise = config.noise;
    match config.algorithm {
        Algorithm::Paco => run_paco(instance, noise, horizon, delta, lipschitz, &mut rng).map_err(bandit),
        Algorithm::PacoOneSided => run_paco_one_sided(instance, noise, horizon, delta, lipschitz, &mut rng).map_err(bandit),
        Algorithm::GridUcb => run_grid_ucb_baseline(instance, noise, horizon, &mut rng).map_err(bandit),
        Algorithm::PositiveGapUcb => {
            let gap = config.gap.unwrap_or_else(|| instance.positive_gap());
            if !(gap > 0.0) {
                return Err(ExperimentError::MissingGap);
            }
            run_positive_gap_ucb(instance, noise, horizon, gap, lipschitz, &mut rng).map_err(bandit)
        }
        Algorithm::Sous => {
            let dist = ExpertDistribution::new(instance.clone(), config.amplitude)?;
            run_sous(&dist, horizon, delta, &mut rng).map_err(|source| ExperimentError::Experts { horizon, seed, source })
        }
    }
}

pub fn trace_header(dim: usize) -> Vec<String> {
    let mut h = vec!["t".to_string(), "phase".to_string()];
    h.extend((0..dim).map(|j| format!("x{j}")));
    h.extend(["reward", "gap", "cumulative_regret"].map(String::from));
    h
}

/// Writes `t,phase,x0..,reward,gap,cumulative_regret`, one row per pull.
pub fn write_trace_csv<W: Write>(trace: &RunTrace, dim: usize, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(dim))?;
    let mut row: Vec<String> = Vec::with_capacity(dim + 5);
    let mut cum = 0.0;
    for r in &trace.rounds {
        cum += r.gap;
        row.clear();
        row.push(r.t.to_string());
        row.push(r.phase.to_string());
        row.extend(trace.arm(r).coords().iter().map(|c| c.to_string()));
        row.push(r.reward.to_string());
        row.push(r.gap.to_string());
        row.push(cum.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes through a temporary sibling and renames into place, so readers
/// never see a partial file.
fn write_atomic(path: &Path, fill: impl FnOnce(&mut BufWriter<fs::File>) -> Result<(), ExperimentError>) -> Result<(), ExperimentError> {
    let tmp = tmp_path(path);
    let result = (|| {
        let mut w = BufWriter::new(fs::File::create(&tmp).map_err(io_err(&tmp))?);
        fill(&mut w)?;
        let f = w.into_inner().map_err(|e| ExperimentError::Io { path: tmp.clone(), source: e.into_error() })?;
        f.sync_all().map_err(io_err(&tmp))?;
        fs::rename(&tmp, path).map_err(io_err(path))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)
            .map_err(|source| ExperimentError::Json { path: path.to_path_buf(), source })?;
        w.write_all(b"\n").map_err(io_err(path))
    })
}

fn trace_name(horizon: u64, seed: u64) -> String {
    format!("{TRACE_DIR}/T{horizon}_seed{seed}.csv")
}

/// What `run_experiment` produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub dir: PathBuf,
    pub summary: Summary,
    pub manifest: Manifest,
}

/// Runs every `(T, seed)` pair, then writes the summary and manifest. On
/// failure every file this call created is removed again.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<Outcome, ExperimentError> {
    let dir = options.out.clone().unwrap_or_else(|| config.output.dir.clone());
    let created_dir = !dir.exists();
    let mut written: Vec<PathBuf> = Vec::new();
    let result = execute(config, options, &dir, &mut written);
    if result.is_err() {
        for p in &written {
            let _ = fs::remove_file(p);
            let _ = fs::remove_file(tmp_path(p));
        }
        let _ = fs::remove_dir(dir.join(TRACE_DIR));
        if created_dir {
            let _ = fs::remove_dir(&dir);
        }
    }
    result
}

fn execute(
    config: &ExperimentConfig,
    options: &RunOptions,
    dir: &Path,
    written: &mut Vec<PathBuf>,
) -> Result<Outcome, ExperimentError> {
    let instance = config.instance.build()?;
    let jobs: Vec<(u64, u64)> = config
        .horizons
        .iter()
        .flat_map(|&t| config.seeds.iter().map(move |&s| (t, s + options.seed_offset)))
        .collect();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    if config.output.traces {
        let traces = dir.join(TRACE_DIR);
        fs::create_dir_all(&traces).map_err(io_err(&traces))?;
        // Registered up front so that cleanup also covers runs that were
        // still in flight when another one failed.
        written.extend(jobs.iter().map(|&(t, s)| dir.join(trace_name(t, s))));
    }
    written.push(dir.join(SUMMARY_FILE));
    written.push(dir.join(MANIFEST_FILE));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = options.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let runs: Vec<RunSummary> = pool.install(|| {
        jobs.par_iter()
            .map(|&(horizon, seed)| {
                let trace = simulate(config, &instance, horizon, seed)?;
                let file = if config.output.traces {
                    let name = trace_name(horizon, seed);
                    let path = dir.join(&name);
                    write_atomic(&path, |w| {
                        write_trace_csv(&trace, instance.dim(), w)
                            .map_err(|source| ExperimentError::Csv { path: path.clone(), source })
                    })?;
                    Some(name)
                } else {
                    None
                };
                Ok(RunSummary { horizon, seed, regret: trace.regret, k_t: trace.k_t, pulls: trace.total_pulls(), trace: file })
            })
            .collect::<Result<_, ExperimentError>>()
    })?;

    let summary = summarize(config, &instance, options.seed_offset, runs);
    let mut files = BTreeMap::new();
    for r in &summary.runs {
        if let Some(name) = &r.trace {
            files.insert(name.clone(), file_sha256(&dir.join(name))?);
        }
    }
    let summary_path = dir.join(SUMMARY_FILE);
    write_json(&summary_path, &summary)?;
    files.insert(SUMMARY_FILE.to_string(), file_sha256(&summary_path)?);
    let manifest = Manifest {
        schema_version: SUMMARY_SCHEMA_VERSION,
        csv_schema_version: CSV_SCHEMA_VERSION,
        code_version: CODE_VERSION.to_string(),
        config_sha256: summary.config_sha256.clone(),
        files,
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(Outcome { dir: dir.to_path_buf(), summary, manifest })
}

/// Groups final regrets by horizon in config order.
fn regret_curve(config: &ExperimentConfig, runs: &[RunSummary]) -> RegretCurve {
    let per_seed = config
        .horizons
        .iter()
        .map(|&t| runs.iter().filter(|r| r.horizon == t).map(|r| r.regret).collect())
        .collect();
    RegretCurve::new(config.algorithm.name(), config.horizons.clone(), per_seed, config.analysis.bootstrap)
}

fn summarize(config: &ExperimentConfig, instance: &Instance, seed_offset: u64, runs: Vec<RunSummary>) -> Summary {
    let curve = regret_curve(config, &runs);
    let report = config.analysis.enabled.then(|| {
        let horizon = *config.horizons.last().expect("validated nonempty");
        let lipschitz = config.lipschitz.unwrap_or_else(|| instance.lipschitz());
        let opts = ReportOptions { dimensions: config.analysis.dimensions, packing_sum: config.analysis.packing_sum };
        let mut r = AnalysisReport::for_instance(instance, horizon, lipschitz, &config.analysis.quadrature, opts);
        r.curves.push(curve.clone());
        r
    });
    Summary {
        schema_version: SUMMARY_SCHEMA_VERSION,
        code_version: CODE_VERSION.to_string(),
        config_sha256: config_hash(config),
        config: portable(config),
        seed_offset,
        runs,
        curve,
        report,
    }
}

/// Result of re-checking an output directory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub verified_files: usize,
    pub curve: RegretCurve,
}

/// Verifies every manifest hash, cross-checks the final cumulative regret
/// of each trace against the summary and refits the exponent.
pub fn analyze_dir(dir: &Path) -> Result<Analysis, ExperimentError> {
    let read_json = |name: &str| -> Result<serde_json::Value, ExperimentError> {
        let path = dir.join(name);
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        serde_json::from_slice(&bytes).map_err(|source| ExperimentError::Json { path, source })
    };
    let manifest: Manifest = serde_json::from_value(read_json(MANIFEST_FILE)?)
        .map_err(|source| ExperimentError::Json { path: dir.join(MANIFEST_FILE), source })?;
    for (name, expected) in &manifest.files {
        let path = dir.join(name);
        let actual = file_sha256(&path)?;
        if &actual != expected {
            return Err(ExperimentError::HashMismatch { path, expected: expected.clone(), actual });
        }
    }
    let summary: Summary = serde_json::from_value(read_json(SUMMARY_FILE)?)
        .map_err(|source| ExperimentError::Json { path: dir.join(SUMMARY_FILE), source })?;
    for run in &summary.runs {
        let Some(name) = &run.trace else { continue };
        let path = dir.join(name);
        let mut reader = csv::Reader::from_path(&path).map_err(|source| ExperimentError::Csv { path: path.clone(), source })?;
        let mut last = 0.0;
        let mut rows = 0u64;
        for rec in reader.records() {
            let rec = rec.map_err(|source| ExperimentError::Csv { path: path.clone(), source })?;
            last = rec.get(rec.len() - 1).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
            rows += 1;
        }
        if rows != run.pulls || (last - run.regret).abs() > 1e-9 * run.regret.abs().max(1.0) {
            return Err(ExperimentError::Inconsistent(format!(
                "{name}: {rows} rows ending at regret {last}, summary says {} pulls and {}",
                run.pulls, run.regret
            )));
        }
    }
    Ok(Analysis { verified_files: manifest.files.len(), curve: regret_curve(&summary.config, &summary.runs) })
}
