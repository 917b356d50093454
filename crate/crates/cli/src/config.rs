use std::path::PathBuf;

use lipbandit::analysis::{BootstrapOptions, Quadrature};
use lipbandit::bandit::Algorithm;
use lipbandit::experts::MAX_EXPERT_DIM;
use lipbandit::instances::NoiseModel;
use lipbandit::{ExpertDistribution, Instance};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config is not valid TOML: {0}")]
    Syntax(String),
    #[error("unknown key `{key}`{}", hint(.suggestions))]
    UnknownKey { key: String, suggestions: Vec<String> },
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("`{key}` should be {expected}, found {found}")]
    TypeMismatch { key: String, expected: &'static str, found: String },
    #[error("`{key}` out of range: {reason}")]
    RangeViolation { key: String, reason: String },
}

fn hint(s: &[String]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!(" (did you mean {}?)", s.join(", "))
    }
}

/// Mean-reward family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InstanceSpec {
    Cone { center: Vec<f64>, slope: f64 },
    Plateau { lo: Vec<f64>, hi: Vec<f64>, slope: f64 },
    Multipeak { centers: Vec<Vec<f64>>, heights: Vec<f64>, slope: f64 },
    OneSidedStep { peak: f64, width: f64, rise: f64, drop: f64, tail_slope: f64 },
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Instance, lipbandit::instances::InstanceError> {
        match self {
            InstanceSpec::Cone { center, slope } => Instance::cone(center.clone(), *slope),
            InstanceSpec::Plateau { lo, hi, slope } => Instance::plateau(lo.clone(), hi.clone(), *slope),
            InstanceSpec::Multipeak { centers, heights, slope } => {
                Instance::multipeak(centers.iter().cloned().zip(heights.iter().copied()).collect(), *slope)
            }
            InstanceSpec::OneSidedStep { peak, width, rise, drop, tail_slope } => {
                Instance::one_sided_step(*peak, *width, *rise, *drop, *tail_slope)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Write one CSV per run. Sweeps at large horizons usually turn this off.
    pub traces: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSpec {
    pub enabled: bool,
    pub quadrature: Quadrature,
    pub dimensions: bool,
    pub packing_sum: bool,
    pub bootstrap: BootstrapOptions,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            enabled: true,
            quadrature: Quadrature::default(),
            dimensions: true,
            packing_sum: true,
            bootstrap: BootstrapOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    /// Perturbation amplitude of the expert distribution (SOUS only).
    pub amplitude: f64,
    pub algorithm: Algorithm,
    pub horizons: Vec<u64>,
    pub seeds: Vec<u64>,
    /// `None` means `T^{-3}` per horizon.
    pub delta: Option<f64>,
    /// `None` means the instance's own constant.
    pub lipschitz: Option<f64>,
    pub noise: NoiseModel,
    /// Gap lower bound for `positive_gap_ucb`; defaults to the instance's.
    pub gap: Option<f64>,
    pub master_seed: u64,
    pub output: OutputSpec,
    pub analysis: AnalysisSpec,
}

const SECTIONS: [&str; 4] = ["instance", "run", "output", "analysis"];
const RUN_KEYS: [&str; 8] = ["algorithm", "horizons", "seeds", "delta", "lipschitz", "noise", "gap", "master_seed"];
const OUTPUT_KEYS: [&str; 2] = ["dir", "traces"];
const ANALYSIS_KEYS: [&str; 8] = [
    "enabled",
    "quadrature_levels",
    "max_cells",
    "tolerance",
    "dimensions",
    "packing_sum",
    "bootstrap_resamples",
    "bootstrap_seed",
];
const NOISE: [&str; 3] = ["gaussian_unit", "bernoulli", "zero"];

fn family_keys(family: &str) -> Option<&'static [&'static str]> {
    Some(match family {
        "cone" => &["family", "amplitude", "center", "slope"],
        "plateau" => &["family", "amplitude", "lo", "hi", "slope"],
        "multipeak" => &["family", "amplitude", "centers", "heights", "slope"],
        "one_sided_step" => &["family", "amplitude", "peak", "width", "rise", "drop", "tail_slope"],
        _ => return None,
    })
}

fn suggest(word: &str, options: &[&str]) -> Vec<String> {
    let mut scored: Vec<(f64, &str)> =
        options.iter().map(|o| (strsim::normalized_damerau_levenshtein(word, o), *o)).filter(|s| s.0 >= 0.4).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    if scored.is_empty() {
        options.iter().map(|s| s.to_string()).collect()
    } else {
        scored.into_iter().map(|s| s.1.to_string()).collect()
    }
}

fn unknown(key: String, word: &str, options: &[&str]) -> ConfigError {
    ConfigError::UnknownKey { key, suggestions: suggest(word, options) }
}

/// Typed reads from one section, each error naming `section.key`.
struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
}

impl<'a> Section<'a> {
    fn key(&self, k: &str) -> String {
        format!("{}.{k}", self.name)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for k in self.table.into_iter().flat_map(|t| t.keys()) {
            if !allowed.contains(&k.as_str()) {
                return Err(unknown(self.key(k), k, allowed));
            }
        }
        Ok(())
    }

    fn get(&self, k: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(k))
    }

    fn require(&self, k: &str) -> Result<&'a Value, ConfigError> {
        self.get(k).ok_or_else(|| ConfigError::MissingKey(self.key(k)))
    }

    fn mismatch(&self, k: &str, expected: &'static str, v: &Value) -> ConfigError {
        ConfigError::TypeMismatch { key: self.key(k), expected, found: v.type_str().to_string() }
    }

    fn float_value(&self, k: &str, v: &Value) -> Result<f64, ConfigError> {
        match v {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            other => Err(self.mismatch(k, "a number", other)),
        }
    }

    fn float(&self, k: &str) -> Result<Option<f64>, ConfigError> {
        self.get(k).map(|v| self.float_value(k, v)).transpose()
    }

    fn uint(&self, k: &str) -> Result<Option<u64>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(Value::Integer(i)) => Err(self.range(k, format!("must be nonnegative, got {i}"))),
            Some(other) => Err(self.mismatch(k, "an integer", other)),
        }
    }

    fn boolean(&self, k: &str) -> Result<Option<bool>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(other) => Err(self.mismatch(k, "a boolean", other)),
        }
    }

    fn string(&self, k: &str) -> Result<Option<&'a str>, ConfigError> {
        match self.get(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(self.mismatch(k, "a string", other)),
        }
    }

    fn array(&self, k: &str, v: &'a Value) -> Result<&'a Vec<Value>, ConfigError> {
        v.as_array().ok_or_else(|| self.mismatch(k, "an array", v))
    }

    fn floats(&self, k: &str) -> Result<Vec<f64>, ConfigError> {
        let v = self.require(k)?;
        self.array(k, v)?.iter().map(|x| self.float_value(k, x)).collect()
    }

    fn uints(&self, k: &str) -> Result<Vec<u64>, ConfigError> {
        let v = self.require(k)?;
        self.array(k, v)?
            .iter()
            .map(|x| match x {
                Value::Integer(i) if *i >= 0 => Ok(*i as u64),
                Value::Integer(i) => Err(self.range(k, format!("entries must be nonnegative, got {i}"))),
                other => Err(self.mismatch(k, "an array of integers", other)),
            })
            .collect()
    }

    fn req_float(&self, k: &str) -> Result<f64, ConfigError> {
        self.float(k)?.ok_or_else(|| ConfigError::MissingKey(self.key(k)))
    }

    fn range(&self, k: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::RangeViolation { key: self.key(k), reason: reason.into() }
    }
}

fn section<'a>(root: &'a Table, name: &'static str) -> Result<Section<'a>, ConfigError> {
    match root.get(name) {
        None => Ok(Section { name, table: None }),
        Some(Value::Table(t)) => Ok(Section { name, table: Some(t) }),
        Some(other) => Err(ConfigError::TypeMismatch {
            key: name.to_string(),
            expected: "a table",
            found: other.type_str().to_string(),
        }),
    }
}

fn parse_instance(s: &Section) -> Result<InstanceSpec, ConfigError> {
    let family = s.string("family")?.ok_or_else(|| ConfigError::MissingKey(s.key("family")))?;
    let families = ["cone", "plateau", "multipeak", "one_sided_step"];
    let allowed = family_keys(family).ok_or_else(|| unknown(s.key("family"), family, &families))?;
    s.check_keys(allowed)?;
    let slope = || s.float("slope").map(|v| v.unwrap_or(1.0));
    Ok(match family {
        "cone" => InstanceSpec::Cone { center: s.floats("center")?, slope: slope()? },
        "plateau" => InstanceSpec::Plateau { lo: s.floats("lo")?, hi: s.floats("hi")?, slope: slope()? },
        "multipeak" => {
            let v = s.require("centers")?;
            let centers = s
                .array("centers", v)?
                .iter()
                .map(|c| s.array("centers", c)?.iter().map(|x| s.float_value("centers", x)).collect())
                .collect::<Result<Vec<Vec<f64>>, _>>()?;
            let heights = s.floats("heights")?;
            if heights.len() != centers.len() {
                return Err(s.range("heights", format!("{} heights for {} centers", heights.len(), centers.len())));
            }
            InstanceSpec::Multipeak { centers, heights, slope: slope()? }
        }
        _ => InstanceSpec::OneSidedStep {
            peak: s.req_float("peak")?,
            width: s.req_float("width")?,
            rise: s.req_float("rise")?,
            drop: s.req_float("drop")?,
            tail_slope: s.float("tail_slope")?.unwrap_or(0.0),
        },
    })
}

/// Parses and validates a TOML experiment config. The grammar is documented
/// in the README.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;
    for k in root.keys() {
        if !SECTIONS.contains(&k.as_str()) {
            return Err(unknown(k.clone(), k, &SECTIONS));
        }
    }
    let inst = section(&root, "instance")?;
    let run = section(&root, "run")?;
    let out = section(&root, "output")?;
    let an = section(&root, "analysis")?;
    run.check_keys(&RUN_KEYS)?;
    out.check_keys(&OUTPUT_KEYS)?;
    an.check_keys(&ANALYSIS_KEYS)?;

    let instance = parse_instance(&inst)?;
    let amplitude = inst.float("amplitude")?.unwrap_or(0.25);

    let alg_name = run.string("algorithm")?.ok_or_else(|| ConfigError::MissingKey(run.key("algorithm")))?;
    let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
    let algorithm = Algorithm::from_name(alg_name).ok_or_else(|| unknown(run.key("algorithm"), alg_name, &names))?;
    let noise = match run.string("noise")?.unwrap_or("gaussian_unit") {
        "gaussian_unit" => NoiseModel::GaussianUnit,
        "bernoulli" => NoiseModel::Bernoulli,
        "zero" => NoiseModel::Zero,
        other => return Err(unknown(run.key("noise"), other, &NOISE)),
    };

    let mut analysis = AnalysisSpec::default();
    if let Some(v) = an.boolean("enabled")? {
        analysis.enabled = v;
    }
    if let Some(v) = an.uint("quadrature_levels")? {
        analysis.quadrature.extra_levels = u32::try_from(v).map_err(|_| an.range("quadrature_levels", "too large"))?;
    }
    if let Some(v) = an.uint("max_cells")? {
        analysis.quadrature.max_cells = v;
    }
    if let Some(v) = an.float("tolerance")? {
        analysis.quadrature.tolerance = v;
    }
    if let Some(v) = an.boolean("dimensions")? {
        analysis.dimensions = v;
    }
    if let Some(v) = an.boolean("packing_sum")? {
        analysis.packing_sum = v;
    }
    if let Some(v) = an.uint("bootstrap_resamples")? {
        analysis.bootstrap.resamples = v as usize;
    }
    if let Some(v) = an.uint("bootstrap_seed")? {
        analysis.bootstrap.seed = v;
    }

    let config = ExperimentConfig {
        instance,
        amplitude,
        algorithm,
        horizons: run.uints("horizons")?,
        seeds: run.uints("seeds")?,
        delta: run.float("delta")?,
        lipschitz: run.float("lipschitz")?,
        noise,
        gap: run.float("gap")?,
        master_seed: run.uint("master_seed")?.unwrap_or(0),
        output: OutputSpec {
            dir: PathBuf::from(out.string("dir")?.unwrap_or("out")),
            traces: out.boolean("traces")?.unwrap_or(true),
        },
        analysis,
    };
    validate(&config, &run, &inst, &an)?;
    Ok(config)
}

fn validate(c: &ExperimentConfig, run: &Section, inst: &Section, an: &Section) -> Result<(), ConfigError> {
    if c.horizons.is_empty() {
        return Err(run.range("horizons", "at least one horizon required"));
    }
    if c.horizons.iter().any(|&t| t == 0) || c.horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(run.range("horizons", "horizons must be positive and strictly increasing"));
    }
    if c.seeds.is_empty() {
        return Err(run.range("seeds", "at least one seed required"));
    }
    let mut seeds = c.seeds.clone();
    seeds.sort_unstable();
    if seeds.windows(2).any(|w| w[0] == w[1]) {
        return Err(run.range("seeds", "seeds must be distinct"));
    }
    if let Some(d) = c.delta {
        if !(d > 0.0 && d < 1.0) {
            return Err(run.range("delta", format!("must lie in (0, 1), got {d}")));
        }
    }
    if let Some(l) = c.lipschitz {
        if !(l > 0.0 && l.is_finite()) {
            return Err(run.range("lipschitz", format!("must be positive, got {l}")));
        }
    }
    if let Some(g) = c.gap {
        if !(g > 0.0 && g.is_finite()) {
            return Err(run.range("gap", format!("must be positive, got {g}")));
        }
    }
    if !(0.0..=1.0).contains(&c.amplitude) {
        return Err(inst.range("amplitude", format!("must lie in [0, 1], got {}", c.amplitude)));
    }
    let q = &c.analysis.quadrature;
    if !(q.tolerance > 0.0) {
        return Err(an.range("tolerance", "must be positive"));
    }
    if q.max_cells == 0 {
        return Err(an.range("max_cells", "must be positive"));
    }
    let instance = c.instance.build().map_err(|e| inst.range("family", e.to_string()))?;
    if c.algorithm == Algorithm::Sous {
        if instance.dim() > MAX_EXPERT_DIM {
            return Err(inst.range("family", format!("sous supports d <= {MAX_EXPERT_DIM}")));
        }
        ExpertDistribution::new(instance, c.amplitude).map_err(|e| inst.range("amplitude", e.to_string()))?;
    }
    Ok(())
}
