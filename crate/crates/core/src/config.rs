//! Declarative run configuration: one TOML file per run describing scales,
//! membership parameters, dimension structure, expert knowledge, fusion and
//! learning settings, and (optionally) a benchmark section.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bnet::{CptFragment, Dimension, NetworkStructure, TNorm};
use crate::error::{Error, Result};
use crate::eval::{DatasetSchema, ImputeStrategy, ModelKind};
use crate::fuzzify::{GaussianMf, IndicatorSpec, DEFAULT_SCORE_CENTERS, DEFAULT_SCORE_SIGMA};
use crate::learn::LearnConfig;
use crate::rulebase::ExpertKnowledge;
use crate::types::{LinguisticScale, ScaleRef, TieBreak, Weights};

/// FNV-1a over the raw config bytes; stamped into manifests so any output
/// can be traced to the exact configuration that produced it.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    name: Option<String>,
    levels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndicatorSection {
    name: String,
    #[serde(default = "default_weight")]
    weight: f64,
    centers: Option<Vec<f64>>,
    sigma: Option<f64>,
    sigmas: Option<Vec<f64>>,
    domain: Option<[f64; 2]>,
    /// Fit centers and sigma from the training column instead of taking
    /// them from this file.
    #[serde(default)]
    percentiles: bool,
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimensionSection {
    name: String,
    levels: Option<Vec<String>>,
    #[serde(default)]
    indicator: Vec<IndicatorSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpertSection {
    antecedent: Vec<String>,
    weight: Option<f64>,
    consequent: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CptOverrideSection {
    antecedent: Vec<String>,
    /// One probability per output level, lowest grade first.
    probs: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RulesSection {
    alpha: f64,
    tie_break: String,
    tnorm: String,
}

impl Default for RulesSection {
    fn default() -> Self {
        RulesSection {
            alpha: 0.5,
            tie_break: "higher".into(),
            tnorm: "min".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LearnSection {
    smoothing: f64,
    tau: f64,
    max_iters: usize,
}

impl Default for LearnSection {
    fn default() -> Self {
        let d = LearnConfig::default();
        LearnSection {
            smoothing: d.smoothing,
            tau: d.tau,
            max_iters: d.max_iters,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PriorSection {
    mode: String,
    probs: Option<Vec<f64>>,
}

impl Default for PriorSection {
    fn default() -> Self {
        PriorSection {
            mode: "from-data".into(),
            probs: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SplitSection {
    train_fraction: f64,
    stratified: bool,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            train_fraction: 0.8,
            stratified: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct DataSection {
    class_column: String,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            class_column: "grade".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchmarkDatasetSection {
    name: String,
    path: String,
    class_column: String,
    classes: Option<Vec<String>>,
    #[serde(default)]
    categorical: Vec<String>,
    delimiter: Option<String>,
    missing: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchmarkSection {
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default = "default_models")]
    models: Vec<String>,
    #[serde(default = "default_impute")]
    impute: String,
    max_tuples: Option<usize>,
    min_samples_per_tuple: Option<usize>,
    #[serde(default, rename = "dataset")]
    datasets: Vec<BenchmarkDatasetSection>,
}

fn default_trials() -> usize {
    10
}

fn default_models() -> Vec<String> {
    vec!["fbn".into(), "nb".into(), "weighted".into()]
}

fn default_impute() -> String {
    "mean-mode".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    #[serde(default)]
    output: OutputSection,
    #[serde(default, rename = "dimension")]
    dimensions: Vec<DimensionSection>,
    #[serde(default, rename = "expert")]
    experts: Vec<ExpertSection>,
    #[serde(default, rename = "cpt_override")]
    cpt_overrides: Vec<CptOverrideSection>,
    #[serde(default)]
    rules: RulesSection,
    #[serde(default)]
    learn: LearnSection,
    #[serde(default)]
    prior: PriorSection,
    #[serde(default)]
    split: SplitSection,
    #[serde(default)]
    data: DataSection,
    benchmark: Option<BenchmarkSection>,
}

/// A sub-indicator's fuzzifier: fixed parameters from the config, or a
/// deferred fit from training-column percentiles.
#[derive(Debug, Clone)]
pub enum IndicatorPlan {
    Explicit(IndicatorSpec),
    FromData { name: String, scale: ScaleRef },
}

impl IndicatorPlan {
    pub fn name(&self) -> &str {
        match self {
            IndicatorPlan::Explicit(spec) => spec.name(),
            IndicatorPlan::FromData { name, .. } => name,
        }
    }

    /// Resolves the plan, drawing percentile fits from `samples` when the
    /// parameters are not fixed in the config.
    pub fn resolve(&self, samples: Option<&[f64]>) -> Result<IndicatorSpec> {
        match self {
            IndicatorPlan::Explicit(spec) => Ok(spec.clone()),
            IndicatorPlan::FromData { name, scale } => {
                let samples = samples.ok_or_else(|| {
                    Error::Config(format!(
                        "indicator `{name}` uses percentile fitting and needs training data"
                    ))
                })?;
                IndicatorSpec::from_samples(name.clone(), scale.clone(), samples)
            }
        }
    }
}

/// How the output prior is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorPlan {
    Uniform,
    FromData,
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct BenchmarkDatasetPlan {
    pub name: String,
    pub path: PathBuf,
    pub schema: DatasetSchema,
}

#[derive(Debug, Clone)]
pub struct BenchmarkPlan {
    pub trials: usize,
    pub models: Vec<ModelKind>,
    pub impute: ImputeStrategy,
    pub max_tuples: Option<usize>,
    pub min_samples_per_tuple: Option<usize>,
    pub datasets: Vec<BenchmarkDatasetPlan>,
}

/// A fully validated run configuration with every name resolved.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub network: NetworkStructure,
    /// One plan per sub-indicator, dimension-major order.
    pub indicators: Vec<IndicatorPlan>,
    pub kb: ExpertKnowledge,
    pub alpha: f64,
    pub tie_break: TieBreak,
    pub tnorm: TNorm,
    pub learn: LearnConfig,
    pub prior: PriorPlan,
    pub cpt_overrides: CptFragment,
    pub train_fraction: f64,
    pub stratified: bool,
    pub class_column: String,
    pub benchmark: Option<BenchmarkPlan>,
    pub config_hash: u64,
}

impl RunConfig {
    /// Reads and validates a TOML config file. Relative dataset paths
    /// resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|e| Error::Config(format!("{}: not UTF-8: {e}", path.display())))?;
        let raw: RawConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        RunConfig::from_raw(raw, &base_dir, fnv1a64(&bytes))
    }

    /// Parses config text directly; relative paths resolve against
    /// `base_dir`.
    pub fn from_str(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        RunConfig::from_raw(raw, base_dir, fnv1a64(text.as_bytes()))
    }

    fn from_raw(raw: RawConfig, base_dir: &Path, config_hash: u64) -> Result<Self> {
        let output_scale = match &raw.output.levels {
            Some(levels) => LinguisticScale::new(levels.clone())?,
            None => LinguisticScale::four_level(),
        };
        let output_name = raw.output.name.clone().unwrap_or_else(|| "S".into());

        // Dimensions default to the stock A/P/M layout.
        let dim_sections: Vec<DimensionSection> = if raw.dimensions.is_empty() {
            ["A", "P", "M"]
                .iter()
                .map(|name| DimensionSection {
                    name: name.to_string(),
                    levels: None,
                    indicator: Vec::new(),
                })
                .collect()
        } else {
            raw.dimensions.clone()
        };

        let mut dimensions = Vec::with_capacity(dim_sections.len());
        let mut indicators: Vec<IndicatorPlan> = Vec::new();
        for section in &dim_sections {
            let scale = match &section.levels {
                Some(levels) => LinguisticScale::new(levels.clone())?,
                None => output_scale.clone(),
            };
            // A dimension without explicit sub-indicators is fed by a
            // single raw score of its own name.
            let indicator_sections: Vec<IndicatorSection> = if section.indicator.is_empty() {
                vec![IndicatorSection {
                    name: section.name.clone(),
                    weight: 1.0,
                    centers: None,
                    sigma: None,
                    sigmas: None,
                    domain: None,
                    percentiles: false,
                }]
            } else {
                section.indicator.clone()
            };
            let mut names = Vec::with_capacity(indicator_sections.len());
            let mut weights = Vec::with_capacity(indicator_sections.len());
            for ind in &indicator_sections {
                names.push(ind.name.clone());
                weights.push(ind.weight);
                indicators.push(build_indicator_plan(ind, &scale)?);
            }
            dimensions.push(Dimension::new(
                section.name.clone(),
                scale,
                names,
                Weights::new(weights)?,
            )?);
        }
        let network = NetworkStructure::new(dimensions, output_name, output_scale.clone())?;

        // Duplicate sub-indicator names would make input columns ambiguous.
        {
            let mut seen: Vec<&str> = Vec::new();
            for plan in &indicators {
                if seen.contains(&plan.name()) {
                    return Err(Error::Config(format!(
                        "sub-indicator `{}` appears in more than one dimension",
                        plan.name()
                    )));
                }
                seen.push(plan.name());
            }
        }

        let dim_scales = network.dimension_scales();
        let mut kb = ExpertKnowledge::new();
        for entry in &raw.experts {
            let tuple = resolve_tuple(&entry.antecedent, &dim_scales)?;
            if let Some(w) = entry.weight {
                kb.set_weight(tuple.clone(), w)?;
            }
            if let Some(label) = &entry.consequent {
                kb.set_consequent(tuple, output_scale.resolve(label)?);
            }
        }

        let mut overrides = CptFragment::default();
        for entry in &raw.cpt_overrides {
            let tuple = resolve_tuple(&entry.antecedent, &dim_scales)?;
            if entry.probs.len() != output_scale.arity() {
                return Err(Error::Config(format!(
                    "cpt_override for {:?} has {} probabilities, expected {}",
                    entry.antecedent,
                    entry.probs.len(),
                    output_scale.arity()
                )));
            }
            overrides.entries.push((tuple, entry.probs.clone()));
        }

        if !(0.0..=1.0).contains(&raw.rules.alpha) {
            return Err(Error::Config(format!(
                "rules.alpha must be in [0, 1], got {}",
                raw.rules.alpha
            )));
        }
        let tie_break = match raw.rules.tie_break.as_str() {
            "higher" => TieBreak::Higher,
            "lower" => TieBreak::Lower,
            other => {
                return Err(Error::Config(format!(
                    "rules.tie_break must be `higher` or `lower`, got `{other}`"
                )))
            }
        };
        let tnorm = match raw.rules.tnorm.as_str() {
            "min" => TNorm::Min,
            "product" => TNorm::Product,
            other => {
                return Err(Error::Config(format!(
                    "rules.tnorm must be `min` or `product`, got `{other}`"
                )))
            }
        };

        let learn = LearnConfig {
            smoothing: raw.learn.smoothing,
            tau: raw.learn.tau,
            max_iters: raw.learn.max_iters,
        };
        learn.validate()?;

        let prior = match raw.prior.mode.as_str() {
            "uniform" => PriorPlan::Uniform,
            "from-data" => PriorPlan::FromData,
            "fixed" => {
                let probs = raw.prior.probs.clone().ok_or_else(|| {
                    Error::Config("prior.mode = \"fixed\" needs prior.probs".into())
                })?;
                if probs.len() != output_scale.arity() {
                    return Err(Error::Config(format!(
                        "prior.probs has {} entries, expected {}",
                        probs.len(),
                        output_scale.arity()
                    )));
                }
                PriorPlan::Fixed(probs)
            }
            other => {
                return Err(Error::Config(format!(
                    "prior.mode must be `uniform`, `from-data`, or `fixed`, got `{other}`"
                )))
            }
        };

        if !(0.0 < raw.split.train_fraction && raw.split.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "split.train_fraction must be in (0, 1), got {}",
                raw.split.train_fraction
            )));
        }

        let benchmark = match &raw.benchmark {
            None => None,
            Some(section) => Some(build_benchmark_plan(section, base_dir)?),
        };

        Ok(RunConfig {
            seed: raw.seed.unwrap_or(0),
            network,
            indicators,
            kb,
            alpha: raw.rules.alpha,
            tie_break,
            tnorm,
            learn,
            prior,
            cpt_overrides: overrides,
            train_fraction: raw.split.train_fraction,
            stratified: raw.split.stratified,
            class_column: raw.data.class_column.clone(),
            benchmark,
            config_hash,
        })
    }

    /// Sub-indicator column names in dimension-major order; the order
    /// expected of score input files.
    pub fn indicator_names(&self) -> Vec<String> {
        self.indicators
            .iter()
            .map(|p| p.name().to_string())
            .collect()
    }

    /// Resolves every indicator plan, pulling percentile fits from
    /// `columns` (keyed by indicator name) where needed.
    pub fn resolve_indicators(
        &self,
        columns: Option<&HashMap<String, Vec<f64>>>,
    ) -> Result<Vec<IndicatorSpec>> {
        self.indicators
            .iter()
            .map(|plan| {
                let samples = columns.and_then(|c| c.get(plan.name())).map(Vec::as_slice);
                plan.resolve(samples)
            })
            .collect()
    }
}

fn build_indicator_plan(section: &IndicatorSection, scale: &ScaleRef) -> Result<IndicatorPlan> {
    if section.percentiles {
        if section.centers.is_some() || section.sigma.is_some() || section.sigmas.is_some() {
            return Err(Error::Config(format!(
                "indicator `{}`: percentiles = true excludes explicit centers/sigmas",
                section.name
            )));
        }
        return Ok(IndicatorPlan::FromData {
            name: section.name.clone(),
            scale: scale.clone(),
        });
    }
    let centers: Vec<f64> = match &section.centers {
        Some(c) => c.clone(),
        None => {
            if scale.arity() != 4 {
                return Err(Error::Config(format!(
                    "indicator `{}`: default centers cover 4 levels, scale has {}; \
                     set centers explicitly or use percentiles = true",
                    section.name,
                    scale.arity()
                )));
            }
            DEFAULT_SCORE_CENTERS.to_vec()
        }
    };
    let sigmas: Vec<f64> = match (&section.sigmas, section.sigma) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(format!(
                "indicator `{}`: give either sigma or sigmas, not both",
                section.name
            )))
        }
        (Some(list), None) => list.clone(),
        (None, Some(s)) => vec![s; centers.len()],
        (None, None) => vec![DEFAULT_SCORE_SIGMA; centers.len()],
    };
    if sigmas.len() != centers.len() {
        return Err(Error::Config(format!(
            "indicator `{}`: {} sigmas for {} centers",
            section.name,
            sigmas.len(),
            centers.len()
        )));
    }
    let domain = section.domain.map(|d| (d[0], d[1])).unwrap_or((0.0, 100.0));
    let mfs = centers
        .iter()
        .zip(&sigmas)
        .map(|(&c, &s)| GaussianMf::new(c, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndicatorPlan::Explicit(IndicatorSpec::new(
        section.name.clone(),
        scale.clone(),
        mfs,
        domain,
    )?))
}

fn resolve_tuple(labels: &[String], dim_scales: &[ScaleRef]) -> Result<Vec<usize>> {
    if labels.len() != dim_scales.len() {
        return Err(Error::Config(format!(
            "antecedent {labels:?} has {} levels, expected one per dimension ({})",
            labels.len(),
            dim_scales.len()
        )));
    }
    labels
        .iter()
        .zip(dim_scales)
        .map(|(label, scale)| scale.resolve(label))
        .collect()
}

fn build_benchmark_plan(section: &BenchmarkSection, base_dir: &Path) -> Result<BenchmarkPlan> {
    if section.trials == 0 {
        return Err(Error::Config("benchmark.trials must be >= 1".into()));
    }
    if section.datasets.is_empty() {
        return Err(Error::Config("benchmark needs at least one dataset".into()));
    }
    let models = section
        .models
        .iter()
        .map(|m| ModelKind::parse(m))
        .collect::<Result<Vec<_>>>()?;
    if models.is_empty() {
        return Err(Error::Config("benchmark.models is empty".into()));
    }
    let impute = match section.impute.as_str() {
        "mean-mode" => ImputeStrategy::MeanMode,
        "drop" => ImputeStrategy::DropRecords,
        other => {
            return Err(Error::Config(format!(
                "benchmark.impute must be `mean-mode` or `drop`, got `{other}`"
            )))
        }
    };
    let datasets = section
        .datasets
        .iter()
        .map(|d| {
            let mut schema = DatasetSchema::new(d.class_column.clone());
            schema.classes = d.classes.clone();
            schema.categorical = d.categorical.clone();
            if let Some(delim) = &d.delimiter {
                let bytes = delim.as_bytes();
                if bytes.len() != 1 {
                    return Err(Error::Config(format!(
                        "dataset `{}`: delimiter must be a single byte",
                        d.name
                    )));
                }
                schema.delimiter = bytes[0];
            }
            if let Some(missing) = &d.missing {
                schema.missing_markers = missing.clone();
            }
            let raw_path = PathBuf::from(&d.path);
            let path = if raw_path.is_absolute() {
                raw_path
            } else {
                base_dir.join(raw_path)
            };
            Ok(BenchmarkDatasetPlan {
                name: d.name.clone(),
                path,
                schema,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchmarkPlan {
        trials: section.trials,
        models,
        impute,
        max_tuples: section.max_tuples,
        min_samples_per_tuple: section.min_samples_per_tuple,
        datasets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const STUDENT_TOML: &str = r#"
seed = 42

[rules]
alpha = 0.5

[learn]
smoothing = 1.0
tau = 0.001
max_iters = 50

[[dimension]]
name = "A"
  [[dimension.indicator]]
  name = "A"

[[dimension]]
name = "P"

[[dimension]]
name = "M"

[[expert]]
antecedent = ["e", "g", "e"]
weight = 0.9
consequent = "e"
"#;

    #[test]
    fn minimal_config_defaults_to_stock_network() {
        let cfg = RunConfig::from_str("seed = 1\n", Path::new(".")).unwrap();
        assert_eq!(cfg.network.dimension_names(), vec!["A", "P", "M"]);
        assert_eq!(cfg.network.output_scale.arity(), 4);
        assert_eq!(cfg.indicator_names(), vec!["A", "P", "M"]);
        assert_eq!(cfg.alpha, 0.5);
        assert_eq!(cfg.learn.tau, 1e-3);
        let specs = cfg.resolve_indicators(None).unwrap();
        assert_eq!(specs[0].mfs()[0].center(), 40.0);
    }

    #[test]
    fn student_config_resolves_expert_entries() {
        let cfg = RunConfig::from_str(STUDENT_TOML, Path::new(".")).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.kb.weight(&[3, 2, 3]), Some(0.9));
        assert_eq!(cfg.kb.consequent(&[3, 2, 3]), Some(3));
        assert_eq!(cfg.learn.max_iters, 50);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_str("sede = 1\n", Path::new(".")).is_err());
        assert!(RunConfig::from_str("[rules]\nalhpa = 0.5\n", Path::new(".")).is_err());
    }

    #[test]
    fn unknown_labels_fail_resolution() {
        let text = r#"
[[expert]]
antecedent = ["e", "q", "e"]
weight = 0.5
"#;
        assert!(matches!(
            RunConfig::from_str(text, Path::new(".")),
            Err(Error::UnknownLabel { .. })
        ));
    }

    #[test]
    fn alpha_and_fraction_ranges_enforced() {
        assert!(RunConfig::from_str("[rules]\nalpha = 1.5\n", Path::new(".")).is_err());
        assert!(RunConfig::from_str("[split]\ntrain_fraction = 1.0\n", Path::new(".")).is_err());
    }

    #[test]
    fn percentile_indicators_defer_resolution() {
        let text = r#"
[[dimension]]
name = "A"
  [[dimension.indicator]]
  name = "score"
  percentiles = true

[[dimension]]
name = "P"
"#;
        let cfg = RunConfig::from_str(text, Path::new(".")).unwrap();
        assert!(cfg.resolve_indicators(None).is_err());
        let mut columns = HashMap::new();
        columns.insert("score".to_string(), (0..=100).map(f64::from).collect());
        let specs = cfg.resolve_indicators(Some(&columns)).unwrap();
        assert_eq!(specs[0].mfs().len(), 4);
    }

    #[test]
    fn custom_scales_need_explicit_centers() {
        let text = r#"
[output]
levels = ["lo", "mid", "hi"]

[[dimension]]
name = "A"
"#;
        // Default centers are four-level; a 3-level scale must configure
        // its own or use percentiles.
        assert!(RunConfig::from_str(text, Path::new(".")).is_err());

        let with_centers = r#"
[output]
levels = ["lo", "mid", "hi"]

[[dimension]]
name = "A"
  [[dimension.indicator]]
  name = "A"
  centers = [25.0, 50.0, 75.0]
  sigma = 12.0
"#;
        let cfg = RunConfig::from_str(with_centers, Path::new(".")).unwrap();
        assert_eq!(cfg.network.output_scale.arity(), 3);
    }

    #[test]
    fn benchmark_section_resolves_models_and_paths() {
        let text = r#"
[benchmark]
trials = 3
models = ["fbn", "nb"]

[[benchmark.dataset]]
name = "iris"
path = "testdata/iris.csv"
class_column = "species"
"#;
        let cfg = RunConfig::from_str(text, Path::new("/somewhere")).unwrap();
        let plan = cfg.benchmark.unwrap();
        assert_eq!(plan.trials, 3);
        assert_eq!(plan.models, vec![ModelKind::Fbn, ModelKind::NaiveBayes]);
        assert_eq!(
            plan.datasets[0].path,
            PathBuf::from("/somewhere/testdata/iris.csv")
        );
    }

    #[test]
    fn duplicate_indicator_names_rejected() {
        let text = r#"
[[dimension]]
name = "A"
  [[dimension.indicator]]
  name = "x"

[[dimension]]
name = "P"
  [[dimension.indicator]]
  name = "x"
"#;
        assert!(RunConfig::from_str(text, Path::new(".")).is_err());
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = RunConfig::from_str("seed = 1\n", Path::new(".")).unwrap();
        let b = RunConfig::from_str("seed = 1\n", Path::new(".")).unwrap();
        let c = RunConfig::from_str("seed = 2\n", Path::new(".")).unwrap();
        assert_eq!(a.config_hash, b.config_hash);
        assert_ne!(a.config_hash, c.config_hash);
    }
}
