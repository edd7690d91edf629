//! The assembled decision engine and its on-disk bundle: a directory of
//! human-diffable text serializations plus a manifest.
//!
//! Bundle layout:
//!   manifest.txt -- `key=value` lines, sorted by key
//!   network.toml -- dimensions, sub-indicator weights and fuzzifiers
//!   rules.tsv    -- rule base, one rule per line in enumeration order
//!   cpt.tsv      -- conditional probability table, tabular layout
//!   prior.tsv    -- output prior, labels then probabilities

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bnet::{infer_soft, Cpt, Dimension, NetworkStructure, Prior, TNorm};
use crate::error::{Error, Result};
use crate::fuzzify::{aggregate_dimension, GaussianMf, IndicatorSpec};
use crate::rulebase::{parse_rules, write_rules, FuzzyRule};
use crate::types::{FuzzyVector, GradeDistribution, LinguisticScale, ScaleRef, TieBreak, Weights};

pub const BUNDLE_FORMAT: &str = "fbnet-bundle/1";

const MANIFEST_FILE: &str = "manifest.txt";
const NETWORK_FILE: &str = "network.toml";
const RULES_FILE: &str = "rules.tsv";
const CPT_FILE: &str = "cpt.tsv";
const PRIOR_FILE: &str = "prior.tsv";

/// Sorted `key=value` run metadata persisted alongside the model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new() -> Self {
        Manifest::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.insert(key.into(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Bundle(format!("manifest line `{line}` has no `=`")))?;
            entries.insert(k.to_string(), v.to_string());
        }
        Ok(Manifest { entries })
    }
}

/// Fully assembled model: everything needed to grade a record of raw
/// scores.
#[derive(Debug, Clone)]
pub struct Engine {
    pub network: NetworkStructure,
    /// One spec per sub-indicator, dimension-major order.
    pub specs: Vec<IndicatorSpec>,
    pub rules: Vec<FuzzyRule>,
    pub cpt: Cpt,
    pub prior: Prior,
    pub tie_break: TieBreak,
    pub tnorm: TNorm,
}

impl Engine {
    pub fn new(
        network: NetworkStructure,
        specs: Vec<IndicatorSpec>,
        rules: Vec<FuzzyRule>,
        cpt: Cpt,
        prior: Prior,
        tie_break: TieBreak,
        tnorm: TNorm,
    ) -> Result<Self> {
        let expected: usize = network.dimensions.iter().map(|d| d.indicators.len()).sum();
        if specs.len() != expected {
            return Err(Error::BadNetwork(format!(
                "{} indicator specs for {} sub-indicators",
                specs.len(),
                expected
            )));
        }
        if cpt.parent_scales().len() != network.dimensions.len()
            || cpt.child_scale() != &network.output_scale
        {
            return Err(Error::BadNetwork(
                "table shape does not match the network".into(),
            ));
        }
        Ok(Engine {
            network,
            specs,
            rules,
            cpt,
            prior,
            tie_break,
            tnorm,
        })
    }

    /// Sub-indicator column names in the order `infer_values` expects.
    pub fn input_columns(&self) -> Vec<String> {
        self.specs.iter().map(|s| s.name().to_string()).collect()
    }

    /// Fuzzifies one record of raw scores (dimension-major order) into one
    /// aggregated membership vector per dimension.
    pub fn fuzzify_dimensions(&self, values: &[f64]) -> Result<Vec<FuzzyVector>> {
        if values.len() != self.specs.len() {
            return Err(Error::LengthMismatch(values.len(), self.specs.len()));
        }
        let mut out = Vec::with_capacity(self.network.dimensions.len());
        let mut offset = 0;
        for dim in &self.network.dimensions {
            let n = dim.indicators.len();
            let children = self.specs[offset..offset + n]
                .iter()
                .zip(&values[offset..offset + n])
                .map(|(spec, &x)| spec.fuzzify(x))
                .collect::<Result<Vec<_>>>()?;
            out.push(aggregate_dimension(&children, &dim.weights)?);
            offset += n;
        }
        Ok(out)
    }

    /// Grade posterior for one record of raw scores.
    pub fn infer_values(&self, values: &[f64]) -> Result<GradeDistribution> {
        let evidence = self.fuzzify_dimensions(values)?;
        infer_soft(&self.cpt, &self.prior, &evidence, self.tnorm)
    }

    /// Posterior plus the predicted grade index under the engine's tie
    /// rule.
    pub fn predict(&self, values: &[f64]) -> Result<(GradeDistribution, usize)> {
        let dist = self.infer_values(values)?;
        let grade = dist.argmax_with(self.tie_break);
        Ok((dist, grade))
    }

    /// Writes the bundle directory, creating it if needed.
    pub fn save(&self, dir: &Path, manifest: &Manifest) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let mut manifest = manifest.clone();
        manifest.set("format", BUNDLE_FORMAT);
        manifest.set("tie_break", tie_break_str(self.tie_break));
        manifest.set("tnorm", tnorm_str(self.tnorm));

        write_file(dir, MANIFEST_FILE, &manifest.to_text())?;
        write_file(dir, NETWORK_FILE, &network_to_toml(self)?)?;
        write_file(
            dir,
            RULES_FILE,
            &write_rules(
                &self.rules,
                &self.network.dimension_scales(),
                &self.network.output_scale,
            ),
        )?;
        write_file(
            dir,
            CPT_FILE,
            &self
                .cpt
                .to_text(&self.network.dimension_names(), &self.network.output_name),
        )?;
        write_file(dir, PRIOR_FILE, &prior_to_text(&self.prior))?;
        Ok(())
    }

    /// Reads a bundle directory back into an engine plus its manifest.
    pub fn load(dir: &Path) -> Result<(Engine, Manifest)> {
        let manifest = Manifest::parse(&read_file(dir, MANIFEST_FILE)?)?;
        match manifest.get("format") {
            Some(BUNDLE_FORMAT) => {}
            Some(other) => {
                return Err(Error::Bundle(format!(
                    "bundle format `{other}` not supported (expected {BUNDLE_FORMAT})"
                )))
            }
            None => return Err(Error::Bundle("manifest is missing `format`".into())),
        }
        let tie_break = match manifest.get("tie_break") {
            Some("lower") => TieBreak::Lower,
            _ => TieBreak::Higher,
        };
        let tnorm = match manifest.get("tnorm") {
            Some("product") => TNorm::Product,
            _ => TNorm::Min,
        };

        let (network, specs) = network_from_toml(&read_file(dir, NETWORK_FILE)?)?;
        let rules = parse_rules(
            &read_file(dir, RULES_FILE)?,
            &network.dimension_scales(),
            &network.output_scale,
        )?;
        let (cpt, repairs) = Cpt::parse_text(
            &read_file(dir, CPT_FILE)?,
            network.dimension_scales(),
            network.output_scale.clone(),
        )?;
        if !repairs.is_empty() {
            return Err(Error::Bundle(format!(
                "{} table rows in a saved bundle do not sum to 1",
                repairs.len()
            )));
        }
        let prior = prior_from_text(&read_file(dir, PRIOR_FILE)?, &network.output_scale)?;
        let engine = Engine::new(network, specs, rules, cpt, prior, tie_break, tnorm)?;
        Ok((engine, manifest))
    }
}

fn write_file(dir: &Path, file: &str, content: &str) -> Result<()> {
    let path = dir.join(file);
    std::fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

fn read_file(dir: &Path, file: &str) -> Result<String> {
    let path = dir.join(file);
    std::fs::read_to_string(&path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn tie_break_str(t: TieBreak) -> &'static str {
    match t {
        TieBreak::Higher => "higher",
        TieBreak::Lower => "lower",
    }
}

fn tnorm_str(t: TNorm) -> &'static str {
    match t {
        TNorm::Min => "min",
        TNorm::Product => "product",
    }
}

// --- network.toml -----------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct NetworkDoc {
    output_name: String,
    output_levels: Vec<String>,
    dimension: Vec<DimensionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DimensionDoc {
    name: String,
    levels: Vec<String>,
    indicator: Vec<IndicatorDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct IndicatorDoc {
    name: String,
    weight: f64,
    centers: Vec<f64>,
    sigmas: Vec<f64>,
    domain: [f64; 2],
}

fn network_to_toml(engine: &Engine) -> Result<String> {
    let mut offset = 0;
    let dimension = engine
        .network
        .dimensions
        .iter()
        .map(|dim| {
            let n = dim.indicators.len();
            let indicator = engine.specs[offset..offset + n]
                .iter()
                .zip(dim.weights.values())
                .map(|(spec, &weight)| IndicatorDoc {
                    name: spec.name().to_string(),
                    weight,
                    centers: spec.mfs().iter().map(GaussianMf::center).collect(),
                    sigmas: spec.mfs().iter().map(GaussianMf::sigma).collect(),
                    domain: [spec.domain().0, spec.domain().1],
                })
                .collect();
            offset += n;
            DimensionDoc {
                name: dim.name.clone(),
                levels: dim.scale.labels().to_vec(),
                indicator,
            }
        })
        .collect();
    let doc = NetworkDoc {
        output_name: engine.network.output_name.clone(),
        output_levels: engine.network.output_scale.labels().to_vec(),
        dimension,
    };
    toml::to_string(&doc).map_err(|e| Error::Bundle(format!("network serialization: {e}")))
}

fn network_from_toml(text: &str) -> Result<(NetworkStructure, Vec<IndicatorSpec>)> {
    let doc: NetworkDoc =
        toml::from_str(text).map_err(|e| Error::Bundle(format!("network.toml: {e}")))?;
    let output_scale = LinguisticScale::new(doc.output_levels)?;
    let mut dimensions = Vec::with_capacity(doc.dimension.len());
    let mut specs = Vec::new();
    for dim in doc.dimension {
        let scale = LinguisticScale::new(dim.levels)?;
        let mut names = Vec::with_capacity(dim.indicator.len());
        let mut weights = Vec::with_capacity(dim.indicator.len());
        for ind in dim.indicator {
            let mfs = ind
                .centers
                .iter()
                .zip(&ind.sigmas)
                .map(|(&c, &s)| GaussianMf::new(c, s))
                .collect::<Result<Vec<_>>>()?;
            specs.push(IndicatorSpec::new(
                ind.name.clone(),
                scale.clone(),
                mfs,
                (ind.domain[0], ind.domain[1]),
            )?);
            names.push(ind.name);
            weights.push(ind.weight);
        }
        dimensions.push(Dimension::new(
            dim.name,
            scale,
            names,
            Weights::new(weights)?,
        )?);
    }
    let network = NetworkStructure::new(dimensions, doc.output_name, output_scale)?;
    Ok((network, specs))
}

// --- prior.tsv ---------------------------------------------------------------

fn prior_to_text(prior: &Prior) -> String {
    let labels = prior.scale().labels().join("\t");
    let probs: Vec<String> = prior.probs().iter().map(|p| format!("{p}")).collect();
    format!("{labels}\n{}\n", probs.join("\t"))
}

fn prior_from_text(text: &str, scale: &ScaleRef) -> Result<Prior> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Bundle("prior.tsv is empty".into()))?;
    let labels: Vec<&str> = header.split('\t').collect();
    let expected: Vec<&str> = scale.labels().iter().map(String::as_str).collect();
    if labels != expected {
        return Err(Error::Bundle(format!(
            "prior labels {labels:?} do not match the output scale {expected:?}"
        )));
    }
    let row = lines
        .next()
        .ok_or_else(|| Error::Bundle("prior.tsv has no probability line".into()))?;
    let probs = row
        .split('\t')
        .map(|f| {
            f.parse::<f64>()
                .map_err(|_| Error::Bundle(format!("prior.tsv: bad number `{f}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    GradeDistribution::new(scale.clone(), probs)
}
