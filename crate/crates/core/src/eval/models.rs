//! Classifiers wired into the benchmark harness: the fuzzy-Bayesian
//! pipeline itself plus the weighted-scoring and naive-Bayes baselines.

use crate::bnet::{infer_soft, Cpt, Prior, TNorm};
use crate::error::{Error, Result};
use crate::eval::dataset::Dataset;
use crate::fuzzify::{aggregate_dimension, IndicatorSpec};
use crate::learn::{CptLearner, LearnConfig, TrainRecord};
use crate::types::{FuzzyVector, GradeDistribution, Weights};

/// A classifier that fits on a training split and labels a test split.
pub trait Model {
    fn name(&self) -> &str;
    fn fit(&mut self, train: &Dataset, seed: u64) -> Result<()>;
    fn predict(&self, ds: &Dataset) -> Result<Vec<usize>>;
}

/// Registry entry for the benchmark runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Fbn,
    NaiveBayes,
    WeightedScoring,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Fbn => "fbn",
            ModelKind::NaiveBayes => "nb",
            ModelKind::WeightedScoring => "weighted",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fbn" => Ok(ModelKind::Fbn),
            "nb" => Ok(ModelKind::NaiveBayes),
            "weighted" => Ok(ModelKind::WeightedScoring),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }

    pub fn build(&self, pipeline: &FbnPipelineConfig) -> Box<dyn Model> {
        match self {
            ModelKind::Fbn => Box::new(FbnModel::new(pipeline.clone())),
            ModelKind::NaiveBayes => Box::new(NaiveBayesModel::new(1.0)),
            ModelKind::WeightedScoring => Box::new(WeightedScoringModel::new(None)),
        }
    }
}

fn feature_value(ds: &Dataset, row: usize, col: usize) -> Result<f64> {
    ds.records[row].values[col].value().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "record {row} column `{}` is missing; impute before modeling",
            ds.features[col].name
        ))
    })
}

/// Per-feature fuzzifiers fitted from the training columns, all over the
/// class scale.
fn fit_feature_specs(train: &Dataset) -> Result<Vec<IndicatorSpec>> {
    train
        .features
        .iter()
        .enumerate()
        .map(|(col, spec)| {
            let observed = train.column_values(col);
            IndicatorSpec::from_samples(spec.name.clone(), train.class_scale.clone(), &observed)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Fuzzy-Bayesian pipeline
// ---------------------------------------------------------------------------

/// Knobs for the end-to-end pipeline when applied to an arbitrary dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FbnPipelineConfig {
    /// Hard upper bound on the table size; features group into as many
    /// dimensions as fit under it.
    pub max_tuples: usize,
    /// Rows the table may have per training record; keeps the tuple space
    /// dense enough for the counts to mean something on small datasets.
    pub min_samples_per_tuple: usize,
    pub learn: LearnConfig,
    pub tnorm: TNorm,
}

impl Default for FbnPipelineConfig {
    fn default() -> Self {
        FbnPipelineConfig {
            max_tuples: 4096,
            min_samples_per_tuple: 10,
            learn: LearnConfig::default(),
            tnorm: TNorm::Min,
        }
    }
}

impl FbnPipelineConfig {
    /// Tuple budget for a training set of `n_train` records: the hard cap
    /// shrunk to `n_train / min_samples_per_tuple`, but never below one
    /// dimension's worth of levels.
    fn tuple_budget(&self, arity: usize, n_train: usize) -> usize {
        let density_cap = n_train
            .checked_div(self.min_samples_per_tuple)
            .unwrap_or(self.max_tuples);
        self.max_tuples.min(density_cap).max(arity)
    }
}

/// Splits `n_features` columns into contiguous near-equal groups, one per
/// dimension, using the largest dimension count whose tuple space fits
/// under `max_tuples`.
pub fn group_features(n_features: usize, arity: usize, max_tuples: usize) -> Vec<Vec<usize>> {
    let mut dims = 1usize;
    let mut tuples = arity;
    while dims < n_features && tuples.saturating_mul(arity) <= max_tuples {
        dims += 1;
        tuples = tuples.saturating_mul(arity);
    }
    let base = n_features / dims;
    let extras = n_features % dims;
    let mut groups = Vec::with_capacity(dims);
    let mut next = 0;
    for d in 0..dims {
        let size = base + usize::from(d < extras);
        groups.push((next..next + size).collect());
        next += size;
    }
    groups
}

struct FbnState {
    feature_specs: Vec<IndicatorSpec>,
    groups: Vec<Vec<usize>>,
    group_weights: Vec<Weights>,
    cpt: Cpt,
    prior: Prior,
}

/// The artifact's own classifier: fuzzify each feature, aggregate feature
/// groups into dimension-level vectors, and infer the grade posterior
/// through the learned table under soft evidence.
pub struct FbnModel {
    cfg: FbnPipelineConfig,
    state: Option<FbnState>,
}

impl FbnModel {
    pub fn new(cfg: FbnPipelineConfig) -> Self {
        FbnModel { cfg, state: None }
    }

    fn dimension_evidence(
        &self,
        state: &FbnState,
        ds: &Dataset,
        row: usize,
    ) -> Result<Vec<FuzzyVector>> {
        state
            .groups
            .iter()
            .zip(&state.group_weights)
            .map(|(group, weights)| {
                let children = group
                    .iter()
                    .map(|&col| state.feature_specs[col].fuzzify(feature_value(ds, row, col)?))
                    .collect::<Result<Vec<_>>>()?;
                aggregate_dimension(&children, weights)
            })
            .collect()
    }

    /// Grade posterior for one record of an already-fitted model.
    pub fn posterior(&self, ds: &Dataset, row: usize) -> Result<GradeDistribution> {
        let state = self
            .state
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("model not fitted".into()))?;
        let evidence = self.dimension_evidence(state, ds, row)?;
        infer_soft(&state.cpt, &state.prior, &evidence, self.cfg.tnorm)
    }
}

impl Model for FbnModel {
    fn name(&self) -> &str {
        "fbn"
    }

    fn fit(&mut self, train: &Dataset, _seed: u64) -> Result<()> {
        if train.is_empty() {
            return Err(Error::EmptyDataset(train.name.clone()));
        }
        let scale = train.class_scale.clone();
        let feature_specs = fit_feature_specs(train)?;
        let budget = self.cfg.tuple_budget(scale.arity(), train.len());
        let groups = group_features(train.n_features(), scale.arity(), budget);
        let group_weights = groups
            .iter()
            .map(|g| Weights::uniform(g.len()))
            .collect::<Result<Vec<_>>>()?;

        let state_probe = FbnState {
            feature_specs,
            groups,
            group_weights,
            cpt: Cpt::uniform(vec![scale.clone()], scale.clone()),
            prior: GradeDistribution::uniform(scale.clone()),
        };

        // Discretize: per-dimension argmax levels plus the true grade.
        let batch: Vec<TrainRecord> = (0..train.len())
            .map(|row| {
                let evidence = self.dimension_evidence(&state_probe, train, row)?;
                Ok(TrainRecord {
                    levels: evidence.iter().map(FuzzyVector::argmax).collect(),
                    grade: train.records[row].class,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let parent_scales = vec![scale.clone(); state_probe.groups.len()];
        let mut learner = CptLearner::new(parent_scales, scale.clone(), self.cfg.learn)?;
        learner.fit_until_converged(std::iter::repeat_n(batch, self.cfg.learn.max_iters))?;

        // Prior from the training grade frequencies, add-one smoothed so no
        // grade is annihilated outright.
        let counts = train.class_counts();
        let denom = (train.len() + scale.arity()) as f64;
        let probs: Vec<f64> = counts.iter().map(|&c| (c as f64 + 1.0) / denom).collect();
        let prior = GradeDistribution::new(scale, probs)?;

        self.state = Some(FbnState {
            cpt: learner.into_cpt(),
            prior,
            ..state_probe
        });
        Ok(())
    }

    fn predict(&self, ds: &Dataset) -> Result<Vec<usize>> {
        (0..ds.len())
            .map(|row| Ok(self.posterior(ds, row)?.argmax()))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Naive-Bayes baseline
// ---------------------------------------------------------------------------

struct NbState {
    feature_specs: Vec<IndicatorSpec>,
    /// counts[feature][level][class]
    counts: Vec<Vec<Vec<u64>>>,
    class_counts: Vec<u64>,
}

/// Categorical naive Bayes over features discretized by the same
/// fuzzify-then-argmax pipeline, with Laplace smoothing.
pub struct NaiveBayesModel {
    smoothing: f64,
    state: Option<NbState>,
}

impl NaiveBayesModel {
    pub fn new(smoothing: f64) -> Self {
        NaiveBayesModel {
            smoothing,
            state: None,
        }
    }
}

impl Model for NaiveBayesModel {
    fn name(&self) -> &str {
        "nb"
    }

    fn fit(&mut self, train: &Dataset, _seed: u64) -> Result<()> {
        if train.is_empty() {
            return Err(Error::EmptyDataset(train.name.clone()));
        }
        let arity = train.class_scale.arity();
        let feature_specs = fit_feature_specs(train)?;
        let mut counts = vec![vec![vec![0u64; arity]; arity]; train.n_features()];
        let mut class_counts = vec![0u64; arity];
        for row in 0..train.len() {
            let class = train.records[row].class;
            class_counts[class] += 1;
            for (col, spec) in feature_specs.iter().enumerate() {
                let level = spec.fuzzify(feature_value(train, row, col)?)?.argmax();
                counts[col][level][class] += 1;
            }
        }
        self.state = Some(NbState {
            feature_specs,
            counts,
            class_counts,
        });
        Ok(())
    }

    fn predict(&self, ds: &Dataset) -> Result<Vec<usize>> {
        let state = self
            .state
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("model not fitted".into()))?;
        let arity = ds.class_scale.arity();
        let n: u64 = state.class_counts.iter().sum();
        let sm = self.smoothing;
        let mut out = Vec::with_capacity(ds.len());
        for row in 0..ds.len() {
            let levels = state
                .feature_specs
                .iter()
                .enumerate()
                .map(|(col, spec)| Ok(spec.fuzzify(feature_value(ds, row, col)?)?.argmax()))
                .collect::<Result<Vec<usize>>>()?;
            let mut best = 0usize;
            let mut best_logp = f64::NEG_INFINITY;
            for c in 0..arity {
                let mut logp =
                    ((state.class_counts[c] as f64 + sm) / (n as f64 + sm * arity as f64)).ln();
                for (col, &level) in levels.iter().enumerate() {
                    let num = state.counts[col][level][c] as f64 + sm;
                    let den = state.class_counts[c] as f64 + sm * arity as f64;
                    logp += (num / den).ln();
                }
                if logp >= best_logp {
                    best_logp = logp;
                    best = c;
                }
            }
            out.push(best);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Weighted-scoring baseline
// ---------------------------------------------------------------------------

struct WsState {
    mins: Vec<f64>,
    ranges: Vec<f64>,
    weights: Vec<f64>,
    thresholds: Vec<f64>,
    degenerate: bool,
}

/// Traditional weighted scoring: min-max normalize features, take the
/// weighted sum, and bin by equal quantiles of the training scores.
pub struct WeightedScoringModel {
    weights: Option<Vec<f64>>,
    state: Option<WsState>,
}

impl WeightedScoringModel {
    /// `weights` defaults to uniform over features when `None`.
    pub fn new(weights: Option<Vec<f64>>) -> Self {
        WeightedScoringModel {
            weights,
            state: None,
        }
    }

    /// True when every training score collapsed to one bin.
    pub fn degenerate(&self) -> bool {
        self.state.as_ref().map(|s| s.degenerate).unwrap_or(false)
    }

    fn score(&self, state: &WsState, ds: &Dataset, row: usize) -> Result<f64> {
        let mut total = 0.0;
        for col in 0..ds.n_features() {
            let v = feature_value(ds, row, col)?;
            let norm = if state.ranges[col] == 0.0 {
                0.5
            } else {
                (v - state.mins[col]) / state.ranges[col]
            };
            total += state.weights[col] * norm;
        }
        Ok(total)
    }
}

impl Model for WeightedScoringModel {
    fn name(&self) -> &str {
        "weighted"
    }

    fn fit(&mut self, train: &Dataset, _seed: u64) -> Result<()> {
        if train.is_empty() {
            return Err(Error::EmptyDataset(train.name.clone()));
        }
        let n_features = train.n_features();
        let weights = match &self.weights {
            Some(w) => {
                if w.len() != n_features {
                    return Err(Error::LengthMismatch(w.len(), n_features));
                }
                Weights::new(w.clone())?.values().to_vec()
            }
            None => Weights::uniform(n_features)?.values().to_vec(),
        };
        let mut mins = Vec::with_capacity(n_features);
        let mut ranges = Vec::with_capacity(n_features);
        for col in 0..n_features {
            let observed = train.column_values(col);
            if observed.is_empty() {
                return Err(Error::UnimputableColumn(train.features[col].name.clone()));
            }
            let lo = observed.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = observed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            mins.push(lo);
            ranges.push(hi - lo);
        }
        let mut state = WsState {
            mins,
            ranges,
            weights,
            thresholds: Vec::new(),
            degenerate: false,
        };
        let mut scores: Vec<f64> = (0..train.len())
            .map(|row| self.score(&state, train, row))
            .collect::<Result<Vec<_>>>()?;
        scores.sort_by(|a, b| a.partial_cmp(b).unwrap());

        // Equal-quantile grade thresholds so each bin holds an equal share
        // of the training scores.
        let arity = train.class_scale.arity();
        let thresholds: Vec<f64> = (1..arity)
            .map(|i| quantile(&scores, i as f64 / arity as f64))
            .collect();
        state.degenerate =
            thresholds.windows(2).all(|w| w[0] == w[1]) && scores.first() == scores.last();
        state.thresholds = thresholds;
        self.state = Some(state);
        Ok(())
    }

    fn predict(&self, ds: &Dataset) -> Result<Vec<usize>> {
        let state = self
            .state
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("model not fitted".into()))?;
        (0..ds.len())
            .map(|row| {
                let s = self.score(state, ds, row)?;
                Ok(state.thresholds.iter().filter(|&&t| s >= t).count())
            })
            .collect()
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = rank - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::dataset::{Cell, FeatureKind, FeatureSpec, Record};
    use crate::eval::metrics::compute_metrics;
    use crate::types::LinguisticScale;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dataset(
        name: &str,
        features: usize,
        rows: Vec<(Vec<f64>, usize)>,
        classes: &[&str],
    ) -> Dataset {
        Dataset {
            name: name.into(),
            features: (0..features)
                .map(|i| FeatureSpec {
                    name: format!("f{i}"),
                    kind: FeatureKind::Numeric,
                    categories: vec![],
                })
                .collect(),
            class_scale: LinguisticScale::new(classes.iter().copied()).unwrap(),
            records: rows
                .into_iter()
                .map(|(values, class)| Record {
                    values: values.into_iter().map(Cell::Num).collect(),
                    class,
                })
                .collect(),
        }
    }

    /// Three well-separated clusters on a single feature.
    fn separable(n_per_class: usize) -> Dataset {
        let mut rows = Vec::new();
        for c in 0..3usize {
            for i in 0..n_per_class {
                rows.push((vec![c as f64 * 100.0 + i as f64], c));
            }
        }
        dataset("separable", 1, rows, &["lo", "mid", "hi"])
    }

    fn random_noise(n: usize, features: usize, classes: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<(Vec<f64>, usize)> = (0..n)
            .map(|_| {
                let values: Vec<f64> = (0..features).map(|_| rng.random::<f64>()).collect();
                (values, rng.random_range(0..classes))
            })
            .collect();
        let labels: Vec<String> = (0..classes).map(|c| format!("c{c}")).collect();
        Dataset {
            name: "noise".into(),
            features: (0..features)
                .map(|i| FeatureSpec {
                    name: format!("f{i}"),
                    kind: FeatureKind::Numeric,
                    categories: vec![],
                })
                .collect(),
            class_scale: LinguisticScale::new(labels).unwrap(),
            records: rows
                .into_iter()
                .map(|(values, class)| Record {
                    values: values.into_iter().map(Cell::Num).collect(),
                    class,
                })
                .collect(),
        }
    }

    fn accuracy(model: &mut dyn Model, train: &Dataset, test: &Dataset) -> f64 {
        model.fit(train, 0).unwrap();
        let preds = model.predict(test).unwrap();
        let truths: Vec<usize> = test.records.iter().map(|r| r.class).collect();
        compute_metrics(&preds, &truths, &test.class_scale)
            .unwrap()
            .accuracy
    }

    #[test]
    fn grouping_respects_tuple_budget() {
        // 4 classes: 4^6 = 4096 fits, 4^7 does not.
        let groups = group_features(10, 4, 4096);
        assert_eq!(groups.len(), 6);
        let all: Vec<usize> = groups.iter().flatten().copied().collect();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        // Fewer features than the budget allows: one dimension each.
        assert_eq!(group_features(3, 4, 4096).len(), 3);
        // Degenerate budget still yields one dimension.
        assert_eq!(group_features(5, 10, 3).len(), 1);
    }

    #[test]
    fn weighted_scoring_recovers_separable_labels() {
        let ds = separable(20);
        let mut model = WeightedScoringModel::new(Some(vec![1.0]));
        let acc = accuracy(&mut model, &ds, &ds);
        assert_eq!(acc, 1.0);
        assert!(!model.degenerate());
    }

    #[test]
    fn weighted_scoring_flags_constant_scores() {
        let rows = (0..12).map(|i| (vec![5.0], i % 3)).collect();
        let ds = dataset("flat", 1, rows, &["a", "b", "c"]);
        let mut model = WeightedScoringModel::new(None);
        model.fit(&ds, 0).unwrap();
        assert!(model.degenerate());
        let preds = model.predict(&ds).unwrap();
        assert!(preds.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn weighted_scoring_is_chance_level_on_noise() {
        let train = random_noise(1500, 3, 4, 5);
        let test = random_noise(1500, 3, 4, 6);
        let mut model = WeightedScoringModel::new(None);
        let acc = accuracy(&mut model, &train, &test);
        assert!((acc - 0.25).abs() < 0.07, "accuracy {acc} not near chance");
    }

    #[test]
    fn naive_bayes_nails_level_equals_class() {
        let ds = separable(25);
        let mut model = NaiveBayesModel::new(1.0);
        let acc = accuracy(&mut model, &ds, &ds);
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn naive_bayes_is_chance_level_on_uninformative_features() {
        let train = random_noise(1500, 2, 2, 9);
        let test = random_noise(1500, 2, 2, 10);
        let mut model = NaiveBayesModel::new(1.0);
        let acc = accuracy(&mut model, &train, &test);
        assert!((acc - 0.5).abs() < 0.06, "accuracy {acc} not near chance");
    }

    #[test]
    fn fbn_fits_and_beats_chance_on_separable_data() {
        let ds = separable(25);
        let mut model = FbnModel::new(FbnPipelineConfig::default());
        let acc = accuracy(&mut model, &ds, &ds);
        assert!(acc > 0.95, "accuracy {acc}");
    }

    #[test]
    fn fbn_posterior_is_a_valid_distribution() {
        let ds = separable(10);
        let mut model = FbnModel::new(FbnPipelineConfig::default());
        model.fit(&ds, 0).unwrap();
        let post = model.posterior(&ds, 0).unwrap();
        let sum: f64 = post.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn models_error_on_missing_values() {
        let mut ds = separable(10);
        ds.records[0].values[0] = Cell::Missing;
        let mut model = NaiveBayesModel::new(1.0);
        assert!(model.fit(&ds, 0).is_err());
    }

    #[test]
    fn predict_before_fit_errors() {
        let ds = separable(5);
        let model = FbnModel::new(FbnPipelineConfig::default());
        assert!(model.predict(&ds).is_err());
    }
}
