//! Repeated-trial benchmark runner: dataset x model mean error rates with
//! per-dataset ranks, rendered as aligned text and as a delimited table.

use crate::error::{Error, Result};
use crate::eval::dataset::{split, Dataset, ImputeStrategy, Imputer, SplitSpec};
use crate::eval::metrics::compute_metrics;
use crate::eval::models::{FbnPipelineConfig, ModelKind};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub trials: usize,
    pub seed: u64,
    pub train_fraction: f64,
    pub stratified: bool,
    pub impute: ImputeStrategy,
    pub pipeline: FbnPipelineConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            trials: 10,
            seed: 0,
            train_fraction: 0.8,
            stratified: true,
            impute: ImputeStrategy::MeanMode,
            pipeline: FbnPipelineConfig::default(),
        }
    }
}

/// One model's aggregate over the trials of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelResult {
    pub model: String,
    pub trial_ceps: Vec<f64>,
    pub mean_cep: f64,
    /// 1 = lowest mean error on this dataset; ties break by registration
    /// order.
    pub rank: usize,
}

/// One dataset row: results for every model, or the failure that stopped
/// the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetOutcome {
    pub dataset: String,
    pub result: std::result::Result<Vec<ModelResult>, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    pub outcomes: Vec<DatasetOutcome>,
    pub model_names: Vec<String>,
    pub trials: usize,
}

impl BenchmarkTable {
    pub fn all_failed(&self) -> bool {
        self.outcomes.iter().all(|o| o.result.is_err())
    }

    pub fn any_failed(&self) -> bool {
        self.outcomes.iter().any(|o| o.result.is_err())
    }

    /// Aligned plain-text table: one dataset row of mean error
    /// probabilities followed by its rank row.
    pub fn to_aligned_text(&self) -> String {
        let mut headers = vec!["dataset".to_string()];
        headers.extend(self.model_names.iter().cloned());
        let mut rows: Vec<Vec<String>> = vec![headers];
        for outcome in &self.outcomes {
            match &outcome.result {
                Ok(results) => {
                    let mut value_row = vec![outcome.dataset.clone()];
                    let mut rank_row = vec!["  rank".to_string()];
                    for r in results {
                        value_row.push(format!("{:.4}", r.mean_cep));
                        rank_row.push(r.rank.to_string());
                    }
                    rows.push(value_row);
                    rows.push(rank_row);
                }
                Err(e) => {
                    let mut row = vec![outcome.dataset.clone()];
                    row.push(format!("FAILED: {e}"));
                    rows.push(row);
                }
            }
        }
        let n_cols = rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut widths = vec![0usize; n_cols];
        for row in &rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let mut out = String::new();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, cell)| format!("{:width$}", cell, width = widths[i]))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    /// Machine-readable tab-separated rendering: one line per
    /// (dataset, model) cell.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("dataset\tmodel\tmean_cep\trank\ttrials\n");
        for outcome in &self.outcomes {
            match &outcome.result {
                Ok(results) => {
                    for r in results {
                        out.push_str(&format!(
                            "{}\t{}\t{}\t{}\t{}\n",
                            outcome.dataset, r.model, r.mean_cep, r.rank, self.trials
                        ));
                    }
                }
                Err(e) => {
                    out.push_str(&format!(
                        "{}\tFAILED\t\t\t{}\n",
                        outcome.dataset,
                        e.replace(['\t', '\n'], " ")
                    ));
                }
            }
        }
        out
    }
}

fn run_dataset(
    ds: &Dataset,
    models: &[ModelKind],
    cfg: &BenchmarkConfig,
) -> Result<Vec<ModelResult>> {
    let mut ceps: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.trials); models.len()];
    for trial in 0..cfg.trials {
        let seed = cfg.seed.wrapping_add(trial as u64);
        let spec = SplitSpec::new(cfg.train_fraction, seed, cfg.stratified)?;
        let (train_raw, test_raw) = split(ds, &spec)?;
        // Fill statistics come from the training split only.
        let imputer = Imputer::fit(&train_raw, cfg.impute)?;
        let train = imputer.transform(&train_raw)?;
        let test = imputer.transform(&test_raw)?;
        if train.is_empty() || test.is_empty() {
            return Err(Error::EmptyDataset(format!(
                "{} after split/impute (trial {trial})",
                ds.name
            )));
        }
        for (m, kind) in models.iter().enumerate() {
            let mut model = kind.build(&cfg.pipeline);
            model.fit(&train, seed)?;
            let preds = model.predict(&test)?;
            let truths: Vec<usize> = test.records.iter().map(|r| r.class).collect();
            let report = compute_metrics(&preds, &truths, &test.class_scale)?;
            ceps[m].push(report.cep);
        }
    }

    let means: Vec<f64> = ceps
        .iter()
        .map(|t| t.iter().sum::<f64>() / t.len() as f64)
        .collect();
    // Rank 1 = lowest mean error; stable sort keeps registration order on
    // ties.
    let mut order: Vec<usize> = (0..models.len()).collect();
    order.sort_by(|&a, &b| means[a].partial_cmp(&means[b]).unwrap().then(a.cmp(&b)));
    let mut ranks = vec![0usize; models.len()];
    for (pos, &m) in order.iter().enumerate() {
        ranks[m] = pos + 1;
    }

    Ok(models
        .iter()
        .enumerate()
        .map(|(m, kind)| ModelResult {
            model: kind.name().to_string(),
            trial_ceps: ceps[m].clone(),
            mean_cep: means[m],
            rank: ranks[m],
        })
        .collect())
}

/// Runs every registered model on every dataset for `cfg.trials` seeded
/// trials. A dataset that fails is reported in its row; the others still
/// complete.
pub fn run_benchmark(
    datasets: &[std::result::Result<Dataset, (String, String)>],
    models: &[ModelKind],
    cfg: &BenchmarkConfig,
) -> Result<BenchmarkTable> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if models.is_empty() {
        return Err(Error::InvalidArgument("no models registered".into()));
    }
    let mut outcomes = Vec::with_capacity(datasets.len());
    for entry in datasets {
        match entry {
            Ok(ds) => {
                let result = run_dataset(ds, models, cfg).map_err(|e| e.to_string());
                outcomes.push(DatasetOutcome {
                    dataset: ds.name.clone(),
                    result,
                });
            }
            Err((name, reason)) => outcomes.push(DatasetOutcome {
                dataset: name.clone(),
                result: Err(reason.clone()),
            }),
        }
    }
    Ok(BenchmarkTable {
        outcomes,
        model_names: models.iter().map(|m| m.name().to_string()).collect(),
        trials: cfg.trials,
    })
}
