//! End-to-end experiment harness: dataset loading and preparation,
//! baseline models, metric computation, and the repeated-trial benchmark
//! runner.

pub mod benchmark;
pub mod dataset;
pub mod metrics;
pub mod models;
pub mod synth;

pub use benchmark::{run_benchmark, BenchmarkConfig, BenchmarkTable, DatasetOutcome, ModelResult};
pub use dataset::{
    impute, load_dataset, split, Cell, Dataset, DatasetSchema, FeatureKind, FeatureSpec,
    ImputeStrategy, Imputer, Record, SplitSpec,
};
pub use metrics::{compute_metrics, Averaging, ClassMetrics, EvalReport};
pub use models::{
    group_features, FbnModel, FbnPipelineConfig, Model, ModelKind, NaiveBayesModel,
    WeightedScoringModel,
};
