//! Command-line front end: fuzzify, train, infer, and benchmark
//! subcommands bound to the declarative run configuration.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 data error, 3 benchmark
//! failure (every dataset failed).

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::bnet::{Cpt, RowRepair};
use crate::config::{PriorPlan, RunConfig};
use crate::error::{Error, Result};
use crate::eval::{
    load_dataset, run_benchmark, BenchmarkConfig, BenchmarkTable, Dataset, FbnPipelineConfig,
};
use crate::learn::{CptLearner, FitLog, TrainRecord};
use crate::model::{Engine, Manifest};
use crate::rulebase::{build_rulebase, empirical_frequencies};
use crate::types::{FuzzyVector, GradeDistribution};

#[derive(Parser)]
#[command(
    name = "fbnet",
    version,
    about = "Fuzzy-Bayesian decision engine: grade multi-attribute records on ordinal scales"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuzzify raw indicator scores into per-dimension membership vectors
    Fuzzify(FuzzifyArgs),
    /// Fit the rule base and probability table from labeled records
    Train(TrainArgs),
    /// Grade records with a trained model bundle
    Infer(InferArgs),
    /// Run the repeated-trial benchmark over the configured datasets
    Benchmark(BenchmarkArgs),
}

#[derive(Args)]
struct FuzzifyArgs {
    /// Run configuration file
    #[arg(long)]
    config: PathBuf,
    /// Input scores file (delimited, header row)
    #[arg(long)]
    input: PathBuf,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
    /// Labeled training records (delimited, header row)
    #[arg(long)]
    input: PathBuf,
    /// Bundle directory to write
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct InferArgs {
    /// Trained model bundle directory
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accepted for interface symmetry; the bundle carries its settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory for the table, delimited table, and run manifest
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

/// Errors tagged with the exit code they map to.
#[derive(Debug)]
pub enum CliError {
    Config(Error),
    Data(Error),
    AllBenchmarksFailed,
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::AllBenchmarksFailed => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(e) => format!("config error: {e}"),
            CliError::Data(e) => format!("data error: {e}"),
            CliError::AllBenchmarksFailed => "benchmark failed: every dataset failed".into(),
        }
    }
}

trait Phase<T> {
    fn config_phase(self) -> std::result::Result<T, CliError>;
    fn data_phase(self) -> std::result::Result<T, CliError>;
}

impl<T> Phase<T> for Result<T> {
    fn config_phase(self) -> std::result::Result<T, CliError> {
        self.map_err(CliError::Config)
    }

    fn data_phase(self) -> std::result::Result<T, CliError> {
        self.map_err(CliError::Data)
    }
}

/// Parses `args` and runs the selected command, returning the process exit
/// code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Fuzzify(args) => cmd_fuzzify(&args),
        Command::Train(args) => cmd_train(&args),
        Command::Infer(args) => cmd_infer(&args),
        Command::Benchmark(args) => cmd_benchmark(&args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.message());
            e.code()
        }
    }
}

// --- shared input handling ---------------------------------------------------

#[derive(Debug)]
struct ScoreTable {
    /// One row per record, values in the requested column order.
    rows: Vec<Vec<f64>>,
    /// Class labels when a class column was requested.
    labels: Vec<String>,
}

/// Reads a delimited file with a header row, picking out the named score
/// columns (and optionally a class column) by name.
fn read_scores(
    path: &Path,
    score_columns: &[String],
    class_column: Option<&str>,
) -> Result<ScoreTable> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::io(&display, csv_io(e)))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::io(&display, csv_io(e)))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut col_index = Vec::with_capacity(score_columns.len());
    for name in score_columns {
        let idx = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("input {display} is missing column `{name}`")))?;
        col_index.push(idx);
    }
    let class_index = match class_column {
        Some(name) => Some(headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Config(format!("input {display} is missing class column `{name}`"))
        })?),
        None => None,
    };

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::MalformedRow {
            path: display.clone(),
            line,
            reason: e.to_string(),
        })?;
        let mut values = Vec::with_capacity(col_index.len());
        for (&c, name) in col_index.iter().zip(score_columns) {
            let cell = record.get(c).unwrap_or("").trim();
            let v: f64 = cell.parse().map_err(|_| Error::MalformedRow {
                path: display.clone(),
                line,
                reason: format!("column `{name}`: non-numeric value `{cell}`"),
            })?;
            values.push(v);
        }
        rows.push(values);
        if let Some(c) = class_index {
            let cell = record.get(c).unwrap_or("").trim();
            if cell.is_empty() {
                return Err(Error::MalformedRow {
                    path: display.clone(),
                    line,
                    reason: "empty class label".into(),
                });
            }
            labels.push(cell.to_string());
        }
    }
    Ok(ScoreTable { rows, labels })
}

fn csv_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| Error::io("stdout", e))
        }
    }
}

fn warn_repairs(repairs: &[RowRepair], cpt: &Cpt) {
    for r in repairs {
        let labels: Vec<&str> = r
            .tuple
            .iter()
            .zip(cpt.parent_scales())
            .map(|(&level, scale)| scale.label(level))
            .collect();
        eprintln!(
            "warning: table row ({}) summed to {}; renormalized",
            labels.join(","),
            r.original_sum
        );
    }
}

// --- fuzzify -----------------------------------------------------------------

fn fuzzify_table(
    cfg: &RunConfig,
    engine_specs_source: &Engine,
    table: &ScoreTable,
) -> Result<String> {
    let mut out = String::new();
    let mut header = vec!["record".to_string()];
    header.extend(cfg.indicator_names());
    for dim in &engine_specs_source.network.dimensions {
        for label in dim.scale.labels() {
            header.push(format!("{}.{}", dim.name, label));
        }
    }
    out.push_str(&header.join("\t"));
    out.push('\n');
    for (i, row) in table.rows.iter().enumerate() {
        let vectors = engine_specs_source.fuzzify_dimensions(row)?;
        let mut fields = vec![i.to_string()];
        fields.extend(row.iter().map(|v| format!("{v}")));
        for v in &vectors {
            fields.extend(v.degrees().iter().map(|d| format!("{d:.4}")));
        }
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    Ok(out)
}

fn cmd_fuzzify(args: &FuzzifyArgs) -> std::result::Result<(), CliError> {
    let cfg = RunConfig::load(&args.config).config_phase()?;
    let specs = cfg.resolve_indicators(None).config_phase()?;
    let engine = Engine::new(
        cfg.network.clone(),
        specs,
        Vec::new(),
        Cpt::uniform(
            cfg.network.dimension_scales(),
            cfg.network.output_scale.clone(),
        ),
        GradeDistribution::uniform(cfg.network.output_scale.clone()),
        cfg.tie_break,
        cfg.tnorm,
    )
    .config_phase()?;
    let table = read_scores(&args.input, &cfg.indicator_names(), None).data_phase()?;
    let rendered = fuzzify_table(&cfg, &engine, &table).data_phase()?;
    write_output(&args.out, &rendered).data_phase()?;
    Ok(())
}

// --- train -------------------------------------------------------------------

fn class_indices(cfg: &RunConfig, labels: &[String]) -> Result<Vec<usize>> {
    labels
        .iter()
        .map(|l| cfg.network.output_scale.resolve(l))
        .collect()
}

fn train_engine(cfg: &RunConfig, table: &ScoreTable) -> Result<(Engine, FitLog, Vec<RowRepair>)> {
    if table.rows.is_empty() {
        return Err(Error::EmptyDataset("training input".into()));
    }
    let grades = class_indices(cfg, &table.labels)?;

    // Percentile-mode fuzzifiers draw their parameters from the training
    // columns.
    let names = cfg.indicator_names();
    let mut columns: HashMap<String, Vec<f64>> = HashMap::new();
    for (j, name) in names.iter().enumerate() {
        columns.insert(name.clone(), table.rows.iter().map(|r| r[j]).collect());
    }
    let specs = cfg.resolve_indicators(Some(&columns))?;

    let probe = Engine::new(
        cfg.network.clone(),
        specs,
        Vec::new(),
        Cpt::uniform(
            cfg.network.dimension_scales(),
            cfg.network.output_scale.clone(),
        ),
        GradeDistribution::uniform(cfg.network.output_scale.clone()),
        cfg.tie_break,
        cfg.tnorm,
    )?;

    // Discretize every record to its per-dimension argmax tuple.
    let tuples: Vec<Vec<usize>> = table
        .rows
        .iter()
        .map(|row| {
            Ok(probe
                .fuzzify_dimensions(row)?
                .iter()
                .map(FuzzyVector::argmax)
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;

    // Rule base: empirical antecedent frequencies fused with expert weights.
    let frequencies = empirical_frequencies(&tuples);
    let rules = build_rulebase(
        &cfg.network.dimension_scales(),
        &cfg.network.output_scale,
        &cfg.kb,
        &frequencies,
        cfg.alpha,
    )?;

    // Table parameters by iterated refit over the stationary stream.
    let batch: Vec<TrainRecord> = tuples
        .into_iter()
        .zip(&grades)
        .map(|(levels, &grade)| TrainRecord { levels, grade })
        .collect();
    let mut learner = CptLearner::new(
        cfg.network.dimension_scales(),
        cfg.network.output_scale.clone(),
        cfg.learn,
    )?;
    let log = learner.fit_until_converged(std::iter::repeat_n(batch, cfg.learn.max_iters))?;
    let mut cpt = learner.into_cpt();

    // Expert-authored rows override learned ones.
    let mut repairs = Vec::new();
    if !cfg.cpt_overrides.entries.is_empty() {
        let (patched, r) = cpt.with_overrides(&cfg.cpt_overrides)?;
        cpt = patched;
        repairs = r;
    }

    let prior = match &cfg.prior {
        PriorPlan::Uniform => GradeDistribution::uniform(cfg.network.output_scale.clone()),
        PriorPlan::Fixed(probs) => {
            GradeDistribution::normalized(cfg.network.output_scale.clone(), probs)?
        }
        PriorPlan::FromData => {
            // Add-one smoothed grade frequencies so no grade starts at zero.
            let arity = cfg.network.output_scale.arity();
            let mut counts = vec![1.0f64; arity];
            for &g in &grades {
                counts[g] += 1.0;
            }
            GradeDistribution::normalized(cfg.network.output_scale.clone(), &counts)?
        }
    };

    let engine = Engine::new(
        cfg.network.clone(),
        probe.specs,
        rules,
        cpt,
        prior,
        cfg.tie_break,
        cfg.tnorm,
    )?;
    Ok((engine, log, repairs))
}

fn cmd_train(args: &TrainArgs) -> std::result::Result<(), CliError> {
    let cfg = RunConfig::load(&args.config).config_phase()?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let table =
        read_scores(&args.input, &cfg.indicator_names(), Some(&cfg.class_column)).data_phase()?;
    let (engine, log, repairs) = train_engine(&cfg, &table).data_phase()?;
    warn_repairs(&repairs, &engine.cpt);

    println!("iteration\tbatch_size\tdelta");
    for entry in &log.entries {
        println!("{}", entry.line());
    }
    let final_delta = log.final_delta().unwrap_or(0.0);
    println!(
        "converged={} final_delta={} tau={}",
        log.converged, final_delta, cfg.learn.tau
    );

    let mut manifest = Manifest::new();
    manifest.set("version", env!("CARGO_PKG_VERSION"));
    manifest.set("seed", seed);
    manifest.set("config_hash", format!("{:016x}", cfg.config_hash));
    manifest.set("records", table.rows.len());
    manifest.set("alpha", cfg.alpha);
    manifest.set("smoothing", cfg.learn.smoothing);
    manifest.set("tau", cfg.learn.tau);
    manifest.set("max_iters", cfg.learn.max_iters);
    manifest.set("iterations", log.entries.len());
    manifest.set("final_delta", final_delta);
    manifest.set("converged", log.converged);
    manifest.set("cpt_repairs", repairs.len());
    engine.save(&args.out, &manifest).data_phase()?;
    println!("bundle written to {}", args.out.display());
    Ok(())
}

// --- infer -------------------------------------------------------------------

fn render_inference(engine: &Engine, table: &ScoreTable) -> Result<String> {
    let mut out = String::new();
    let mut header = vec!["record".to_string()];
    header.extend(engine.network.output_scale.labels().iter().cloned());
    header.push("prediction".to_string());
    out.push_str(&header.join("\t"));
    out.push('\n');
    for (i, row) in table.rows.iter().enumerate() {
        let (dist, grade) = engine.predict(row)?;
        let mut fields = vec![i.to_string()];
        fields.extend(dist.probs().iter().map(|p| format!("{p:.4}")));
        fields.push(engine.network.output_scale.label(grade).to_string());
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    Ok(out)
}

fn cmd_infer(args: &InferArgs) -> std::result::Result<(), CliError> {
    let (engine, _manifest) = Engine::load(&args.bundle).config_phase()?;
    let table = read_scores(&args.input, &engine.input_columns(), None).data_phase()?;
    let rendered = render_inference(&engine, &table).data_phase()?;
    write_output(&args.out, &rendered).data_phase()?;
    Ok(())
}

// --- benchmark ---------------------------------------------------------------

fn benchmark_manifest(
    cfg: &RunConfig,
    seed: u64,
    table: &BenchmarkTable,
    models: &str,
) -> Manifest {
    let mut manifest = Manifest::new();
    manifest.set("version", env!("CARGO_PKG_VERSION"));
    manifest.set("config_hash", format!("{:016x}", cfg.config_hash));
    manifest.set("seed", seed);
    manifest.set("trials", table.trials);
    manifest.set("models", models);
    for outcome in &table.outcomes {
        let status = match &outcome.result {
            Ok(_) => "ok".to_string(),
            Err(e) => format!("failed: {e}"),
        };
        manifest.set(format!("dataset.{}", outcome.dataset), status);
    }
    manifest
}

fn cmd_benchmark(args: &BenchmarkArgs) -> std::result::Result<(), CliError> {
    let cfg = RunConfig::load(&args.config).config_phase()?;
    let plan = cfg
        .benchmark
        .clone()
        .ok_or_else(|| Error::Config("config has no [benchmark] section".into()))
        .config_phase()?;
    let seed = args.seed.unwrap_or(cfg.seed);

    // Load failures become per-dataset rows, not command failures.
    let datasets: Vec<std::result::Result<Dataset, (String, String)>> = plan
        .datasets
        .iter()
        .map(|d| {
            load_dataset(&d.path, &d.name, &d.schema).map_err(|e| (d.name.clone(), e.to_string()))
        })
        .collect();

    let mut pipeline = FbnPipelineConfig {
        learn: cfg.learn,
        tnorm: cfg.tnorm,
        ..FbnPipelineConfig::default()
    };
    if let Some(m) = plan.max_tuples {
        pipeline.max_tuples = m;
    }
    if let Some(m) = plan.min_samples_per_tuple {
        pipeline.min_samples_per_tuple = m;
    }
    let bench_cfg = BenchmarkConfig {
        trials: plan.trials,
        seed,
        train_fraction: cfg.train_fraction,
        stratified: cfg.stratified,
        impute: plan.impute,
        pipeline,
    };
    let table = run_benchmark(&datasets, &plan.models, &bench_cfg).config_phase()?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::io(args.out.display().to_string(), e))
        .data_phase()?;
    let model_names = plan
        .models
        .iter()
        .map(|m| m.name())
        .collect::<Vec<_>>()
        .join(",");
    let manifest = benchmark_manifest(&cfg, seed, &table, &model_names);
    for (file, content) in [
        ("benchmark.txt", table.to_aligned_text()),
        ("benchmark.tsv", table.to_tsv()),
        ("manifest.txt", manifest.to_text()),
    ] {
        let path = args.out.join(file);
        std::fs::write(&path, content)
            .map_err(|e| Error::io(path.display().to_string(), e))
            .data_phase()?;
    }
    print!("{}", table.to_aligned_text());

    if table.all_failed() {
        return Err(CliError::AllBenchmarksFailed);
    }
    Ok(())
}
