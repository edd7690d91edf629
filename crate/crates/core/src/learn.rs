//! Maximum-likelihood fitting and dynamic updating of conditional
//! probability tables, with Laplace smoothing and convergence detection.
//!
//! A single writer owns the running statistics while fitting; readers only
//! ever observe fully-fitted table snapshots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bnet::Cpt;
use crate::error::{Error, Result};
use crate::rulebase::{tuple_count, tuple_to_index};
use crate::types::{GradeDistribution, ScaleRef};

/// Per-cell pseudo-count, convergence threshold, and iteration cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnConfig {
    pub smoothing: f64,
    pub tau: f64,
    pub max_iters: usize,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            smoothing: 1.0,
            tau: 1e-3,
            max_iters: 100,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.smoothing.is_finite() || self.smoothing < 0.0 {
            return Err(Error::BadLearnConfig(format!(
                "smoothing must be >= 0, got {}",
                self.smoothing
            )));
        }
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return Err(Error::BadLearnConfig(format!(
                "tau must be > 0, got {}",
                self.tau
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::BadLearnConfig("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// One labeled observation: complete level tuple plus the true grade.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    pub levels: Vec<usize>,
    pub grade: usize,
}

/// Observation counts per (parent tuple, grade), plus per-tuple totals.
#[derive(Debug, Clone, PartialEq)]
pub struct SufficientStats {
    arities: Vec<usize>,
    child_arity: usize,
    counts: Vec<u64>,
    totals: Vec<u64>,
}

impl SufficientStats {
    pub fn new(parent_arities: Vec<usize>, child_arity: usize) -> Self {
        let tuples = tuple_count(&parent_arities);
        SufficientStats {
            arities: parent_arities,
            child_arity,
            counts: vec![0; tuples * child_arity],
            totals: vec![0; tuples],
        }
    }

    pub fn record(&mut self, levels: &[usize], grade: usize) -> Result<()> {
        if grade >= self.child_arity {
            return Err(Error::BadRecord(format!(
                "grade index {grade} out of range (arity {})",
                self.child_arity
            )));
        }
        let idx =
            tuple_to_index(levels, &self.arities).map_err(|e| Error::BadRecord(e.to_string()))?;
        self.counts[idx * self.child_arity + grade] += 1;
        self.totals[idx] += 1;
        Ok(())
    }

    pub fn record_batch(&mut self, batch: &[TrainRecord]) -> Result<()> {
        for r in batch {
            self.record(&r.levels, r.grade)?;
        }
        Ok(())
    }

    pub fn count(&self, tuple_index: usize, grade: usize) -> u64 {
        self.counts[tuple_index * self.child_arity + grade]
    }

    pub fn total(&self, tuple_index: usize) -> u64 {
        self.totals[tuple_index]
    }

    pub fn tuple_count(&self) -> usize {
        self.totals.len()
    }

    pub fn observations(&self) -> u64 {
        self.totals.iter().sum()
    }
}

/// Closed-form maximum-likelihood fit with optional Laplace smoothing:
/// `P(grade | tuple) = (count + smoothing) / (total + smoothing * arity)`.
/// Tuples with no observations and zero smoothing fall back to uniform.
pub fn mle_fit(
    stats: &SufficientStats,
    smoothing: f64,
    parent_scales: Vec<ScaleRef>,
    child_scale: ScaleRef,
) -> Result<Cpt> {
    let arities: Vec<usize> = parent_scales.iter().map(|s| s.arity()).collect();
    if arities != stats.arities || child_scale.arity() != stats.child_arity {
        return Err(Error::BadLearnConfig(
            "statistics shape does not match the scales".into(),
        ));
    }
    if !smoothing.is_finite() || smoothing < 0.0 {
        return Err(Error::BadLearnConfig(format!(
            "smoothing must be >= 0, got {smoothing}"
        )));
    }
    let arity = stats.child_arity as f64;
    let mut rows = Vec::with_capacity(stats.tuple_count());
    for t in 0..stats.tuple_count() {
        let total = stats.total(t) as f64;
        let denom = total + smoothing * arity;
        let row = if denom == 0.0 {
            GradeDistribution::uniform(child_scale.clone())
        } else {
            let probs: Vec<f64> = (0..stats.child_arity)
                .map(|g| (stats.count(t, g) as f64 + smoothing) / denom)
                .collect();
            GradeDistribution::new(child_scale.clone(), probs)?
        };
        rows.push(row);
    }
    Cpt::new(parent_scales, child_scale, rows)
}

/// One line of the iteration log: iteration number, batch size, delta.
#[derive(Debug, Clone, PartialEq)]
pub struct FitEntry {
    pub iteration: usize,
    pub batch_size: usize,
    pub delta: f64,
}

impl FitEntry {
    pub fn line(&self) -> String {
        format!("{}\t{}\t{}", self.iteration, self.batch_size, self.delta)
    }
}

/// Outcome of a convergence run.
#[derive(Debug, Clone, PartialEq)]
pub struct FitLog {
    pub entries: Vec<FitEntry>,
    pub converged: bool,
}

impl FitLog {
    pub fn final_delta(&self) -> Option<f64> {
        self.entries.last().map(|e| e.delta)
    }
}

/// Online learner: accumulates batches into running statistics and refits
/// the table after each one. The table swaps whole, never partially.
#[derive(Debug, Clone)]
pub struct CptLearner {
    parent_scales: Vec<ScaleRef>,
    child_scale: ScaleRef,
    cfg: LearnConfig,
    stats: SufficientStats,
    current: Cpt,
}

impl CptLearner {
    pub fn new(
        parent_scales: Vec<ScaleRef>,
        child_scale: ScaleRef,
        cfg: LearnConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let arities: Vec<usize> = parent_scales.iter().map(|s| s.arity()).collect();
        let stats = SufficientStats::new(arities, child_scale.arity());
        let current = mle_fit(
            &stats,
            cfg.smoothing,
            parent_scales.clone(),
            child_scale.clone(),
        )?;
        Ok(CptLearner {
            parent_scales,
            child_scale,
            cfg,
            stats,
            current,
        })
    }

    pub fn cpt(&self) -> &Cpt {
        &self.current
    }

    pub fn into_cpt(self) -> Cpt {
        self.current
    }

    pub fn stats(&self) -> &SufficientStats {
        &self.stats
    }

    /// Accumulates one batch, refits, and returns the largest per-cell
    /// change between the old and new tables.
    pub fn update_step(&mut self, batch: &[TrainRecord]) -> Result<f64> {
        self.stats.record_batch(batch)?;
        let next = mle_fit(
            &self.stats,
            self.cfg.smoothing,
            self.parent_scales.clone(),
            self.child_scale.clone(),
        )?;
        let delta = self.current.linf_delta(&next);
        self.current = next;
        Ok(delta)
    }

    /// Applies [`CptLearner::update_step`] per batch until the delta drops
    /// below `tau` or `max_iters` batches have been consumed.
    pub fn fit_until_converged<I, B>(&mut self, batches: I) -> Result<FitLog>
    where
        I: IntoIterator<Item = B>,
        B: AsRef<[TrainRecord]>,
    {
        let mut entries = Vec::new();
        let mut converged = false;
        for (i, batch) in batches.into_iter().enumerate() {
            let batch = batch.as_ref();
            let delta = self.update_step(batch)?;
            entries.push(FitEntry {
                iteration: i + 1,
                batch_size: batch.len(),
                delta,
            });
            if delta < self.cfg.tau {
                converged = true;
                break;
            }
            if i + 1 >= self.cfg.max_iters {
                break;
            }
        }
        if entries.is_empty() {
            return Err(Error::InvalidArgument(
                "fit_until_converged needs at least one batch".into(),
            ));
        }
        Ok(FitLog { entries, converged })
    }
}

/// Validation harness for the estimator: samples `n` (tuple, grade) pairs
/// from a known table under a uniform tuple distribution, refits with zero
/// smoothing, and returns the largest absolute cell error.
pub fn recover_known_cpt(true_cpt: &Cpt, n: usize, seed: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "recover_known_cpt needs at least one sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arities = true_cpt.parent_arities();
    let tuples = tuple_count(&arities);
    let mut stats = SufficientStats::new(arities, true_cpt.child_scale().arity());
    for _ in 0..n {
        let t = rng.random_range(0..tuples);
        let row = true_cpt.row(t);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut grade = row.probs().len() - 1;
        for (g, &p) in row.probs().iter().enumerate() {
            acc += p;
            if u < acc {
                grade = g;
                break;
            }
        }
        let tuple = crate::rulebase::index_to_tuple(t, &true_cpt.parent_arities());
        stats.record(&tuple, grade)?;
    }
    let fitted = mle_fit(
        &stats,
        0.0,
        true_cpt.parent_scales().to_vec(),
        true_cpt.child_scale().clone(),
    )?;
    Ok(true_cpt.linf_delta(&fitted))
}
