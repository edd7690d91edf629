//! Shared vocabulary: linguistic scales, membership vectors, grade
//! distributions and normalized weight vectors.
//!
//! Everything here is immutable after construction and safe to share
//! across threads.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Tolerance for all sum-to-one checks.
pub const PROB_TOL: f64 = 1e-9;

/// An ordered set of grade labels, lowest to highest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinguisticScale {
    labels: Vec<String>,
}

/// Scales are shared by reference; vectors and tables hold an `Arc`.
pub type ScaleRef = Arc<LinguisticScale>;

impl LinguisticScale {
    /// Builds a scale from labels ordered lowest to highest.
    pub fn new<I, S>(labels: I) -> Result<ScaleRef>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::ScaleTooSmall(labels.len()));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Arc::new(LinguisticScale { labels }))
    }

    /// The default four-level grading scale: poor < moderate < good < excellent.
    pub fn four_level() -> ScaleRef {
        LinguisticScale::new(["p", "m", "g", "e"]).expect("static labels are valid")
    }

    pub fn arity(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Resolves a label to its index, erroring with the scale's labels on miss.
    pub fn resolve(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownLabel {
            label: label.to_string(),
            scale: self.labels.join(", "),
        })
    }
}

impl fmt::Display for LinguisticScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels.join(" < "))
    }
}

/// How `argmax` resolves equal-probability grades.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Prefer the higher grade (default).
    #[default]
    Higher,
    /// Prefer the lower grade.
    Lower,
}

fn check_unit_values(scale: &LinguisticScale, values: &[f64]) -> Result<()> {
    if values.len() != scale.arity() {
        return Err(Error::ArityMismatch {
            len: values.len(),
            arity: scale.arity(),
        });
    }
    let mut sum = 0.0;
    for &v in values {
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfUnitRange(v));
        }
        sum += v;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::NotNormalized(sum));
    }
    Ok(())
}

fn normalize_values(scale: &LinguisticScale, raw: &[f64]) -> Result<Vec<f64>> {
    if raw.len() != scale.arity() {
        return Err(Error::ArityMismatch {
            len: raw.len(),
            arity: scale.arity(),
        });
    }
    let mut sum = 0.0;
    for &v in raw {
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
        if v < 0.0 {
            return Err(Error::Negative(v));
        }
        sum += v;
    }
    if sum <= 0.0 {
        return Err(Error::ZeroMass(sum));
    }
    Ok(raw.iter().map(|v| v / sum).collect())
}

fn argmax_with(values: &[f64], tie_break: TieBreak) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        let better = match tie_break {
            TieBreak::Higher => v >= values[best],
            TieBreak::Lower => v > values[best],
        };
        if better {
            best = i;
        }
    }
    best
}

/// Per-level membership degrees over one scale, normalized to sum 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyVector {
    scale: ScaleRef,
    degrees: Vec<f64>,
}

impl FuzzyVector {
    pub fn new(scale: ScaleRef, degrees: Vec<f64>) -> Result<Self> {
        check_unit_values(&scale, &degrees)?;
        Ok(FuzzyVector { scale, degrees })
    }

    /// Normalizes a non-negative, non-zero raw vector to sum 1.
    pub fn normalized(scale: ScaleRef, raw: &[f64]) -> Result<Self> {
        let degrees = normalize_values(&scale, raw)?;
        Ok(FuzzyVector { scale, degrees })
    }

    pub fn one_hot(scale: ScaleRef, level: usize) -> Result<Self> {
        if level >= scale.arity() {
            return Err(Error::ArityMismatch {
                len: level + 1,
                arity: scale.arity(),
            });
        }
        let mut degrees = vec![0.0; scale.arity()];
        degrees[level] = 1.0;
        Ok(FuzzyVector { scale, degrees })
    }

    pub fn scale(&self) -> &ScaleRef {
        &self.scale
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn degree(&self, level: usize) -> f64 {
        self.degrees[level]
    }

    /// Index of the strongest level; ties resolve toward the higher level.
    pub fn argmax(&self) -> usize {
        argmax_with(&self.degrees, TieBreak::Higher)
    }
}

/// A probability distribution over the output grades.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeDistribution {
    scale: ScaleRef,
    probs: Vec<f64>,
}

impl GradeDistribution {
    pub fn new(scale: ScaleRef, probs: Vec<f64>) -> Result<Self> {
        check_unit_values(&scale, &probs)?;
        Ok(GradeDistribution { scale, probs })
    }

    pub fn normalized(scale: ScaleRef, raw: &[f64]) -> Result<Self> {
        let probs = normalize_values(&scale, raw)?;
        Ok(GradeDistribution { scale, probs })
    }

    pub fn uniform(scale: ScaleRef) -> Self {
        let p = 1.0 / scale.arity() as f64;
        let probs = vec![p; scale.arity()];
        GradeDistribution { scale, probs }
    }

    pub fn one_hot(scale: ScaleRef, grade: usize) -> Result<Self> {
        if grade >= scale.arity() {
            return Err(Error::ArityMismatch {
                len: grade + 1,
                arity: scale.arity(),
            });
        }
        let mut probs = vec![0.0; scale.arity()];
        probs[grade] = 1.0;
        Ok(GradeDistribution { scale, probs })
    }

    pub fn scale(&self) -> &ScaleRef {
        &self.scale
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, grade: usize) -> f64 {
        self.probs[grade]
    }

    /// Index of the most probable grade under the default tie rule.
    pub fn argmax(&self) -> usize {
        argmax_with(&self.probs, TieBreak::Higher)
    }

    pub fn argmax_with(&self, tie_break: TieBreak) -> usize {
        argmax_with(&self.probs, tie_break)
    }

    pub fn argmax_label(&self) -> &str {
        self.scale.label(self.argmax())
    }
}

/// Label of the most probable grade; equal probabilities resolve toward
/// the higher grade.
pub fn argmax_grade(dist: &GradeDistribution) -> &str {
    dist.argmax_label()
}

/// A normalized, non-negative weight vector over the sub-indicators of a
/// dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    values: Vec<f64>,
}

impl Weights {
    /// Normalizes raw non-negative weights to sum 1.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidArgument("empty weight vector".into()));
        }
        let mut sum = 0.0;
        for &v in &raw {
            if !v.is_finite() {
                return Err(Error::NonFinite(v));
            }
            if v < 0.0 {
                return Err(Error::Negative(v));
            }
            sum += v;
        }
        if sum <= 0.0 {
            return Err(Error::ZeroMass(sum));
        }
        let values = raw.iter().map(|v| v / sum).collect();
        Ok(Weights { values })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Weights::new(vec![1.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scale_rejects_fewer_than_two_labels() {
        assert!(matches!(
            LinguisticScale::new(["only"]),
            Err(Error::ScaleTooSmall(1))
        ));
    }

    #[test]
    fn scale_rejects_duplicates() {
        assert!(matches!(
            LinguisticScale::new(["p", "m", "p"]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn four_level_order_is_fixed() {
        let s = LinguisticScale::four_level();
        assert_eq!(s.arity(), 4);
        assert_eq!(s.labels(), &["p", "m", "g", "e"]);
        assert_eq!(s.index_of("g"), Some(2));
        assert_eq!(s.index_of("x"), None);
    }

    #[test]
    fn argmax_tie_goes_to_higher_grade() {
        let s = LinguisticScale::four_level();
        let d = GradeDistribution::new(s, vec![0.05, 0.15, 0.40, 0.40]).unwrap();
        assert_eq!(argmax_grade(&d), "e");
    }

    #[test]
    fn argmax_tie_low_pair_picks_moderate() {
        let s = LinguisticScale::four_level();
        let d = GradeDistribution::new(s, vec![0.40, 0.40, 0.15, 0.05]).unwrap();
        assert_eq!(argmax_grade(&d), "m");
    }

    #[test]
    fn argmax_one_hot() {
        let s = LinguisticScale::four_level();
        let d = GradeDistribution::new(s, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(argmax_grade(&d), "e");
    }

    #[test]
    fn argmax_lower_tie_break_is_available() {
        let s = LinguisticScale::four_level();
        let d = GradeDistribution::new(s, vec![0.40, 0.40, 0.15, 0.05]).unwrap();
        assert_eq!(d.argmax_with(TieBreak::Lower), 0);
    }

    #[test]
    fn fuzzy_vector_rejects_out_of_range_and_unnormalized() {
        let s = LinguisticScale::four_level();
        assert!(FuzzyVector::new(s.clone(), vec![0.5, 0.5, 0.5, 0.5]).is_err());
        assert!(FuzzyVector::new(s.clone(), vec![1.2, -0.2, 0.0, 0.0]).is_err());
        assert!(FuzzyVector::new(s.clone(), vec![0.25; 4]).is_ok());
        assert!(FuzzyVector::new(s, vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn normalized_rejects_zero_mass() {
        let s = LinguisticScale::four_level();
        assert!(matches!(
            FuzzyVector::normalized(s, &[0.0, 0.0, 0.0, 0.0]),
            Err(Error::ZeroMass(_))
        ));
    }

    #[test]
    fn weights_normalize_on_construction() {
        let w = Weights::new(vec![2.0, 1.0, 1.0]).unwrap();
        assert_eq!(w.values(), &[0.5, 0.25, 0.25]);
        assert!(Weights::new(vec![0.0, 0.0]).is_err());
        assert!(Weights::new(vec![-1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn normalizing_nonzero_vectors_sums_to_one(
            raw in proptest::collection::vec(0.0f64..1e6, 4),
        ) {
            prop_assume!(raw.iter().sum::<f64>() > 0.0);
            let s = LinguisticScale::four_level();
            let v = FuzzyVector::normalized(s, &raw).unwrap();
            let sum: f64 = v.degrees().iter().sum();
            prop_assert!((sum - 1.0).abs() <= PROB_TOL);
        }

        #[test]
        fn argmax_invariant_under_positive_scaling(
            raw in proptest::collection::vec(1e-6f64..1.0, 4),
            factor in 1e-3f64..1e3,
        ) {
            let s = LinguisticScale::four_level();
            let base = GradeDistribution::normalized(s.clone(), &raw).unwrap();
            let scaled: Vec<f64> = raw.iter().map(|v| v * factor).collect();
            let rescaled = GradeDistribution::normalized(s, &scaled).unwrap();
            prop_assert_eq!(base.argmax(), rescaled.argmax());
        }
    }
}
