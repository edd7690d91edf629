//! Conversion of raw indicator scores into normalized membership vectors
//! via per-level Gaussian membership functions, and weighted aggregation
//! of sub-indicator vectors into dimension-level vectors.

use crate::error::{Error, Result};
use crate::types::{FuzzyVector, ScaleRef, Weights};

/// Raw memberships below this threshold count as total underflow and fall
/// back to a one-hot vector at the nearest center.
pub const UNDERFLOW_EPS: f64 = 1e-12;

/// Gaussian membership function `exp(-(x - c)^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMf {
    center: f64,
    sigma: f64,
}

impl GaussianMf {
    pub fn new(center: f64, sigma: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::NonFinite(center));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidSigma(sigma));
        }
        Ok(GaussianMf { center, sigma })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Membership degree of `x`; 1 exactly at the center, symmetric about it.
    pub fn membership(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        Ok(self.eval(x))
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let d = x - self.center;
        (-(d * d) / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// One indicator's fuzzification parameters: one membership function per
/// scale level, centers strictly increasing with grade order.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSpec {
    name: String,
    scale: ScaleRef,
    mfs: Vec<GaussianMf>,
    domain: (f64, f64),
}

/// Default per-level centers for a 0-100 score scale with four grades.
pub const DEFAULT_SCORE_CENTERS: [f64; 4] = [40.0, 60.0, 75.0, 90.0];
/// Default width shared by the four score-scale membership functions.
pub const DEFAULT_SCORE_SIGMA: f64 = 10.0;

/// Percentile positions used when fitting four-level membership centers
/// from data.
const FOUR_LEVEL_PERCENTILES: [f64; 4] = [20.0, 45.0, 70.0, 90.0];

impl IndicatorSpec {
    pub fn new(
        name: impl Into<String>,
        scale: ScaleRef,
        mfs: Vec<GaussianMf>,
        domain: (f64, f64),
    ) -> Result<Self> {
        let name = name.into();
        let fail = |reason: &str| Error::InvalidIndicator {
            name: name.clone(),
            reason: reason.to_string(),
        };
        if mfs.len() != scale.arity() {
            return Err(fail(&format!(
                "{} membership functions for {} levels",
                mfs.len(),
                scale.arity()
            )));
        }
        if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
            return Err(fail("domain must be a finite non-empty interval"));
        }
        for pair in mfs.windows(2) {
            if pair[1].center <= pair[0].center {
                return Err(fail("centers must strictly increase with grade order"));
            }
        }
        if mfs[0].center < domain.0 || mfs[mfs.len() - 1].center > domain.1 {
            return Err(fail("centers must lie within the domain"));
        }
        Ok(IndicatorSpec {
            name,
            scale,
            mfs,
            domain,
        })
    }

    /// The stock spec for a 0-100 score: centers (40, 60, 75, 90), sigma 10.
    pub fn default_score(name: impl Into<String>, scale: ScaleRef) -> Result<Self> {
        if scale.arity() != 4 {
            return Err(Error::InvalidIndicator {
                name: name.into(),
                reason: format!(
                    "default score parameters cover 4 levels, scale has {}",
                    scale.arity()
                ),
            });
        }
        let mfs = DEFAULT_SCORE_CENTERS
            .iter()
            .map(|&c| GaussianMf::new(c, DEFAULT_SCORE_SIGMA))
            .collect::<Result<Vec<_>>>()?;
        IndicatorSpec::new(name, scale, mfs, (0.0, 100.0))
    }

    /// Fits membership parameters from a training column: centers at fixed
    /// percentiles of the data (20/45/70/90 for four levels, equal-mass bin
    /// midpoints otherwise), sigma equal to half the mean inter-center gap.
    pub fn from_samples(name: impl Into<String>, scale: ScaleRef, samples: &[f64]) -> Result<Self> {
        let name = name.into();
        if samples.is_empty() {
            return Err(Error::InvalidIndicator {
                name,
                reason: "no samples to fit membership functions from".into(),
            });
        }
        let mut sorted: Vec<f64> = samples.iter().copied().filter(|v| v.is_finite()).collect();
        if sorted.is_empty() {
            return Err(Error::InvalidIndicator {
                name,
                reason: "all samples are non-finite".into(),
            });
        }
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let arity = scale.arity();

        let positions: Vec<f64> = if arity == 4 {
            FOUR_LEVEL_PERCENTILES.to_vec()
        } else {
            (0..arity)
                .map(|i| (i as f64 + 0.5) * 100.0 / arity as f64)
                .collect()
        };
        let mut centers: Vec<f64> = positions.iter().map(|&p| percentile(&sorted, p)).collect();

        // Heavily repeated values can collapse adjacent centers; keep them
        // strictly increasing so level order stays meaningful.
        let span = sorted[sorted.len() - 1] - sorted[0];
        let min_sep = (span * 1e-6).max(1e-9);
        for i in 1..centers.len() {
            if centers[i] <= centers[i - 1] + min_sep {
                centers[i] = centers[i - 1] + min_sep;
            }
        }

        let mean_gap = (centers[arity - 1] - centers[0]) / (arity - 1) as f64;
        let sigma = (mean_gap / 2.0).max(min_sep / 2.0);
        let mfs = centers
            .iter()
            .map(|&c| GaussianMf::new(c, sigma))
            .collect::<Result<Vec<_>>>()?;
        let domain = (
            sorted[0].min(centers[0]),
            sorted[sorted.len() - 1].max(centers[arity - 1]),
        );
        IndicatorSpec::new(name, scale, mfs, domain)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scale(&self) -> &ScaleRef {
        &self.scale
    }

    pub fn mfs(&self) -> &[GaussianMf] {
        &self.mfs
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Fuzzifies a raw score into a normalized membership vector.
    ///
    /// Out-of-domain scores clamp to the domain boundary. When every raw
    /// membership underflows the vector collapses to one-hot at the level
    /// with the nearest center.
    pub fn fuzzify(&self, x: f64) -> Result<FuzzyVector> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let x = x.clamp(self.domain.0, self.domain.1);
        let raw: Vec<f64> = self.mfs.iter().map(|mf| mf.eval(x)).collect();
        if raw.iter().all(|&m| m < UNDERFLOW_EPS) {
            let nearest = self.nearest_center(x);
            return FuzzyVector::one_hot(self.scale.clone(), nearest);
        }
        FuzzyVector::normalized(self.scale.clone(), &raw)
    }

    fn nearest_center(&self, x: f64) -> usize {
        let mut best = 0;
        for (i, mf) in self.mfs.iter().enumerate().skip(1) {
            if (x - mf.center).abs() <= (x - self.mfs[best].center).abs() {
                best = i;
            }
        }
        best
    }
}

/// Linear-interpolation percentile over a sorted slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = (p / 100.0).clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = rank - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

/// Weighted-sum composition of sub-indicator vectors into one
/// dimension-level vector, renormalized.
pub fn aggregate_dimension(children: &[FuzzyVector], weights: &Weights) -> Result<FuzzyVector> {
    if children.is_empty() {
        return Err(Error::InvalidArgument(
            "aggregate_dimension needs at least one child".into(),
        ));
    }
    if children.len() != weights.len() {
        return Err(Error::LengthMismatch(children.len(), weights.len()));
    }
    let scale = children[0].scale();
    for child in &children[1..] {
        if child.scale() != scale {
            return Err(Error::ScaleMismatch(format!(
                "[{}] vs [{}]",
                scale.labels().join(", "),
                child.scale().labels().join(", ")
            )));
        }
    }
    let mut acc = vec![0.0; scale.arity()];
    for (child, &w) in children.iter().zip(weights.values()) {
        for (slot, &d) in acc.iter_mut().zip(child.degrees()) {
            *slot += w * d;
        }
    }
    FuzzyVector::normalized(scale.clone(), &acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::LinguisticScale;
    use proptest::prelude::*;

    fn score_spec() -> IndicatorSpec {
        IndicatorSpec::default_score("score", LinguisticScale::four_level()).unwrap()
    }

    #[test]
    fn membership_is_one_at_center() {
        let mf = GaussianMf::new(75.0, 10.0).unwrap();
        assert_eq!(mf.membership(75.0).unwrap(), 1.0);
    }

    #[test]
    fn membership_matches_direct_evaluation() {
        let mf = GaussianMf::new(75.0, 10.0).unwrap();
        // exp(-(85-75)^2 / 200) = exp(-0.5)
        let expected = (-0.5f64).exp();
        assert!((mf.membership(85.0).unwrap() - expected).abs() < 1e-15);
        assert!((mf.membership(85.0).unwrap() - 0.6065306597126334).abs() < 1e-12);
    }

    #[test]
    fn membership_is_symmetric_about_center() {
        let mf = GaussianMf::new(75.0, 10.0).unwrap();
        assert_eq!(mf.membership(65.0).unwrap(), mf.membership(85.0).unwrap());
    }

    #[test]
    fn membership_rejects_non_finite_input() {
        let mf = GaussianMf::new(75.0, 10.0).unwrap();
        assert!(mf.membership(f64::NAN).is_err());
        assert!(mf.membership(f64::INFINITY).is_err());
    }

    #[test]
    fn sigma_must_be_positive() {
        assert!(GaussianMf::new(1.0, 0.0).is_err());
        assert!(GaussianMf::new(1.0, -2.0).is_err());
    }

    #[test]
    fn spec_rejects_non_increasing_centers() {
        let scale = LinguisticScale::four_level();
        let mfs = [40.0, 60.0, 60.0, 90.0]
            .iter()
            .map(|&c| GaussianMf::new(c, 10.0).unwrap())
            .collect();
        assert!(IndicatorSpec::new("bad", scale, mfs, (0.0, 100.0)).is_err());
    }

    #[test]
    fn fuzzify_peaks_at_matching_center() {
        let spec = score_spec();
        let v = spec.fuzzify(75.0).unwrap();
        assert_eq!(v.argmax(), 2); // "g"
        let sum: f64 = v.degrees().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn fuzzify_score_85_matches_scalar_arithmetic() {
        // Oracle: evaluate each level membership directly and normalize.
        let centers = [40.0f64, 60.0, 75.0, 90.0];
        let raw: Vec<f64> = centers
            .iter()
            .map(|c| (-((85.0 - c) * (85.0 - c)) / 200.0f64).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        let expected: Vec<f64> = raw.iter().map(|m| m / total).collect();

        let got = score_spec().fuzzify(85.0).unwrap();
        for (g, e) in got.degrees().iter().zip(&expected) {
            assert!((g - e).abs() < 1e-12, "got {g}, expected {e}");
        }
        // Frozen values from the oracle above.
        let frozen = [
            2.6135145586988794e-5,
            0.028660667251047114,
            0.39564830728926353,
            0.5756648903141024,
        ];
        for (g, f) in got.degrees().iter().zip(&frozen) {
            assert!((g - f).abs() < 1e-9, "got {g}, frozen {f}");
        }
    }

    #[test]
    fn fuzzify_clamps_below_domain_to_lowest_levels() {
        let spec = score_spec();
        let v = spec.fuzzify(-50.0).unwrap();
        let at_zero = spec.fuzzify(0.0).unwrap();
        assert_eq!(v, at_zero);
        assert_eq!(v.argmax(), 0);
        // Mass concentrates on the low end.
        assert!(v.degree(0) > 0.9);
    }

    #[test]
    fn fuzzify_underflow_falls_back_to_nearest_center() {
        // Tight sigmas so a mid-gap point underflows every level.
        let scale = LinguisticScale::four_level();
        let mfs = [0.0, 100.0, 200.0, 300.0]
            .iter()
            .map(|&c| GaussianMf::new(c, 0.5).unwrap())
            .collect();
        let spec = IndicatorSpec::new("tight", scale, mfs, (0.0, 300.0)).unwrap();
        let v = spec.fuzzify(149.0).unwrap();
        assert_eq!(v.degrees(), &[0.0, 1.0, 0.0, 0.0]);
        let v = spec.fuzzify(151.0).unwrap();
        assert_eq!(v.degrees(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn from_samples_uses_four_level_percentiles() {
        let scale = LinguisticScale::four_level();
        // 0..=100 uniformly: percentile p lands on p itself.
        let samples: Vec<f64> = (0..=100).map(|v| v as f64).collect();
        let spec = IndicatorSpec::from_samples("col", scale, &samples).unwrap();
        let centers: Vec<f64> = spec.mfs().iter().map(|m| m.center()).collect();
        assert_eq!(centers, vec![20.0, 45.0, 70.0, 90.0]);
        // sigma = half the mean gap = (90 - 20) / 3 / 2
        let expected_sigma = (90.0 - 20.0) / 3.0 / 2.0;
        assert!((spec.mfs()[0].sigma() - expected_sigma).abs() < 1e-12);
    }

    #[test]
    fn from_samples_survives_constant_column() {
        let scale = LinguisticScale::four_level();
        let spec = IndicatorSpec::from_samples("flat", scale, &[5.0; 40]).unwrap();
        let centers: Vec<f64> = spec.mfs().iter().map(|m| m.center()).collect();
        for pair in centers.windows(2) {
            assert!(pair[1] > pair[0]);
        }
        assert!(spec.fuzzify(5.0).is_ok());
    }

    #[test]
    fn aggregate_identity_for_single_child() {
        let spec = score_spec();
        let child = spec.fuzzify(82.0).unwrap();
        let w = Weights::new(vec![1.0]).unwrap();
        let out = aggregate_dimension(std::slice::from_ref(&child), &w).unwrap();
        for (a, b) in out.degrees().iter().zip(child.degrees()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregate_idempotent_on_identical_children() {
        let spec = score_spec();
        let child = spec.fuzzify(63.0).unwrap();
        let w = Weights::new(vec![0.5, 0.5]).unwrap();
        let out = aggregate_dimension(&[child.clone(), child.clone()], &w).unwrap();
        for (a, b) in out.degrees().iter().zip(child.degrees()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregate_weighted_sum_of_one_hots() {
        let scale = LinguisticScale::four_level();
        let lo = FuzzyVector::new(scale.clone(), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let hi = FuzzyVector::new(scale, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let w = Weights::new(vec![0.25, 0.75]).unwrap();
        let out = aggregate_dimension(&[lo, hi], &w).unwrap();
        assert_eq!(out.degrees(), &[0.25, 0.0, 0.0, 0.75]);
    }

    #[test]
    fn aggregate_rejects_scale_and_length_mismatch() {
        let four = LinguisticScale::four_level();
        let two = LinguisticScale::new(["lo", "hi"]).unwrap();
        let a = FuzzyVector::new(four.clone(), vec![0.25; 4]).unwrap();
        let b = FuzzyVector::new(two, vec![0.5, 0.5]).unwrap();
        let w = Weights::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            aggregate_dimension(&[a.clone(), b], &w),
            Err(Error::ScaleMismatch(_))
        ));
        assert!(matches!(
            aggregate_dimension(&[a], &w),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    proptest! {
        #[test]
        fn fuzzify_output_is_valid_for_any_finite_input(x in -1e9f64..1e9) {
            let v = score_spec().fuzzify(x).unwrap();
            let sum: f64 = v.degrees().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            prop_assert!(v.degrees().iter().all(|d| (0.0..=1.0).contains(d)));
        }

        #[test]
        fn membership_never_exceeds_one(
            x in -1e6f64..1e6,
            c in -1e3f64..1e3,
            sigma in 1e-3f64..1e3,
        ) {
            let mf = GaussianMf::new(c, sigma).unwrap();
            let m = mf.membership(x).unwrap();
            prop_assert!(m > 0.0 || x != c);
            prop_assert!(m <= 1.0);
        }
    }
}
