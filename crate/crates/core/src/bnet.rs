//! Three-layer network structure, conditional probability table, and
//! posterior inference under crisp and fuzzy (soft) evidence.
//!
//! The table maps parent-level tuples directly to distributions over the
//! output grades; the prior folds in multiplicatively with renormalization.
//! Tables and networks are immutable once built, so inference is a pure
//! function that may run on many threads concurrently.

use crate::error::{Error, Result};
use crate::rulebase::{index_to_tuple, tuple_count, tuple_to_index, Antecedent};
use crate::types::{FuzzyVector, GradeDistribution, ScaleRef, Weights, PROB_TOL};

/// Prior distribution over the output grades.
pub type Prior = GradeDistribution;

/// One mid-layer node: a named dimension with its scale and weighted
/// sub-indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub name: String,
    pub scale: ScaleRef,
    pub indicators: Vec<String>,
    pub weights: Weights,
}

impl Dimension {
    pub fn new(
        name: impl Into<String>,
        scale: ScaleRef,
        indicators: Vec<String>,
        weights: Weights,
    ) -> Result<Self> {
        let name = name.into();
        if indicators.is_empty() {
            return Err(Error::BadNetwork(format!(
                "dimension `{name}` has no sub-indicators"
            )));
        }
        if indicators.len() != weights.len() {
            return Err(Error::BadNetwork(format!(
                "dimension `{name}`: {} sub-indicators but {} weights",
                indicators.len(),
                weights.len()
            )));
        }
        Ok(Dimension {
            name,
            scale,
            indicators,
            weights,
        })
    }

    /// A dimension fed by a single raw score of the same name.
    pub fn single(name: impl Into<String>, scale: ScaleRef) -> Self {
        let name = name.into();
        Dimension {
            indicators: vec![name.clone()],
            weights: Weights::uniform(1).expect("one weight"),
            name,
            scale,
        }
    }
}

/// Fixed three-layer structure: sub-indicator leaves feed dimension nodes,
/// dimension nodes feed one output node. Acyclic by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkStructure {
    pub dimensions: Vec<Dimension>,
    pub output_name: String,
    pub output_scale: ScaleRef,
}

impl NetworkStructure {
    pub fn new(
        dimensions: Vec<Dimension>,
        output_name: impl Into<String>,
        output_scale: ScaleRef,
    ) -> Result<Self> {
        if dimensions.is_empty() {
            return Err(Error::BadNetwork("no input dimensions".into()));
        }
        let mut seen = Vec::new();
        for d in &dimensions {
            if seen.contains(&&d.name) {
                return Err(Error::BadNetwork(format!(
                    "duplicate dimension `{}`",
                    d.name
                )));
            }
            seen.push(&d.name);
        }
        Ok(NetworkStructure {
            dimensions,
            output_name: output_name.into(),
            output_scale,
        })
    }

    /// The stock layout: dimensions A, P, M over the four-level scale, each
    /// fed by a single score, output node S.
    pub fn default_three_dim() -> Self {
        let four = crate::types::LinguisticScale::four_level();
        NetworkStructure {
            dimensions: vec![
                Dimension::single("A", four.clone()),
                Dimension::single("P", four.clone()),
                Dimension::single("M", four.clone()),
            ],
            output_name: "S".into(),
            output_scale: four,
        }
    }

    pub fn dimension_scales(&self) -> Vec<ScaleRef> {
        self.dimensions.iter().map(|d| d.scale.clone()).collect()
    }

    pub fn dimension_names(&self) -> Vec<String> {
        self.dimensions.iter().map(|d| d.name.clone()).collect()
    }

    pub fn parent_arities(&self) -> Vec<usize> {
        self.dimensions.iter().map(|d| d.scale.arity()).collect()
    }

    pub fn tuple_count(&self) -> usize {
        tuple_count(&self.parent_arities())
    }
}

/// A renormalization applied to a table row whose values did not sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RowRepair {
    pub tuple: Antecedent,
    pub original_sum: f64,
}

/// Conditional probability table: one output-grade distribution per
/// parent-level tuple, stored densely in enumeration order (first parent
/// fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    parent_scales: Vec<ScaleRef>,
    child_scale: ScaleRef,
    rows: Vec<GradeDistribution>,
}

impl Cpt {
    /// Builds a table from already-valid rows in enumeration order.
    pub fn new(
        parent_scales: Vec<ScaleRef>,
        child_scale: ScaleRef,
        rows: Vec<GradeDistribution>,
    ) -> Result<Self> {
        let expected = tuple_count(&parent_scales.iter().map(|s| s.arity()).collect::<Vec<_>>());
        if rows.len() != expected {
            return Err(Error::IncompleteTable {
                got: rows.len(),
                expected,
            });
        }
        for row in &rows {
            if row.scale() != &child_scale {
                return Err(Error::ScaleMismatch(
                    "row scale differs from child scale".into(),
                ));
            }
        }
        Ok(Cpt {
            parent_scales,
            child_scale,
            rows,
        })
    }

    /// Builds a table from raw numeric rows in enumeration order. Rows
    /// whose values do not sum to 1 are renormalized and reported.
    pub fn from_raw_rows(
        parent_scales: Vec<ScaleRef>,
        child_scale: ScaleRef,
        raw: Vec<Vec<f64>>,
    ) -> Result<(Self, Vec<RowRepair>)> {
        let arities: Vec<usize> = parent_scales.iter().map(|s| s.arity()).collect();
        let expected = tuple_count(&arities);
        if raw.len() != expected {
            return Err(Error::IncompleteTable {
                got: raw.len(),
                expected,
            });
        }
        let mut repairs = Vec::new();
        let mut rows = Vec::with_capacity(raw.len());
        for (i, values) in raw.into_iter().enumerate() {
            let (row, repair) = repair_row(&child_scale, &values)?;
            if repair {
                repairs.push(RowRepair {
                    tuple: index_to_tuple(i, &arities),
                    original_sum: values.iter().sum(),
                });
            }
            rows.push(row);
        }
        Ok((
            Cpt {
                parent_scales,
                child_scale,
                rows,
            },
            repairs,
        ))
    }

    /// A table with every row uniform.
    pub fn uniform(parent_scales: Vec<ScaleRef>, child_scale: ScaleRef) -> Self {
        let n = tuple_count(&parent_scales.iter().map(|s| s.arity()).collect::<Vec<_>>());
        let rows = (0..n)
            .map(|_| GradeDistribution::uniform(child_scale.clone()))
            .collect();
        Cpt {
            parent_scales,
            child_scale,
            rows,
        }
    }

    pub fn parent_scales(&self) -> &[ScaleRef] {
        &self.parent_scales
    }

    pub fn child_scale(&self) -> &ScaleRef {
        &self.child_scale
    }

    pub fn parent_arities(&self) -> Vec<usize> {
        self.parent_scales.iter().map(|s| s.arity()).collect()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[GradeDistribution] {
        &self.rows
    }

    pub fn row(&self, index: usize) -> &GradeDistribution {
        &self.rows[index]
    }

    /// Returns the stored row for a parent-level tuple.
    pub fn lookup(&self, parents: &[usize]) -> Result<&GradeDistribution> {
        let idx = tuple_to_index(parents, &self.parent_arities())?;
        Ok(&self.rows[idx])
    }

    /// Replaces the rows named by a fragment, renormalizing and reporting
    /// any that do not sum to 1.
    pub fn with_overrides(&self, fragment: &CptFragment) -> Result<(Cpt, Vec<RowRepair>)> {
        let arities = self.parent_arities();
        let mut rows = self.rows.clone();
        let mut repairs = Vec::new();
        for (tuple, values) in &fragment.entries {
            let idx = tuple_to_index(tuple, &arities)?;
            let (row, repaired) = repair_row(&self.child_scale, values)?;
            if repaired {
                repairs.push(RowRepair {
                    tuple: tuple.clone(),
                    original_sum: values.iter().sum(),
                });
            }
            rows[idx] = row;
        }
        Ok((
            Cpt {
                parent_scales: self.parent_scales.clone(),
                child_scale: self.child_scale.clone(),
                rows,
            },
            repairs,
        ))
    }

    /// Largest absolute per-cell difference between two same-shape tables.
    pub fn linf_delta(&self, other: &Cpt) -> f64 {
        debug_assert_eq!(self.rows.len(), other.rows.len());
        let mut max = 0.0f64;
        for (a, b) in self.rows.iter().zip(&other.rows) {
            for (x, y) in a.probs().iter().zip(b.probs()) {
                max = max.max((x - y).abs());
            }
        }
        max
    }

    /// Structural self-test over the valid table; see
    /// [`joint_factorization_check`].
    pub fn factorization_check(&self) -> bool {
        let raw: Vec<Vec<f64>> = self.rows.iter().map(|r| r.probs().to_vec()).collect();
        joint_factorization_check(&raw)
    }

    /// Serializes the table in its tabular text layout: a header naming the
    /// parent columns and one `child=label` column per grade
    /// (highest grade first), then one line per parent tuple in enumeration
    /// order. Values print in shortest round-trip form.
    pub fn to_text(&self, parent_names: &[String], child_name: &str) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = parent_names.to_vec();
        for label in self.child_scale.labels().iter().rev() {
            header.push(format!("{child_name}={label}"));
        }
        out.push_str(&header.join("\t"));
        out.push('\n');
        let arities = self.parent_arities();
        for (i, row) in self.rows.iter().enumerate() {
            let tuple = index_to_tuple(i, &arities);
            let mut fields: Vec<String> = tuple
                .iter()
                .zip(&self.parent_scales)
                .map(|(&level, scale)| scale.label(level).to_string())
                .collect();
            for g in (0..self.child_scale.arity()).rev() {
                fields.push(format!("{}", row.prob(g)));
            }
            out.push_str(&fields.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Parses a complete table from the text layout written by
    /// [`Cpt::to_text`]. Rows may appear in any order but every tuple must
    /// be present exactly once; rows that do not sum to 1 are renormalized
    /// and reported.
    pub fn parse_text(
        text: &str,
        parent_scales: Vec<ScaleRef>,
        child_scale: ScaleRef,
    ) -> Result<(Cpt, Vec<RowRepair>)> {
        let fragment = CptFragment::parse(text, &parent_scales, &child_scale)?;
        let arities: Vec<usize> = parent_scales.iter().map(|s| s.arity()).collect();
        let expected = tuple_count(&arities);
        if fragment.entries.len() != expected {
            return Err(Error::IncompleteTable {
                got: fragment.entries.len(),
                expected,
            });
        }
        let mut raw: Vec<Option<Vec<f64>>> = vec![None; expected];
        for (tuple, values) in fragment.entries {
            let idx = tuple_to_index(&tuple, &arities)?;
            raw[idx] = Some(values);
        }
        let raw: Vec<Vec<f64>> = raw
            .into_iter()
            .map(|r| r.expect("duplicate-free complete fragment"))
            .collect();
        Cpt::from_raw_rows(parent_scales, child_scale, raw)
    }
}

fn repair_row(child_scale: &ScaleRef, values: &[f64]) -> Result<(GradeDistribution, bool)> {
    if values.len() != child_scale.arity() {
        return Err(Error::ArityMismatch {
            len: values.len(),
            arity: child_scale.arity(),
        });
    }
    let mut sum = 0.0;
    for &v in values {
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
    if (sum - 1.0).abs() <= PROB_TOL {
        Ok((
            GradeDistribution::new(child_scale.clone(), values.to_vec())?,
            false,
        ))
    } else {
        Ok((
            GradeDistribution::normalized(child_scale.clone(), values)?,
            true,
        ))
    }
}

/// A partial set of table rows, e.g. expert-authored overrides.
#[derive(Debug, Clone, Default)]
pub struct CptFragment {
    /// `(parent tuple, raw row values)` pairs in input order.
    pub entries: Vec<(Antecedent, Vec<f64>)>,
}

impl CptFragment {
    /// Parses rows in the tabular text layout; any subset of tuples is
    /// accepted but duplicates are rejected. Raw values are kept as
    /// written (no renormalization happens until the fragment is applied).
    pub fn parse(
        text: &str,
        parent_scales: &[ScaleRef],
        child_scale: &ScaleRef,
    ) -> Result<CptFragment> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty table text".into()))?;
        let headers: Vec<&str> = header.split('\t').collect();
        let n_parents = parent_scales.len();
        let arity = child_scale.arity();
        if headers.len() != n_parents + arity {
            return Err(Error::Parse(format!(
                "header has {} columns, expected {} parents + {} grades",
                headers.len(),
                n_parents,
                arity
            )));
        }
        // Grade columns are named `child=label`; map each to its scale index.
        let mut grade_cols = Vec::with_capacity(arity);
        for h in &headers[n_parents..] {
            let label = h.split('=').nth(1).ok_or_else(|| {
                Error::Parse(format!("grade column `{h}` is not in child=label form"))
            })?;
            grade_cols.push(child_scale.resolve(label)?);
        }

        let mut entries = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != n_parents + arity {
                return Err(Error::Parse(format!(
                    "table line {}: {} fields, expected {}",
                    lineno + 1,
                    fields.len(),
                    n_parents + arity
                )));
            }
            let tuple = fields[..n_parents]
                .iter()
                .zip(parent_scales)
                .map(|(label, scale)| scale.resolve(label))
                .collect::<Result<Antecedent>>()?;
            if !seen.insert(tuple.clone()) {
                return Err(Error::Parse(format!(
                    "table line {}: duplicate tuple {:?}",
                    lineno + 1,
                    tuple
                )));
            }
            let mut values = vec![0.0; arity];
            for (col, field) in grade_cols.iter().zip(&fields[n_parents..]) {
                values[*col] = field.parse().map_err(|_| {
                    Error::Parse(format!("table line {}: bad number `{field}`", lineno + 1))
                })?;
            }
            entries.push((tuple, values));
        }
        Ok(CptFragment { entries })
    }
}

/// Which t-norm combines per-dimension membership degrees into a firing
/// strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TNorm {
    #[default]
    Min,
    Product,
}

impl TNorm {
    fn combine(self, acc: f64, degree: f64) -> f64 {
        match self {
            TNorm::Min => acc.min(degree),
            TNorm::Product => acc * degree,
        }
    }
}

/// Posterior under complete crisp evidence: the table row for the observed
/// tuple multiplied elementwise by the prior, renormalized.
pub fn infer_crisp(cpt: &Cpt, prior: &Prior, parents: &[usize]) -> Result<GradeDistribution> {
    if prior.scale() != cpt.child_scale() {
        return Err(Error::ScaleMismatch(
            "prior scale differs from table".into(),
        ));
    }
    let row = cpt.lookup(parents)?;
    let scores: Vec<f64> = row
        .probs()
        .iter()
        .zip(prior.probs())
        .map(|(r, p)| r * p)
        .collect();
    GradeDistribution::normalized(cpt.child_scale().clone(), &scores)
        .map_err(|_| Error::ZeroPosterior)
}

/// Posterior under fuzzy evidence: for each grade, the prior times the sum
/// over all parent tuples of the tuple's firing strength times the table
/// entry, renormalized. With one-hot evidence this reduces exactly to
/// [`infer_crisp`].
pub fn infer_soft(
    cpt: &Cpt,
    prior: &Prior,
    evidence: &[FuzzyVector],
    tnorm: TNorm,
) -> Result<GradeDistribution> {
    if prior.scale() != cpt.child_scale() {
        return Err(Error::ScaleMismatch(
            "prior scale differs from table".into(),
        ));
    }
    if evidence.len() != cpt.parent_scales().len() {
        return Err(Error::LengthMismatch(
            evidence.len(),
            cpt.parent_scales().len(),
        ));
    }
    for (ev, scale) in evidence.iter().zip(cpt.parent_scales()) {
        if ev.scale() != scale {
            return Err(Error::ScaleMismatch(format!(
                "evidence scale [{}] differs from dimension scale [{}]",
                ev.scale().labels().join(", "),
                scale.labels().join(", ")
            )));
        }
    }

    let arities = cpt.parent_arities();
    let grades = cpt.child_scale().arity();
    let mut sums = vec![0.0f64; grades];
    for (idx, row) in cpt.rows().iter().enumerate() {
        let tuple = index_to_tuple(idx, &arities);
        let mut firing = f64::INFINITY;
        for (d, &level) in tuple.iter().enumerate() {
            let degree = evidence[d].degree(level);
            firing = if d == 0 {
                degree
            } else {
                tnorm.combine(firing, degree)
            };
            if firing == 0.0 {
                break;
            }
        }
        if firing == 0.0 {
            continue;
        }
        for (sum, &p) in sums.iter_mut().zip(row.probs()) {
            *sum += firing * p;
        }
    }
    let scores: Vec<f64> = sums.iter().zip(prior.probs()).map(|(s, p)| p * s).collect();
    GradeDistribution::normalized(cpt.child_scale().clone(), &scores)
        .map_err(|_| Error::ZeroPosterior)
}

/// Structural self-test: sums the factored joint (uniform parent marginals
/// times the table rows) over every variable assignment and checks the
/// total mass is 1. Unrepaired raw rows fail the check.
pub fn joint_factorization_check(raw_rows: &[Vec<f64>]) -> bool {
    if raw_rows.is_empty() {
        return false;
    }
    let n = raw_rows.len() as f64;
    let total: f64 = raw_rows.iter().map(|row| row.iter().sum::<f64>() / n).sum();
    (total - 1.0).abs() <= PROB_TOL
}
