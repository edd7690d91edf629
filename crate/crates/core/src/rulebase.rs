//! Fuzzy rule base: complete enumeration of the antecedent space in
//! odometer order, consequent assignment via expert mapping, and fusion
//! of expert weights with empirical rule frequencies.
//!
//! Enumeration order is part of the external contract: rule identity is
//! positional, and every serialized table uses the same order.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::types::ScaleRef;

/// One level index per input dimension.
pub type Antecedent = Vec<usize>;

/// A fuzzy rule: antecedent tuple, consequent grade index, fused weight.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRule {
    pub antecedent: Antecedent,
    pub consequent: usize,
    pub weight: f64,
}

/// Expert-supplied rule weights and (optionally) consequent overrides,
/// keyed by antecedent tuple.
#[derive(Debug, Clone, Default)]
pub struct ExpertKnowledge {
    weights: HashMap<Antecedent, f64>,
    consequents: HashMap<Antecedent, usize>,
}

impl ExpertKnowledge {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_weight(&mut self, antecedent: Antecedent, weight: f64) -> Result<()> {
        if !weight.is_finite() || !(0.0..=1.0).contains(&weight) {
            return Err(Error::OutOfUnitRange(weight));
        }
        self.weights.insert(antecedent, weight);
        Ok(())
    }

    pub fn set_consequent(&mut self, antecedent: Antecedent, grade: usize) {
        self.consequents.insert(antecedent, grade);
    }

    pub fn weight(&self, antecedent: &[usize]) -> Option<f64> {
        self.weights.get(antecedent).copied()
    }

    pub fn consequent(&self, antecedent: &[usize]) -> Option<usize> {
        self.consequents.get(antecedent).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty() && self.consequents.is_empty()
    }
}

/// Number of distinct antecedent tuples over the given arities.
pub fn tuple_count(arities: &[usize]) -> usize {
    arities.iter().product()
}

/// Canonical linear index of a tuple: first dimension varies fastest.
pub fn tuple_to_index(tuple: &[usize], arities: &[usize]) -> Result<usize> {
    if tuple.len() != arities.len() {
        return Err(Error::BadTuple {
            tuple: tuple.to_vec(),
            reason: format!("expected {} dimensions, got {}", arities.len(), tuple.len()),
        });
    }
    let mut index = 0;
    let mut stride = 1;
    for (d, (&level, &arity)) in tuple.iter().zip(arities).enumerate() {
        if level >= arity {
            return Err(Error::BadTuple {
                tuple: tuple.to_vec(),
                reason: format!("level {level} out of range for dimension {d} (arity {arity})"),
            });
        }
        index += level * stride;
        stride *= arity;
    }
    Ok(index)
}

/// Inverse of [`tuple_to_index`].
pub fn index_to_tuple(mut index: usize, arities: &[usize]) -> Antecedent {
    let mut tuple = Vec::with_capacity(arities.len());
    for &arity in arities {
        tuple.push(index % arity);
        index /= arity;
    }
    tuple
}

/// Enumerates every antecedent tuple exactly once via increment-with-carry,
/// first dimension fastest.
pub fn enumerate_antecedents(dims: &[ScaleRef]) -> Result<Vec<Antecedent>> {
    if dims.is_empty() {
        return Err(Error::InvalidArgument(
            "rule enumeration needs at least one dimension".into(),
        ));
    }
    let arities: Vec<usize> = dims.iter().map(|d| d.arity()).collect();
    let mut out = Vec::with_capacity(tuple_count(&arities));
    let mut id = vec![0usize; dims.len()];
    loop {
        out.push(id.clone());
        let mut carry = true;
        for (digit, &arity) in id.iter_mut().zip(&arities) {
            *digit += 1;
            if *digit >= arity {
                *digit = 0;
            } else {
                carry = false;
                break;
            }
        }
        if carry {
            break;
        }
    }
    Ok(out)
}

/// Consequent grade for an antecedent: expert mapping when present,
/// otherwise the floor of the mean antecedent level index (clamped to the
/// output scale).
pub fn assign_consequent(antecedent: &[usize], kb: &ExpertKnowledge, output_arity: usize) -> usize {
    if let Some(grade) = kb.consequent(antecedent) {
        return grade.min(output_arity - 1);
    }
    let mean = antecedent.iter().sum::<usize>() as f64 / antecedent.len() as f64;
    (mean.floor() as usize).min(output_arity - 1)
}

/// Blends an expert weight with the empirical frequency:
/// `alpha * expert + (1 - alpha) * freq` when the expert covers the
/// antecedent, the raw frequency otherwise. Result clamps to [0, 1].
pub fn fuse_weight(antecedent: &[usize], kb: &ExpertKnowledge, freq: f64, alpha: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&alpha), "alpha out of range: {alpha}");
    debug_assert!((0.0..=1.0).contains(&freq), "freq out of range: {freq}");
    let w = match kb.weight(antecedent) {
        Some(expert) => alpha * expert + (1.0 - alpha) * freq,
        None => freq,
    };
    w.clamp(0.0, 1.0)
}

/// Fraction of records whose argmax level tuple equals each antecedent.
pub fn empirical_frequencies(tuples: &[Antecedent]) -> HashMap<Antecedent, f64> {
    let mut counts: HashMap<Antecedent, usize> = HashMap::new();
    for t in tuples {
        *counts.entry(t.clone()).or_insert(0) += 1;
    }
    let total = tuples.len().max(1) as f64;
    counts
        .into_iter()
        .map(|(t, c)| (t, c as f64 / total))
        .collect()
}

/// Builds the complete rule base: one rule per antecedent in enumeration
/// order, consequents and weights per [`assign_consequent`] and
/// [`fuse_weight`].
pub fn build_rulebase(
    dims: &[ScaleRef],
    output_scale: &ScaleRef,
    kb: &ExpertKnowledge,
    frequencies: &HashMap<Antecedent, f64>,
    alpha: f64,
) -> Result<Vec<FuzzyRule>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfUnitRange(alpha));
    }
    let antecedents = enumerate_antecedents(dims)?;
    let rules = antecedents
        .into_iter()
        .map(|antecedent| {
            let freq = frequencies.get(&antecedent).copied().unwrap_or(0.0);
            let consequent = assign_consequent(&antecedent, kb, output_scale.arity());
            let weight = fuse_weight(&antecedent, kb, freq, alpha);
            FuzzyRule {
                antecedent,
                consequent,
                weight,
            }
        })
        .collect();
    Ok(rules)
}

/// Renders rules in the line-oriented text format
/// `antecedent-tuple TAB consequent TAB weight`, one rule per line in
/// enumeration order. Weights print in shortest round-trip form.
pub fn write_rules(rules: &[FuzzyRule], dims: &[ScaleRef], output_scale: &ScaleRef) -> String {
    let mut out = String::new();
    for rule in rules {
        let ant = rule
            .antecedent
            .iter()
            .zip(dims)
            .map(|(&level, dim)| dim.label(level))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            ant,
            output_scale.label(rule.consequent),
            rule.weight
        ));
    }
    out
}

/// Parses the text format produced by [`write_rules`].
pub fn parse_rules(
    text: &str,
    dims: &[ScaleRef],
    output_scale: &ScaleRef,
) -> Result<Vec<FuzzyRule>> {
    let mut rules = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!(
                "rule line {}: expected 3 tab-separated fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let labels: Vec<&str> = fields[0].split(',').collect();
        if labels.len() != dims.len() {
            return Err(Error::Parse(format!(
                "rule line {}: antecedent has {} levels, expected {}",
                lineno + 1,
                labels.len(),
                dims.len()
            )));
        }
        let antecedent = labels
            .iter()
            .zip(dims)
            .map(|(label, dim)| dim.resolve(label))
            .collect::<Result<Antecedent>>()?;
        let consequent = output_scale.resolve(fields[1])?;
        let weight: f64 = fields[2].parse().map_err(|_| {
            Error::Parse(format!(
                "rule line {}: bad weight `{}`",
                lineno + 1,
                fields[2]
            ))
        })?;
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::OutOfUnitRange(weight));
        }
        rules.push(FuzzyRule {
            antecedent,
            consequent,
            weight,
        });
    }
    Ok(rules)
}
