//! Classification metrics: confusion matrix, accuracy, per-class and
//! averaged precision/recall/F1, and classification error probability.

use crate::error::{Error, Result};
use crate::types::ScaleRef;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub label: String,
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    #[default]
    Macro,
    Micro,
}

/// Per-class and aggregate metrics plus the confusion matrix
/// (rows = truth, columns = prediction).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub cep: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: Vec<Vec<usize>>,
    pub labels: Vec<String>,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Computes the report. Division by an empty denominator follows the
/// 0/0 = 0 convention; `cep` is defined so `accuracy + cep == 1` exactly.
pub fn compute_metrics(
    predictions: &[usize],
    truths: &[usize],
    scale: &ScaleRef,
) -> Result<EvalReport> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch(predictions.len(), truths.len()));
    }
    if predictions.is_empty() {
        return Err(Error::InvalidArgument("no predictions to score".into()));
    }
    let k = scale.arity();
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &t) in predictions.iter().zip(truths) {
        if p >= k || t >= k {
            return Err(Error::InvalidArgument(format!(
                "class index out of range: pred {p}, truth {t}, arity {k}"
            )));
        }
        confusion[t][p] += 1;
    }

    let total = predictions.len() as f64;
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let accuracy = correct as f64 / total;
    let cep = 1.0 - accuracy;

    let mut per_class = Vec::with_capacity(k);
    for (c, truth_row) in confusion.iter().enumerate() {
        let tp = truth_row[c] as f64;
        let support: usize = truth_row.iter().sum();
        let predicted: usize = confusion.iter().map(|row| row[c]).sum();
        let precision = ratio(tp, predicted as f64);
        let recall = ratio(tp, support as f64);
        let f1 = ratio(2.0 * precision * recall, precision + recall);
        per_class.push(ClassMetrics {
            label: scale.label(c).to_string(),
            support,
            precision,
            recall,
            f1,
        });
    }

    let kf = k as f64;
    let macro_precision = per_class.iter().map(|m| m.precision).sum::<f64>() / kf;
    let macro_recall = per_class.iter().map(|m| m.recall).sum::<f64>() / kf;
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / kf;

    Ok(EvalReport {
        accuracy,
        cep,
        macro_precision,
        macro_recall,
        macro_f1,
        per_class,
        confusion,
        labels: scale.labels().to_vec(),
    })
}

impl EvalReport {
    /// Precision, recall, F1 under the chosen averaging mode. Micro
    /// averaging collapses to accuracy for single-label classification.
    pub fn averaged(&self, mode: Averaging) -> (f64, f64, f64) {
        match mode {
            Averaging::Macro => (self.macro_precision, self.macro_recall, self.macro_f1),
            Averaging::Micro => (self.accuracy, self.accuracy, self.accuracy),
        }
    }

    /// Structured text rendering of the report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("accuracy\t{:.4}\n", self.accuracy));
        out.push_str(&format!("cep\t{:.4}\n", self.cep));
        out.push_str(&format!("macro_precision\t{:.4}\n", self.macro_precision));
        out.push_str(&format!("macro_recall\t{:.4}\n", self.macro_recall));
        out.push_str(&format!("macro_f1\t{:.4}\n", self.macro_f1));
        out.push_str("class\tsupport\tprecision\trecall\tf1\n");
        for m in &self.per_class {
            out.push_str(&format!(
                "{}\t{}\t{:.4}\t{:.4}\t{:.4}\n",
                m.label, m.support, m.precision, m.recall, m.f1
            ));
        }
        out.push_str(&format!(
            "confusion (rows=truth)\t{}\n",
            self.labels.join("\t")
        ));
        for (c, row) in self.confusion.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|n| n.to_string()).collect();
            out.push_str(&format!("{}\t{}\n", self.labels[c], cells.join("\t")));
        }
        out
    }
}
