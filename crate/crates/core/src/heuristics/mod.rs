//! Variance and Gini estimators used to score splits.
//!
//! The split heuristic mixes the variance of the target space with the
//! variance of the descriptive space:
//!
//! `combined = w * target + (1 - w) * descriptive`
//!
//! Every per-attribute estimate is divided by the same estimate computed on
//! the whole training set, so each attribute contributes on the same scale.
//! Estimators that cannot be evaluated (fewer than two known values) return
//! `None`; callers substitute the parent node's value.

pub(crate) mod stats;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, ClassHierarchy, Dataset, Example, Schema, Task, Value};
use crate::error::{PctError, Result};

/// Numeric variance over the `k` known values among `n` examples.
///
/// `((n-1)/(k-1) * Σy² - n * (Σy/k)²) / n`, which is the ordinary biased
/// variance when nothing is missing. `None` when `k <= 1`.
pub fn missing_aware_variance(n: f64, k: f64, sum: f64, sum_sq: f64) -> Option<f64> {
    if k <= 1.0 {
        return None;
    }
    let mean = sum / k;
    let v = ((n - 1.0) / (k - 1.0) * sum_sq - n * mean * mean) / n;
    Some(v.max(0.0))
}

/// `1 - Σ (c_j / k)²` over class counts of the `k` known values. `None` when `k <= 1`.
pub fn gini_from_counts<I>(counts: I, k: f64) -> Option<f64>
where
    I: IntoIterator<Item = f64>,
{
    if k <= 1.0 {
        return None;
    }
    let s: f64 = counts.into_iter().map(|c| (c / k) * (c / k)).sum();
    Some((1.0 - s).max(0.0))
}

/// Selects an attribute for the generic estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttributeRef {
    /// Index among descriptive attributes.
    Descriptive(usize),
    /// Index of an MLC label.
    Label(usize),
}

/// Gini index of a nominal descriptive attribute or an MLC label over `examples`.
///
/// Labels are treated as two-valued attributes that are missing on unlabeled
/// examples. Numeric descriptive attributes yield `None`.
pub fn gini(examples: &[&Example], schema: &Schema, attribute: AttributeRef) -> Option<f64> {
    match attribute {
        AttributeRef::Descriptive(d) => {
            let n_values = schema.descriptive(d).nominal_values()?.len();
            let mut counts = vec![0f64; n_values];
            let mut k = 0.0;
            for e in examples {
                if let Value::Nominal(v) = e.values[d] {
                    counts[v] += 1.0;
                    k += 1.0;
                }
            }
            gini_from_counts(counts, k)
        }
        AttributeRef::Label(t) => {
            let mut pos = 0.0;
            let mut k = 0.0;
            for e in examples {
                if let Some(bits) = e.target.labels() {
                    k += 1.0;
                    if bits[t] {
                        pos += 1.0;
                    }
                }
            }
            gini_from_counts([k - pos, pos], k)
        }
    }
}

/// Missing-aware variance of numeric descriptive attribute `d` over `examples`.
pub fn numeric_variance(examples: &[&Example], d: usize) -> Option<f64> {
    let (mut k, mut sum, mut sum_sq) = (0.0, 0.0, 0.0);
    for e in examples {
        if let Value::Numeric(x) = e.values[d] {
            k += 1.0;
            sum += x;
            sum_sq += x * x;
        }
    }
    missing_aware_variance(examples.len() as f64, k, sum, sum_sq)
}

/// Weighted squared distance between two class vectors.
pub fn weighted_sq_distance(a: &[f64], b: &[f64], weights: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(weights)
        .map(|((x, y), w)| w * (x - y) * (x - y))
        .sum()
}

/// Weighted Euclidean distance between two class vectors.
pub fn weighted_distance(a: &[f64], b: &[f64], weights: &[f64]) -> f64 {
    weighted_sq_distance(a, b, weights).sqrt()
}

/// Per-attribute whole-training-set estimates used as denominators.
///
/// A denominator of 0 marks an inert attribute: fewer than two distinct known
/// values. Inert attributes contribute nothing and are never tested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub descriptive: Vec<f64>,
    /// One entry per MLC label; empty for HMLC, whose target variance is
    /// already scaled by the total class weight.
    pub targets: Vec<f64>,
}

impl Normalization {
    pub fn is_inert(&self, d: usize) -> bool {
        self.descriptive[d] <= 0.0
    }

    /// Denominators of 1 everywhere, for evaluating raw estimates.
    pub fn unit(n_descriptive: usize, n_targets: usize) -> Self {
        Normalization {
            descriptive: vec![1.0; n_descriptive],
            targets: vec![1.0; n_targets],
        }
    }
}

fn distinct_known(examples: &[Example], d: usize) -> bool {
    let mut first: Option<Value> = None;
    for e in examples {
        let v = e.values[d];
        if v.is_missing() {
            continue;
        }
        match first {
            None => first = Some(v),
            Some(f) if f != v => return true,
            _ => {}
        }
    }
    false
}

/// Whole-dataset estimates for every descriptive attribute and MLC label.
pub fn normalization_stats(dataset: &Dataset) -> Normalization {
    let refs: Vec<&Example> = dataset.examples.iter().collect();
    let schema = &dataset.schema;
    let descriptive = (0..schema.n_descriptive())
        .map(|d| {
            if !distinct_known(&dataset.examples, d) {
                return 0.0;
            }
            let v = match schema.descriptive(d).kind {
                AttributeKind::Numeric => numeric_variance(&refs, d),
                _ => gini(&refs, schema, AttributeRef::Descriptive(d)),
            };
            v.unwrap_or(0.0)
        })
        .collect();
    let targets = match dataset.task() {
        Task::Hmlc => Vec::new(),
        Task::Mlc => (0..dataset.label_width())
            .map(|t| gini(&refs, schema, AttributeRef::Label(t)).unwrap_or(0.0))
            .collect(),
    };
    Normalization { descriptive, targets }
}

/// Everything the split heuristic needs besides the examples themselves.
#[derive(Clone, Debug)]
pub struct VarianceContext {
    pub w: f64,
    pub task: Task,
    pub normalization: Normalization,
    /// Descriptive attribute weights in `[0, 1]` with maximum 1.
    pub feature_weights: Option<Vec<f64>>,
    pub hierarchy: Option<Arc<ClassHierarchy>>,
}

impl VarianceContext {
    /// Context for learning on `dataset`, normalized on that same dataset.
    pub fn new(dataset: &Dataset, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(PctError::config(format!("w must lie in [0,1], got {w}")));
        }
        Ok(VarianceContext {
            w,
            task: dataset.task(),
            normalization: normalization_stats(dataset),
            feature_weights: None,
            hierarchy: dataset.hierarchy.clone(),
        })
    }

    pub fn with_w(mut self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(PctError::config(format!("w must lie in [0,1], got {w}")));
        }
        self.w = w;
        Ok(self)
    }

    pub fn with_feature_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.normalization.descriptive.len() {
            return Err(PctError::config(format!(
                "{} feature weights for {} descriptive attributes",
                weights.len(),
                self.normalization.descriptive.len()
            )));
        }
        if weights.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(PctError::config("feature weights must lie in [0,1]"));
        }
        let max = weights.iter().cloned().fold(0.0, f64::max);
        if max != 1.0 {
            return Err(PctError::config("the largest feature weight must be 1"));
        }
        self.feature_weights = Some(weights);
        Ok(self)
    }

    pub fn n_descriptive(&self) -> usize {
        self.normalization.descriptive.len()
    }

    fn feature_weight(&self, d: usize) -> f64 {
        self.feature_weights.as_ref().map_or(1.0, |s| s[d])
    }

    /// Number of target terms: T labels, or 1 for a class hierarchy.
    pub(crate) fn n_target_terms(&self) -> usize {
        match self.task {
            Task::Mlc => self.normalization.targets.len(),
            Task::Hmlc => 1,
        }
    }

    /// Normalized target variance from per-term estimates.
    pub(crate) fn target_from_terms(&self, terms: &[f64]) -> f64 {
        match self.task {
            Task::Hmlc => terms[0],
            Task::Mlc => {
                let den = &self.normalization.targets;
                let sum: f64 = terms
                    .iter()
                    .zip(den)
                    .filter(|(_, &q)| q > 0.0)
                    .map(|(v, q)| v / q)
                    .sum();
                sum / den.len() as f64
            }
        }
    }

    /// Normalized (and optionally weighted) descriptive variance from per-attribute estimates.
    pub(crate) fn descriptive_from_terms(&self, terms: &[f64]) -> f64 {
        let den = &self.normalization.descriptive;
        let mut sum = 0.0;
        for (d, (&v, &q)) in terms.iter().zip(den).enumerate() {
            if q > 0.0 {
                sum += self.feature_weight(d) * v / q;
            }
        }
        sum / den.len() as f64
    }

    pub(crate) fn mix(&self, target: f64, descriptive: f64) -> f64 {
        self.w * target + (1.0 - self.w) * descriptive
    }
}

/// Target, descriptive, and combined variance of one example set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub target: f64,
    pub descriptive: f64,
    pub combined: f64,
}

/// Mean Gini index over MLC labels, each divided by its denominator.
///
/// Only labeled examples carry label values. `None` when fewer than two
/// labeled examples are present.
pub fn target_variance_mlc(examples: &[&Example], schema: &Schema, ctx: &VarianceContext) -> Option<f64> {
    let terms: Vec<Option<f64>> = (0..ctx.normalization.targets.len())
        .map(|t| gini(examples, schema, AttributeRef::Label(t)))
        .collect();
    if terms.iter().all(Option::is_none) {
        return None;
    }
    let terms: Vec<f64> = terms.into_iter().map(|t| t.unwrap_or(0.0)).collect();
    Some(ctx.target_from_terms(&terms))
}

/// Mean weighted squared distance of labeled class vectors to their mean,
/// divided by the total class weight. `None` with fewer than two labeled examples.
pub fn target_variance_hmlc(examples: &[&Example], hierarchy: &ClassHierarchy) -> Option<f64> {
    let vectors: Vec<Vec<f64>> = examples
        .iter()
        .filter_map(|e| e.target.labels())
        .map(|bits| bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
        .collect();
    if vectors.len() <= 1 {
        return None;
    }
    let width = hierarchy.len();
    let n = vectors.len() as f64;
    let mut mean = vec![0.0; width];
    for v in &vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let weights = hierarchy.weights();
    let raw: f64 = vectors.iter().map(|v| weighted_sq_distance(v, &mean, weights)).sum::<f64>() / n;
    let total_weight: f64 = weights.iter().sum();
    Some(raw / total_weight)
}

/// Target variance for either task.
pub fn target_variance(examples: &[&Example], schema: &Schema, ctx: &VarianceContext) -> Option<f64> {
    match (ctx.task, &ctx.hierarchy) {
        (Task::Hmlc, Some(h)) => target_variance_hmlc(examples, h),
        _ => target_variance_mlc(examples, schema, ctx),
    }
}

/// Per-descriptive-attribute estimates (`None` where fewer than two values are known).
pub fn descriptive_terms(examples: &[&Example], schema: &Schema) -> Vec<Option<f64>> {
    (0..schema.n_descriptive())
        .map(|d| match schema.descriptive(d).kind {
            AttributeKind::Numeric => numeric_variance(examples, d),
            _ => gini(examples, schema, AttributeRef::Descriptive(d)),
        })
        .collect()
}

/// Normalized descriptive variance; attributes without an estimate contribute 0.
pub fn descriptive_variance(examples: &[&Example], schema: &Schema, ctx: &VarianceContext) -> f64 {
    let terms: Vec<f64> = descriptive_terms(examples, schema)
        .into_iter()
        .map(|t| t.unwrap_or(0.0))
        .collect();
    ctx.descriptive_from_terms(&terms)
}

/// `w * target + (1 - w) * descriptive`; `None` when the target variance is undefined.
pub fn combined_variance(examples: &[&Example], schema: &Schema, ctx: &VarianceContext) -> Option<VarianceReport> {
    let target = target_variance(examples, schema, ctx)?;
    let descriptive = descriptive_variance(examples, schema, ctx);
    Some(VarianceReport {
        target,
        descriptive,
        combined: ctx.mix(target, descriptive),
    })
}
