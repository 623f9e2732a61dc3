//! Micro-averaged precision-recall curves, evaluation reports, and the
//! Wilcoxon signed-rank test.

mod wilcoxon;

pub use wilcoxon::{wilcoxon_signed_rank, Direction, WilcoxonResult};

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, LabelVector};
use crate::ensemble::Model;
use crate::error::{PctError, Result};
use crate::induction::{decide_labels, Decision};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
    /// Predictions are positive iff their score is at least this value.
    /// `None` for the anchor at recall 0.
    pub threshold: Option<f64>,
}

/// Pooled precision-recall curve, starting with an anchor at recall 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

impl PrCurve {
    /// Score values generating the operating points (anchor excluded).
    pub fn thresholds(&self) -> Vec<f64> {
        self.points.iter().filter_map(|p| p.threshold).collect()
    }

    /// Two-column CSV for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("recall,precision\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.recall, p.precision));
        }
        out
    }
}

/// Precision-recall curve with TP/FP/FN pooled over all labels and examples.
///
/// Every distinct score `s` (descending) gives one operating point, predicting
/// positive every pair scored at least `s`; equivalently, strictly above any
/// threshold between `s` and the next lower score. The curve starts with the
/// anchor `(0, precision of the first point)`.
pub fn micro_pr_curve(scores: &[LabelVector], truths: &[Vec<bool>]) -> Result<PrCurve> {
    if scores.len() != truths.len() {
        return Err(PctError::config(format!(
            "{} score vectors for {} truth vectors",
            scores.len(),
            truths.len()
        )));
    }
    let mut pairs: Vec<(f64, bool)> = Vec::new();
    for (s, t) in scores.iter().zip(truths) {
        if s.len() != t.len() {
            return Err(PctError::config(format!(
                "score vector of width {} against truth of width {}",
                s.len(),
                t.len()
            )));
        }
        pairs.extend(s.0.iter().copied().zip(t.iter().copied()));
    }
    let positives = pairs.iter().filter(|p| p.1).count();
    if positives == 0 {
        return Err(PctError::NoPositiveLabels);
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total = positives as f64;
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < pairs.len() {
        let s = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == s {
            if pairs[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(PrPoint {
            recall: tp as f64 / total,
            precision: tp as f64 / (tp + fp) as f64,
            threshold: Some(s),
        });
    }
    let anchor = PrPoint {
        recall: 0.0,
        precision: points[0].precision,
        threshold: None,
    };
    points.insert(0, anchor);
    Ok(PrCurve { points })
}

/// Trapezoidal area under the curve over recall.
pub fn auprc(curve: &PrCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].recall - w[0].recall) * (w[1].precision + w[0].precision) / 2.0)
        .sum()
}

/// Counts of one label at a fixed decision threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub auprc: f64,
    pub threshold: f64,
    pub labels: Vec<String>,
    pub counts: Vec<LabelCounts>,
    pub size: usize,
    pub seconds: f64,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str = "auprc,threshold,tp,fp,fn,size,seconds";

    /// One CSV row with counts summed over labels.
    pub fn to_csv_row(&self) -> String {
        let (tp, fp, fn_) = self
            .counts
            .iter()
            .fold((0, 0, 0), |(a, b, c), k| (a + k.tp, b + k.fp, c + k.fn_));
        format!(
            "{},{},{tp},{fp},{fn_},{},{}",
            self.auprc, self.threshold, self.size, self.seconds
        )
    }
}

/// Scores and ground truth of every labeled example in `test`.
pub fn score_dataset(model: &Model, test: &Dataset) -> (Vec<LabelVector>, Vec<Vec<bool>>) {
    test.examples
        .iter()
        .filter_map(|e| e.target.labels().map(|t| (model.predict(&e.values), t.to_vec())))
        .unzip()
}

/// AUPRC of `model` on the labeled examples of `test`.
pub fn model_auprc(model: &Model, test: &Dataset) -> Result<f64> {
    let (scores, truths) = score_dataset(model, test);
    Ok(auprc(&micro_pr_curve(&scores, &truths)?))
}

/// Full report on the labeled examples of `test`, counting at threshold `tau`.
pub fn evaluate(model: &Model, test: &Dataset, tau: f64, seconds: f64) -> Result<(EvalReport, PrCurve)> {
    let (scores, truths) = score_dataset(model, test);
    let curve = micro_pr_curve(&scores, &truths)?;
    let mut counts = vec![LabelCounts::default(); test.label_width()];
    for (s, t) in scores.iter().zip(&truths) {
        let predicted = decide_labels(s, model.task(), Decision::Threshold(tau));
        for ((c, &p), &y) in counts.iter_mut().zip(&predicted).zip(t) {
            match (p, y) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => {}
            }
        }
    }
    let report = EvalReport {
        auprc: auprc(&curve),
        threshold: tau,
        labels: test.label_names(),
        counts,
        size: model.size(),
        seconds,
    };
    Ok((report, curve))
}
