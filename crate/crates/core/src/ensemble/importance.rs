use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forest::ForestModel;
use crate::dataset::{Dataset, Value};
use crate::error::{PctError, Result};
use crate::induction::{decide_labels, Decision, PctModel};

/// Permutation importance of each descriptive attribute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    /// Mean increase of out-of-bag error when the attribute is permuted.
    pub raw: Vec<f64>,
    /// Raw scores clamped at 0 and divided by their maximum.
    pub normalized: Vec<f64>,
}

impl FeatureImportance {
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let max = raw.iter().fold(0.0f64, |m, &r| m.max(r));
        // Without any positive score there is nothing to rank: keep all attributes.
        let normalized = if max > 0.0 {
            raw.iter().map(|&r| r.max(0.0) / max).collect()
        } else {
            vec![1.0; raw.len()]
        };
        FeatureImportance { raw, normalized }
    }

    /// CSV with columns `attribute,raw,sigma`.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("attribute,raw,sigma\n");
        for ((name, r), s) in names.iter().zip(&self.raw).zip(&self.normalized) {
            out.push_str(&format!("{name},{r},{s}\n"));
        }
        out
    }
}

/// Fraction of wrong label decisions of `tree` over `rows`, with one value replaced.
fn error_rate(tree: &PctModel, dataset: &Dataset, rows: &[usize], replaced: Option<(usize, &[Value])>) -> f64 {
    let mut wrong = 0usize;
    let mut total = 0usize;
    let mut scratch: Vec<Value> = Vec::new();
    for (j, &r) in rows.iter().enumerate() {
        let e = &dataset.examples[r];
        let truth = e.target.labels().expect("rows are labeled");
        let values = match replaced {
            Some((d, column)) => {
                scratch.clone_from(&e.values);
                scratch[d] = column[j];
                &scratch[..]
            }
            None => &e.values[..],
        };
        let predicted = decide_labels(&tree.leaf_for(values).prototype, tree.task(), Decision::Majority);
        wrong += predicted.iter().zip(truth).filter(|(p, t)| p != t).count();
        total += truth.len();
    }
    wrong as f64 / total as f64
}

/// Out-of-bag permutation importance on the labeled examples of the
/// forest's training set.
///
/// For every tree and attribute, the attribute's values are shuffled among
/// the tree's labeled out-of-bag examples and the rise in error (1 minus
/// micro-averaged per-label accuracy at the majority decision) is recorded.
/// Trees without labeled out-of-bag examples are skipped.
pub fn oob_importance(forest: &ForestModel, dataset: &Dataset) -> Result<FeatureImportance> {
    let d = dataset.schema.n_descriptive();
    let per_tree: Vec<Option<Vec<f64>>> = forest
        .trees
        .par_iter()
        .zip(&forest.oob)
        .enumerate()
        .map(|(t, (tree, oob))| {
            let rows: Vec<usize> = oob
                .iter()
                .copied()
                .filter(|&r| r < dataset.len() && dataset.examples[r].target.is_labeled())
                .collect();
            if rows.is_empty() {
                return None;
            }
            let used = tree.root.tested_attributes();
            let baseline = error_rate(tree, dataset, &rows, None);
            let mut rng = ChaCha8Rng::seed_from_u64(permutation_seed(forest.seed));
            rng.set_stream(t as u64);
            let mut deltas = vec![0.0; d];
            for (a, delta) in deltas.iter_mut().enumerate() {
                if !used.contains(&a) {
                    continue;
                }
                let mut column: Vec<Value> = rows.iter().map(|&r| dataset.examples[r].values[a]).collect();
                column.shuffle(&mut rng);
                *delta = error_rate(tree, dataset, &rows, Some((a, &column))) - baseline;
            }
            Some(deltas)
        })
        .collect();
    let scored: Vec<&Vec<f64>> = per_tree.iter().flatten().collect();
    if scored.is_empty() {
        return Err(PctError::EmptyOob);
    }
    let mut raw = vec![0.0; d];
    for deltas in &scored {
        for (r, x) in raw.iter_mut().zip(deltas.iter()) {
            *r += x;
        }
    }
    let k = scored.len() as f64;
    raw.iter_mut().for_each(|r| *r /= k);
    Ok(FeatureImportance::from_raw(raw))
}

/// Seed of the permutation streams, kept apart from the tree-growing streams.
fn permutation_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}
