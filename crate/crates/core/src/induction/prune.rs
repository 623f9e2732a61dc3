use super::tree::{Branch, PctModel, TreeNode};
use crate::dataset::{Dataset, Task, Value};

/// Running label counts of the labeled examples reaching a node.
struct Counts {
    n: usize,
    positives: Vec<usize>,
}

/// Bottom-up pruning in the style of M5.
///
/// The error of a node as a leaf is its unnormalized target variance on the
/// labeled examples of `dataset` reaching it, inflated by `(n + 1) / (n - 1)`.
/// A subtree's error is the labeled-count weighted mean of its children's
/// errors. A subtree is replaced by a leaf when the leaf's error is not larger.
pub fn prune(model: &PctModel, dataset: &Dataset) -> PctModel {
    let weights: Option<Vec<f64>> = model.hierarchy.as_ref().map(|h| h.weights().to_vec());
    let pruner = Pruner {
        model,
        weights: weights.as_deref(),
    };
    let rows: Vec<(&[Value], &[bool])> = dataset
        .examples
        .iter()
        .filter_map(|e| e.target.labels().map(|l| (e.values.as_slice(), l)))
        .collect();
    let (root, _) = pruner.prune_node(&model.root, &rows);
    PctModel {
        root,
        pruned: true,
        ..model.clone()
    }
}

struct Pruner<'a> {
    model: &'a PctModel,
    weights: Option<&'a [f64]>,
}

impl Pruner<'_> {
    fn prune_node(&self, node: &TreeNode, rows: &[(&[Value], &[bool])]) -> (TreeNode, f64) {
        let counts = self.counts(rows);
        let leaf_error = self.leaf_error(&counts);
        let TreeNode::Internal(inner) = node else {
            return (node.clone(), leaf_error);
        };
        let (mut yes_rows, mut no_rows) = (Vec::new(), Vec::new());
        for &row in rows {
            match inner.branch_for(&self.model.schema, row.0) {
                Branch::Yes => yes_rows.push(row),
                Branch::No => no_rows.push(row),
            }
        }
        let (yes, yes_error) = self.prune_node(&inner.yes, &yes_rows);
        let (no, no_error) = self.prune_node(&inner.no, &no_rows);
        let subtree_error = if counts.n == 0 {
            0.0
        } else {
            (yes_rows.len() as f64 * yes_error + no_rows.len() as f64 * no_error) / counts.n as f64
        };
        if leaf_error <= subtree_error {
            (TreeNode::Leaf(inner.summary.clone()), leaf_error)
        } else {
            let mut kept = inner.clone();
            kept.yes = yes;
            kept.no = no;
            (TreeNode::Internal(kept), subtree_error)
        }
    }

    fn counts(&self, rows: &[(&[Value], &[bool])]) -> Counts {
        let mut positives = vec![0; self.model.label_width()];
        for (_, labels) in rows {
            for (p, &b) in positives.iter_mut().zip(labels.iter()) {
                *p += usize::from(b);
            }
        }
        Counts { n: rows.len(), positives }
    }

    fn leaf_error(&self, counts: &Counts) -> f64 {
        if counts.n <= 1 {
            return 0.0;
        }
        let n = counts.n as f64;
        let variance = match (self.model.task(), self.weights) {
            (Task::Hmlc, Some(w)) => {
                let raw: f64 = counts
                    .positives
                    .iter()
                    .zip(w)
                    .map(|(&p, &w)| {
                        let p = p as f64;
                        w * p * (n - p) / (n * n)
                    })
                    .sum();
                raw / w.iter().sum::<f64>()
            }
            _ => {
                let total: f64 = counts
                    .positives
                    .iter()
                    .map(|&p| {
                        let f = p as f64 / n;
                        1.0 - f * f - (1.0 - f) * (1.0 - f)
                    })
                    .sum();
                total / counts.positives.len() as f64
            }
        };
        variance * (n + 1.0) / (n - 1.0)
    }
}
