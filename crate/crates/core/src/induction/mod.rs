//! Predictive clustering tree induction.
//!
//! Trees are grown top-down. At each node every binary test on a non-inert
//! descriptive attribute is scored by the reduction of the combined
//! target/descriptive variance, and the best acceptable test is applied when
//! its reduction is significant. A node is only split when it holds at least
//! two labeled examples, and a child that receives labeled examples must
//! receive at least two.

mod grow;
mod prune;
mod serialize;
mod tree;

use std::collections::BTreeSet;

pub(crate) use grow::{Grower, Subspace};
pub use prune::prune;
pub use tree::{decide_labels, Branch, Decision, InternalNode, NodeSummary, PctModel, SplitTest, TestKind, TreeNode};

use crate::dataset::{Dataset, LabelVector, Value};
use crate::error::{PctError, Result};
use crate::heuristics::stats::{Columns, Stats};
use crate::heuristics::VarianceContext;

/// All candidate tests on the examples at `rows`.
///
/// Numeric attributes yield midpoints between consecutive distinct observed
/// values; nominal attributes yield one equality test per observed value.
/// Attributes with fewer than two distinct values in the subset yield nothing.
pub fn enumerate_tests(dataset: &Dataset, rows: &[usize]) -> Vec<SplitTest> {
    let mut tests = Vec::new();
    for d in 0..dataset.schema.n_descriptive() {
        let values = rows.iter().map(|&r| dataset.examples[r].values[d]);
        if dataset.schema.descriptive(d).is_numeric() {
            let mut xs: Vec<f64> = values
                .filter_map(|v| match v {
                    Value::Numeric(x) if !x.is_nan() => Some(x),
                    _ => None,
                })
                .collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            tests.extend(xs.windows(2).map(|p| SplitTest {
                attribute: d,
                kind: TestKind::GreaterThan(grow::midpoint(p[0], p[1])),
            }));
        } else {
            let seen: BTreeSet<usize> = values
                .filter_map(|v| match v {
                    Value::Nominal(k) => Some(k),
                    _ => None,
                })
                .collect();
            if seen.len() > 1 {
                tests.extend(seen.into_iter().map(|k| SplitTest {
                    attribute: d,
                    kind: TestKind::Equals(k),
                }));
            }
        }
    }
    tests
}

/// Outcome of a split search.
#[derive(Clone, Debug, PartialEq)]
pub struct BestTest {
    pub test: SplitTest,
    /// Variance reduction.
    pub h: f64,
    pub fallback: Branch,
    pub yes: Vec<usize>,
    pub no: Vec<usize>,
}

/// Best acceptable test for the node holding `rows` of `dataset`, treating
/// the node as a root (undefined per-attribute variances count as 0).
///
/// The significance threshold is relative to the combined variance of the
/// whole dataset.
pub fn best_test(dataset: &Dataset, rows: &[usize], ctx: &VarianceContext) -> Option<BestTest> {
    let cols = Columns::new(dataset);
    let all: Vec<usize> = (0..dataset.len()).collect();
    let mut grower = Grower::new(&cols, ctx, &all, None);
    let mut stats = Stats::new(&cols, ctx.w < 1.0);
    for &r in rows {
        stats.add_row(&cols, r);
    }
    if stats.n_labeled < 2 {
        return None;
    }
    let resolved = stats.resolve(&cols, ctx, None);
    let attributes: Vec<usize> = (0..cols.n_descriptive())
        .filter(|&d| !ctx.normalization.is_inert(d))
        .collect();
    let best = grower.best(rows, &stats, &resolved, &attributes)?;
    let (yes, no) = grow::partition(&cols, rows, &best);
    Some(BestTest {
        test: best.test,
        h: best.h,
        fallback: best.fallback,
        yes,
        no,
    })
}

/// Grows a tree on all examples of `dataset`.
pub fn induce(dataset: &Dataset, ctx: &VarianceContext) -> Result<PctModel> {
    let n_labeled = dataset.n_labeled();
    if n_labeled < 2 {
        return Err(PctError::NoLabeledData { found: n_labeled });
    }
    let cols = Columns::new(dataset);
    let rows: Vec<usize> = (0..dataset.len()).collect();
    let root = Grower::new(&cols, ctx, &rows, None).grow(rows);
    Ok(PctModel::new(
        root,
        dataset.schema.clone(),
        dataset.hierarchy.clone(),
        ctx.w,
    ))
}

/// Per-label relative frequencies of the labeled examples (the mean class
/// vector for HMLC). `None` when no example is labeled.
pub fn prototype(dataset: &Dataset, rows: &[usize]) -> Option<LabelVector> {
    let mut sums = vec![0.0; dataset.label_width()];
    let mut k = 0usize;
    for &r in rows {
        if let Some(bits) = dataset.examples[r].target.labels() {
            k += 1;
            for (s, &b) in sums.iter_mut().zip(bits) {
                *s += f64::from(u8::from(b));
            }
        }
    }
    (k > 0).then(|| LabelVector(sums.into_iter().map(|s| s / k as f64).collect()))
}
