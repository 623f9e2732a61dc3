//! Top-down induction: split search and recursive growth.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

use super::tree::{Branch, InternalNode, NodeSummary, SplitTest, TestKind, TreeNode};
use crate::dataset::LabelVector;
use crate::heuristics::stats::{Column, Columns, Resolved, Stats};
use crate::heuristics::VarianceContext;

/// Relative size of the smallest variance reduction that counts.
pub(crate) const RELATIVE_EPSILON: f64 = 1e-12;

/// Chosen test with its score and the fallback branch for missing values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Candidate {
    pub test: SplitTest,
    pub h: f64,
    pub fallback: Branch,
}

/// Per-node random attribute sampling used by forests.
pub(crate) struct Subspace {
    pub rng: ChaCha8Rng,
    pub size: usize,
}

pub(crate) struct Grower<'a> {
    cols: &'a Columns,
    ctx: &'a VarianceContext,
    track_descriptive: bool,
    epsilon: f64,
    attributes: Vec<usize>,
    subspace: Option<Subspace>,
    sorted: Vec<(f64, usize)>,
    known: Stats,
    missing: Stats,
    left: Stats,
    right: Stats,
    yes: Stats,
    no: Stats,
    per_value: Vec<Stats>,
}

impl<'a> Grower<'a> {
    /// `root_rows` fixes the significance threshold; it is the multiset the tree is grown on.
    pub fn new(cols: &'a Columns, ctx: &'a VarianceContext, root_rows: &[usize], subspace: Option<Subspace>) -> Self {
        // With w = 1 the descriptive part is multiplied by zero, so skip it.
        let track_descriptive = ctx.w < 1.0;
        let attributes = (0..cols.n_descriptive())
            .filter(|&d| !ctx.normalization.is_inert(d))
            .collect();
        let empty = Stats::new(cols, track_descriptive);
        let mut grower = Grower {
            cols,
            ctx,
            track_descriptive,
            epsilon: 0.0,
            attributes,
            subspace,
            sorted: Vec::new(),
            known: empty.clone(),
            missing: empty.clone(),
            left: empty.clone(),
            right: empty.clone(),
            yes: empty.clone(),
            no: empty,
            per_value: Vec::new(),
        };
        let root = grower.stats_of(root_rows);
        let root_var = root.resolve(cols, ctx, None).combined(ctx);
        grower.epsilon = RELATIVE_EPSILON * root_var.max(0.0);
        grower
    }

    fn stats_of(&self, rows: &[usize]) -> Stats {
        let mut s = Stats::new(self.cols, self.track_descriptive);
        for &r in rows {
            s.add_row(self.cols, r);
        }
        s
    }

    pub fn grow(&mut self, rows: Vec<usize>) -> TreeNode {
        self.grow_node(rows, None, None)
    }

    fn grow_node(&mut self, rows: Vec<usize>, parent: Option<&Resolved>, parent_proto: Option<&LabelVector>) -> TreeNode {
        let stats = self.stats_of(&rows);
        let summary = summarize(&stats, parent_proto);
        if stats.n_labeled < 2 {
            return TreeNode::Leaf(summary);
        }
        let resolved = stats.resolve(self.cols, self.ctx, parent);
        let attributes = self.draw_attributes();
        let Some(best) = self.best(&rows, &stats, &resolved, &attributes) else {
            return TreeNode::Leaf(summary);
        };
        let (yes_rows, no_rows) = partition(self.cols, &rows, &best);
        drop(rows);
        let yes = self.grow_node(yes_rows, Some(&resolved), Some(&summary.prototype));
        let no = self.grow_node(no_rows, Some(&resolved), Some(&summary.prototype));
        TreeNode::Internal(Box::new(InternalNode {
            test: best.test,
            yes,
            no,
            fallback: best.fallback,
            summary,
        }))
    }

    fn draw_attributes(&mut self) -> Vec<usize> {
        match &mut self.subspace {
            Some(sub) if sub.size < self.attributes.len() => {
                let mut picked: Vec<usize> = sample(&mut sub.rng, self.attributes.len(), sub.size)
                    .into_iter()
                    .map(|i| self.attributes[i])
                    .collect();
                picked.sort_unstable();
                picked
            }
            _ => self.attributes.clone(),
        }
    }

    /// Best acceptable test over `attributes` for the node holding `rows`.
    pub fn best(&mut self, rows: &[usize], node: &Stats, resolved: &Resolved, attributes: &[usize]) -> Option<Candidate> {
        let node_var = resolved.combined(self.ctx);
        let mut best: Option<Candidate> = None;
        let cols = self.cols;
        for &d in attributes {
            match &cols.columns[d] {
                Column::Numeric(values) => self.sweep_numeric(d, values, rows, node, resolved, node_var, &mut best),
                Column::Nominal { values, n_values } => {
                    self.sweep_nominal(d, values, *n_values, rows, node, resolved, node_var, &mut best)
                }
            }
        }
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn sweep_numeric(
        &mut self,
        d: usize,
        values: &[f64],
        rows: &[usize],
        node: &Stats,
        resolved: &Resolved,
        node_var: f64,
        best: &mut Option<Candidate>,
    ) {
        self.sorted.clear();
        self.missing.clear();
        for &r in rows {
            let x = values[r];
            if x.is_nan() {
                self.missing.add_row(self.cols, r);
            } else {
                self.sorted.push((x, r));
            }
        }
        if self.sorted.len() < 2 {
            return;
        }
        self.sorted
            .sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if self.sorted[0].0 == self.sorted[self.sorted.len() - 1].0 {
            return;
        }
        self.known.set_difference(node, &self.missing);
        self.left.clear();
        let sorted = std::mem::take(&mut self.sorted);
        for i in 0..sorted.len() - 1 {
            self.left.add_row(self.cols, sorted[i].1);
            let (a, b) = (sorted[i].0, sorted[i + 1].0);
            if a == b {
                continue;
            }
            self.right.set_difference(&self.known, &self.left);
            let test = SplitTest {
                attribute: d,
                kind: TestKind::GreaterThan(midpoint(a, b)),
            };
            self.consider(test, node, resolved, node_var, best, Side::LeftIsNo);
        }
        self.sorted = sorted;
    }

    #[allow(clippy::too_many_arguments)]
    fn sweep_nominal(
        &mut self,
        d: usize,
        values: &[u32],
        n_values: usize,
        rows: &[usize],
        node: &Stats,
        resolved: &Resolved,
        node_var: f64,
        best: &mut Option<Candidate>,
    ) {
        while self.per_value.len() < n_values {
            self.per_value.push(Stats::new(self.cols, self.track_descriptive));
        }
        for s in &mut self.per_value[..n_values] {
            s.clear();
        }
        self.missing.clear();
        for &r in rows {
            let v = values[r];
            if v == u32::MAX {
                self.missing.add_row(self.cols, r);
            } else {
                self.per_value[v as usize].add_row(self.cols, r);
            }
        }
        self.known.set_difference(node, &self.missing);
        for v in 0..n_values {
            let n_v = self.per_value[v].n;
            if n_v == 0 || n_v == self.known.n {
                continue;
            }
            self.left.copy_from(&self.per_value[v]);
            self.right.set_difference(&self.known, &self.left);
            let test = SplitTest {
                attribute: d,
                kind: TestKind::Equals(v),
            };
            self.consider(test, node, resolved, node_var, best, Side::LeftIsYes);
        }
    }

    /// Scores the split currently held in `left`/`right` (known values only).
    fn consider(
        &mut self,
        test: SplitTest,
        node: &Stats,
        resolved: &Resolved,
        node_var: f64,
        best: &mut Option<Candidate>,
        side: Side,
    ) {
        let (yes_known, no_known) = match side {
            Side::LeftIsNo => (&self.right, &self.left),
            Side::LeftIsYes => (&self.left, &self.right),
        };
        let fallback = if yes_known.n > no_known.n { Branch::Yes } else { Branch::No };
        let (yes, no) = if self.missing.n == 0 {
            (yes_known, no_known)
        } else {
            self.yes.copy_from(yes_known);
            self.no.copy_from(no_known);
            match fallback {
                Branch::Yes => self.yes.add(&self.missing),
                Branch::No => self.no.add(&self.missing),
            }
            (&self.yes, &self.no)
        };
        if !acceptable(yes.n_labeled) || !acceptable(no.n_labeled) {
            return;
        }
        let n = f64::from(node.n);
        let h = node_var
            - f64::from(yes.n) / n * yes.combined(self.cols, self.ctx, resolved)
            - f64::from(no.n) / n * no.combined(self.cols, self.ctx, resolved);
        if h <= self.epsilon {
            return;
        }
        if best.is_none_or(|b| h > b.h + self.epsilon) {
            *best = Some(Candidate { test, h, fallback });
        }
    }
}

#[derive(Clone, Copy)]
enum Side {
    LeftIsNo,
    LeftIsYes,
}

fn acceptable(n_labeled: u32) -> bool {
    n_labeled == 0 || n_labeled >= 2
}

/// Threshold strictly between `a < b`, so that `a` goes NO and `b` goes YES.
pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    let m = (a + b) / 2.0;
    if m < b && m.is_finite() {
        m
    } else {
        a
    }
}

pub(crate) fn summarize(stats: &Stats, parent_proto: Option<&LabelVector>) -> NodeSummary {
    let prototype = if stats.n_labeled > 0 {
        let k = f64::from(stats.n_labeled);
        LabelVector(stats.positives.iter().map(|&p| f64::from(p) / k).collect())
    } else {
        parent_proto
            .cloned()
            .unwrap_or_else(|| LabelVector::zeros(stats.positives.len()))
    };
    NodeSummary {
        prototype,
        n_labeled: stats.n_labeled as usize,
        n_unlabeled: (stats.n - stats.n_labeled) as usize,
    }
}

/// Rows going to (YES, NO) under `candidate`, missing values following the fallback.
pub(crate) fn partition(cols: &Columns, rows: &[usize], candidate: &Candidate) -> (Vec<usize>, Vec<usize>) {
    let mut yes = Vec::new();
    let mut no = Vec::new();
    let d = candidate.test.attribute;
    for &r in rows {
        let outcome = match (&cols.columns[d], candidate.test.kind) {
            (Column::Numeric(v), TestKind::GreaterThan(theta)) => (!v[r].is_nan()).then(|| v[r] > theta),
            (Column::Nominal { values, .. }, TestKind::Equals(k)) => {
                (values[r] != u32::MAX).then(|| values[r] as usize == k)
            }
            _ => None,
        };
        let go_yes = outcome.unwrap_or(candidate.fallback == Branch::Yes);
        if go_yes {
            yes.push(r);
        } else {
            no.push(r);
        }
    }
    (yes, no)
}
