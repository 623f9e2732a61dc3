use std::sync::Arc;

use crate::dataset::{ClassHierarchy, LabelVector, Schema, Task, Value};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestKind {
    /// Branch YES iff value > threshold.
    GreaterThan(f64),
    /// Branch YES iff the nominal value index equals this one.
    Equals(usize),
}

/// Binary test on one descriptive attribute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitTest {
    pub attribute: usize,
    pub kind: TestKind,
}

impl SplitTest {
    /// Outcome of the test, or `None` when the value is missing or not comparable.
    pub fn outcome(&self, value: Value) -> Option<bool> {
        match (self.kind, value) {
            (TestKind::GreaterThan(theta), Value::Numeric(x)) if !x.is_nan() => Some(x > theta),
            (TestKind::Equals(v), Value::Nominal(k)) => Some(k == v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Yes,
    No,
}

/// Counts and prediction stored with every node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSummary {
    /// Per-label (MLC) or per-class (HMLC) probabilities. Unlabeled-only
    /// leaves carry the prototype of their nearest labeled ancestor.
    pub prototype: LabelVector,
    pub n_labeled: usize,
    pub n_unlabeled: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InternalNode {
    pub test: SplitTest,
    pub yes: TreeNode,
    pub no: TreeNode,
    /// Where examples with a missing test value go: the child that received
    /// more training examples with a known value.
    pub fallback: Branch,
    pub summary: NodeSummary,
}

impl InternalNode {
    /// Branch taken by an example; missing or unknown values take the fallback.
    pub fn branch_for(&self, schema: &Schema, values: &[Value]) -> Branch {
        let d = self.test.attribute;
        match self.test.outcome(sanitize(schema, d, values[d])) {
            Some(true) => Branch::Yes,
            Some(false) => Branch::No,
            None => self.fallback,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    Internal(Box<InternalNode>),
    Leaf(NodeSummary),
}

impl TreeNode {
    pub fn summary(&self) -> &NodeSummary {
        match self {
            TreeNode::Internal(node) => &node.summary,
            TreeNode::Leaf(summary) => summary,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf(_))
    }

    pub fn size(&self) -> usize {
        match self {
            TreeNode::Leaf(_) => 1,
            TreeNode::Internal(node) => 1 + node.yes.size() + node.no.size(),
        }
    }

    pub fn leaves(&self) -> Vec<&NodeSummary> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                TreeNode::Leaf(s) => out.push(s),
                TreeNode::Internal(n) => {
                    stack.push(&n.no);
                    stack.push(&n.yes);
                }
            }
        }
        out
    }

    /// Attributes tested anywhere in the subtree, in pre-order.
    pub fn tested_attributes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if let TreeNode::Internal(n) = node {
                out.push(n.test.attribute);
                stack.push(&n.no);
                stack.push(&n.yes);
            }
        }
        out
    }
}

/// A learned predictive clustering tree.
#[derive(Clone, Debug, PartialEq)]
pub struct PctModel {
    pub root: TreeNode,
    pub schema: Arc<Schema>,
    pub hierarchy: Option<Arc<ClassHierarchy>>,
    pub w: f64,
    pub pruned: bool,
}

impl PctModel {
    pub fn new(root: TreeNode, schema: Arc<Schema>, hierarchy: Option<Arc<ClassHierarchy>>, w: f64) -> Self {
        PctModel {
            root,
            schema,
            hierarchy,
            w,
            pruned: false,
        }
    }

    pub fn task(&self) -> Task {
        self.schema.task
    }

    /// Node count.
    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn label_width(&self) -> usize {
        self.root.summary().prototype.len()
    }

    /// Leaf reached by `values` (one per descriptive attribute).
    pub fn leaf_for(&self, values: &[Value]) -> &NodeSummary {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf(summary) => return summary,
                TreeNode::Internal(n) => {
                    node = match n.branch_for(&self.schema, values) {
                        Branch::Yes => &n.yes,
                        Branch::No => &n.no,
                    };
                }
            }
        }
    }

    /// Leaf prototype for an example.
    pub fn predict(&self, values: &[Value]) -> LabelVector {
        self.leaf_for(values).prototype.clone()
    }
}

/// Nominal indices outside the attribute's value list count as missing.
fn sanitize(schema: &Schema, d: usize, value: Value) -> Value {
    match (value, schema.descriptive(d).nominal_values()) {
        (Value::Nominal(k), Some(list)) if k >= list.len() => Value::Missing,
        (Value::Nominal(_), None) => Value::Missing,
        (Value::Numeric(_), Some(_)) => Value::Missing,
        _ => value,
    }
}

/// How probability vectors are turned into label sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decision {
    /// Most probable value per MLC label; ties go to the negative value.
    Majority,
    /// Predict a label/class iff its score is strictly above the threshold.
    Threshold(f64),
}

/// Binary predictions from scores.
///
/// With a single global threshold, HMLC output is closed under ancestors
/// whenever the scores are monotone along the hierarchy.
pub fn decide_labels(scores: &LabelVector, task: Task, decision: Decision) -> Vec<bool> {
    let tau = match (decision, task) {
        (Decision::Majority, Task::Mlc) => 0.5,
        (Decision::Majority, Task::Hmlc) => 0.5,
        (Decision::Threshold(t), _) => t,
    };
    scores.0.iter().map(|&s| s > tau).collect()
}
