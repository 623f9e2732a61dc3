//! Shared fixtures for integration tests: random datasets and independent
//! reference implementations of tree growth and split scoring.
//!
//! The references recompute every quantity from scratch on example lists,
//! sharing no code with the library's incremental statistics.

#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sslpct::dataset::{
    build_hierarchy, AttributeKind, AttributeSchema, ClassHierarchy, Dataset, Example, HierarchyShape, LabelVector,
    Role, Schema, Target, Task, Value,
};
use sslpct::induction::{Branch, InternalNode, NodeSummary, PctModel, SplitTest, TestKind, TreeNode};

/// Knobs for [`random_dataset`].
#[derive(Clone, Debug)]
pub struct Shape {
    pub n: usize,
    pub d: usize,
    pub task: Task,
    pub unlabeled: f64,
    pub missing: f64,
    pub nominal: f64,
}

const PATHS: [&str; 9] = ["a", "a/x", "a/y", "a/x/p", "b", "b/z", "b/z/q", "c", "c/w"];

pub fn random_hierarchy(rng: &mut impl Rng) -> Vec<String> {
    let mut paths: Vec<String> = Vec::new();
    for p in PATHS {
        let parent_present = match p.rfind('/') {
            Some(i) => paths.iter().any(|q| q == &p[..i]),
            None => true,
        };
        if parent_present && (paths.is_empty() || rng.random_bool(0.7)) {
            paths.push(p.to_string());
        }
    }
    paths
}

/// Small dataset with three latent clusters driving both attributes and labels.
pub fn random_dataset(rng: &mut impl Rng, shape: &Shape) -> Dataset {
    let mut attributes = Vec::new();
    let mut nominal_sizes = Vec::new();
    for j in 0..shape.d {
        let kind = if rng.random_bool(shape.nominal) {
            let m = rng.random_range(2..=4);
            nominal_sizes.push(m);
            AttributeKind::Nominal((0..m).map(|v| format!("v{v}")).collect())
        } else {
            nominal_sizes.push(0);
            AttributeKind::Numeric
        };
        attributes.push(AttributeSchema {
            name: format!("x{j}"),
            kind,
            role: Role::Descriptive,
        });
    }
    let (hierarchy, width) = match shape.task {
        Task::Mlc => {
            let t = rng.random_range(1..=4);
            for k in 0..t {
                attributes.push(AttributeSchema {
                    name: format!("y{k}"),
                    kind: AttributeKind::Nominal(vec!["0".into(), "1".into()]),
                    role: Role::Target,
                });
            }
            (None, t)
        }
        Task::Hmlc => {
            let paths = random_hierarchy(rng);
            let h = build_hierarchy(&paths, 0.75, HierarchyShape::Tree).unwrap();
            let w = h.len();
            attributes.push(AttributeSchema {
                name: "class".into(),
                kind: AttributeKind::Hierarchical(paths),
                role: Role::Target,
            });
            (Some(Arc::new(h)), w)
        }
    };
    let schema = Arc::new(Schema::new("random", shape.task, attributes).unwrap());
    let patterns: Vec<Vec<bool>> = (0..3)
        .map(|_| (0..width).map(|_| rng.random_bool(0.5)).collect())
        .collect();
    let examples = (0..shape.n)
        .map(|id| {
            let c = rng.random_range(0..3usize);
            let values = (0..shape.d)
                .map(|j| {
                    if rng.random_bool(shape.missing) {
                        return Value::Missing;
                    }
                    match nominal_sizes[j] {
                        0 => {
                            let x = c as f64 + rng.random_range(-0.8..0.8);
                            // Coarse rounding produces repeated values.
                            Value::Numeric((x * 4.0).round() / 4.0)
                        }
                        m if rng.random_bool(0.7) => Value::Nominal(c % m),
                        m => Value::Nominal(rng.random_range(0..m)),
                    }
                })
                .collect();
            let target = if rng.random_bool(shape.unlabeled) {
                Target::Unlabeled
            } else {
                let mut bits: Vec<bool> = patterns[c]
                    .iter()
                    .map(|&b| if rng.random_bool(0.15) { !b } else { b })
                    .collect();
                if let Some(h) = &hierarchy {
                    let members: Vec<usize> = (0..width).filter(|&k| bits[k]).collect();
                    bits = h.close(&members);
                }
                Target::Labeled(bits)
            };
            Example { id, values, target }
        })
        .collect();
    Dataset::new(schema, hierarchy, examples).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Plain estimators on example lists.

fn labeled<'a>(exs: &[&'a Example]) -> Vec<&'a [bool]> {
    exs.iter().filter_map(|e| e.target.labels()).collect()
}

/// Gini of label `t` over labeled examples; `None` below two.
pub fn label_gini(exs: &[&Example], t: usize) -> Option<f64> {
    let ls = labeled(exs);
    if ls.len() < 2 {
        return None;
    }
    let p = ls.iter().filter(|l| l[t]).count() as f64 / ls.len() as f64;
    Some(1.0 - p * p - (1.0 - p) * (1.0 - p))
}

/// Mean weighted squared distance to the mean class vector over `Σω`.
pub fn hmlc_variance(exs: &[&Example], weights: &[f64]) -> Option<f64> {
    let ls = labeled(exs);
    if ls.len() < 2 {
        return None;
    }
    let n = ls.len() as f64;
    let mean: Vec<f64> = (0..weights.len())
        .map(|k| ls.iter().filter(|l| l[k]).count() as f64 / n)
        .collect();
    let mut total = 0.0;
    for l in &ls {
        for k in 0..weights.len() {
            let x = if l[k] { 1.0 } else { 0.0 };
            total += weights[k] * (x - mean[k]) * (x - mean[k]);
        }
    }
    Some(total / n / weights.iter().sum::<f64>())
}

/// Missing-aware numeric variance over `n` examples with `k` known values.
pub fn numeric_term(exs: &[&Example], d: usize) -> Option<f64> {
    let ys: Vec<f64> = exs
        .iter()
        .filter_map(|e| match e.values[d] {
            Value::Numeric(x) => Some(x),
            _ => None,
        })
        .collect();
    let k = ys.len() as f64;
    let n = exs.len() as f64;
    if ys.len() < 2 {
        return None;
    }
    let s: f64 = ys.iter().sum();
    let s2: f64 = ys.iter().map(|y| y * y).sum();
    Some((((n - 1.0) / (k - 1.0) * s2 - n * (s / k) * (s / k)) / n).max(0.0))
}

pub fn nominal_term(exs: &[&Example], d: usize, m: usize) -> Option<f64> {
    let mut counts = vec![0usize; m];
    let mut k = 0usize;
    for e in exs {
        if let Value::Nominal(v) = e.values[d] {
            counts[v] += 1;
            k += 1;
        }
    }
    if k < 2 {
        return None;
    }
    Some(1.0 - counts.iter().map(|&c| (c as f64 / k as f64).powi(2)).sum::<f64>())
}

fn descriptive_term(ds: &Dataset, exs: &[&Example], d: usize) -> Option<f64> {
    match ds.schema.descriptive(d).nominal_values() {
        Some(vals) => nominal_term(exs, d, vals.len()),
        None => numeric_term(exs, d),
    }
}

fn distinct_known(ds: &Dataset, d: usize) -> usize {
    let mut seen: Vec<Value> = Vec::new();
    for e in &ds.examples {
        let v = e.values[d];
        if !v.is_missing() && !seen.contains(&v) {
            seen.push(v);
        }
    }
    seen.len()
}

// ---------------------------------------------------------------------------
// Split scoring by brute force.

/// Everything needed to score node variances with parent fallback.
pub struct Scorer<'a> {
    pub ds: &'a Dataset,
    pub w: f64,
    pub sigma: Option<Vec<f64>>,
    /// Whole-dataset denominators; 0 marks an excluded term.
    pub target_den: Vec<f64>,
    pub desc_den: Vec<f64>,
    pub weights: Vec<f64>,
}

impl<'a> Scorer<'a> {
    pub fn new(ds: &'a Dataset, w: f64, sigma: Option<Vec<f64>>) -> Self {
        let all: Vec<&Example> = ds.examples.iter().collect();
        let target_den = match ds.task() {
            Task::Mlc => (0..ds.label_width()).map(|t| label_gini(&all, t).unwrap_or(0.0)).collect(),
            Task::Hmlc => Vec::new(),
        };
        let desc_den = (0..ds.schema.n_descriptive())
            .map(|d| {
                if distinct_known(ds, d) < 2 {
                    0.0
                } else {
                    descriptive_term(ds, &all, d).unwrap_or(0.0)
                }
            })
            .collect();
        let weights = ds.hierarchy.as_ref().map(|h| h.weights().to_vec()).unwrap_or_default();
        Scorer {
            ds,
            w,
            sigma,
            target_den,
            desc_den,
            weights,
        }
    }

    pub fn is_inert(&self, d: usize) -> bool {
        self.desc_den[d] <= 0.0
    }

    /// Raw per-term estimates, undefined ones replaced from `parent` (or 0).
    pub fn terms(&self, exs: &[&Example], parent: Option<&(Vec<f64>, Vec<f64>)>) -> (Vec<f64>, Vec<f64>) {
        let target: Vec<f64> = match self.ds.task() {
            Task::Mlc => (0..self.target_den.len())
                .map(|t| label_gini(exs, t).unwrap_or_else(|| parent.map_or(0.0, |p| p.0[t])))
                .collect(),
            Task::Hmlc => vec![hmlc_variance(exs, &self.weights).unwrap_or_else(|| parent.map_or(0.0, |p| p.0[0]))],
        };
        let desc = (0..self.desc_den.len())
            .map(|d| descriptive_term(self.ds, exs, d).unwrap_or_else(|| parent.map_or(0.0, |p| p.1[d])))
            .collect();
        (target, desc)
    }

    pub fn combine(&self, terms: &(Vec<f64>, Vec<f64>)) -> f64 {
        let target = match self.ds.task() {
            Task::Hmlc => terms.0[0],
            Task::Mlc => {
                let t = self.target_den.len() as f64;
                terms
                    .0
                    .iter()
                    .zip(&self.target_den)
                    .filter(|(_, &q)| q > 0.0)
                    .map(|(v, q)| v / q)
                    .sum::<f64>()
                    / t
            }
        };
        let mut desc = 0.0;
        for (d, (&v, &q)) in terms.1.iter().zip(&self.desc_den).enumerate() {
            if q > 0.0 {
                desc += self.sigma.as_ref().map_or(1.0, |s| s[d]) * v / q;
            }
        }
        desc /= self.desc_den.len() as f64;
        self.w * target + (1.0 - self.w) * desc
    }

    /// Candidate tests in scan order: attributes ascending, then thresholds
    /// or value indices ascending.
    pub fn candidates(&self, exs: &[&Example]) -> Vec<SplitTest> {
        let mut out = Vec::new();
        for d in 0..self.ds.schema.n_descriptive() {
            if self.is_inert(d) {
                continue;
            }
            match self.ds.schema.descriptive(d).nominal_values() {
                None => {
                    let mut xs: Vec<f64> = exs
                        .iter()
                        .filter_map(|e| match e.values[d] {
                            Value::Numeric(x) => Some(x),
                            _ => None,
                        })
                        .collect();
                    xs.sort_by(f64::total_cmp);
                    xs.dedup();
                    for p in xs.windows(2) {
                        let m = (p[0] + p[1]) / 2.0;
                        let theta = if m < p[1] { m } else { p[0] };
                        out.push(SplitTest {
                            attribute: d,
                            kind: TestKind::GreaterThan(theta),
                        });
                    }
                }
                Some(vals) => {
                    let known: Vec<usize> = exs
                        .iter()
                        .filter_map(|e| match e.values[d] {
                            Value::Nominal(v) => Some(v),
                            _ => None,
                        })
                        .collect();
                    for v in 0..vals.len() {
                        let c = known.iter().filter(|&&k| k == v).count();
                        if c > 0 && c < known.len() {
                            out.push(SplitTest {
                                attribute: d,
                                kind: TestKind::Equals(v),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Children of `exs` under `test`, missing values following the side with
    /// more known values (NO on ties).
    pub fn split<'e>(&self, exs: &[&'e Example], test: &SplitTest) -> (Vec<&'e Example>, Vec<&'e Example>, Branch) {
        let (mut yes, mut no, mut missing) = (Vec::new(), Vec::new(), Vec::new());
        for &e in exs {
            match outcome(test, e.values[test.attribute]) {
                Some(true) => yes.push(e),
                Some(false) => no.push(e),
                None => missing.push(e),
            }
        }
        let fallback = if yes.len() > no.len() { Branch::Yes } else { Branch::No };
        match fallback {
            Branch::Yes => yes.extend(missing),
            Branch::No => no.extend(missing),
        }
        (yes, no, fallback)
    }

    /// Variance reduction of `test`, or `None` if a child would hold exactly
    /// one labeled example.
    pub fn score(&self, exs: &[&Example], node: &(Vec<f64>, Vec<f64>), test: &SplitTest) -> Option<f64> {
        let (yes, no, _) = self.split(exs, test);
        for child in [&yes, &no] {
            if labeled(child).len() == 1 {
                return None;
            }
        }
        let n = exs.len() as f64;
        let node_var = self.combine(node);
        let vy = self.combine(&self.terms(&yes, Some(node)));
        let vn = self.combine(&self.terms(&no, Some(node)));
        Some(node_var - yes.len() as f64 / n * vy - no.len() as f64 / n * vn)
    }

    /// Significance threshold: tiny relative to the whole-dataset variance.
    pub fn epsilon(&self) -> f64 {
        let all: Vec<&Example> = self.ds.examples.iter().collect();
        1e-12 * self.combine(&self.terms(&all, None)).max(0.0)
    }
}

pub fn outcome(test: &SplitTest, v: Value) -> Option<bool> {
    match (test.kind, v) {
        (TestKind::GreaterThan(t), Value::Numeric(x)) => Some(x > t),
        (TestKind::Equals(k), Value::Nominal(v)) => Some(v == k),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Supervised reference tree.

/// Tree grown with the target heuristic alone on fully labeled data.
pub fn reference_tree(ds: &Dataset) -> PctModel {
    assert_eq!(ds.n_unlabeled(), 0, "reference learner is supervised only");
    let scorer = Scorer::new(ds, 1.0, None);
    let eps = scorer.epsilon();
    let all: Vec<&Example> = ds.examples.iter().collect();
    let root = reference_node(&scorer, &all, eps);
    PctModel::new(root, ds.schema.clone(), ds.hierarchy.clone(), 1.0)
}

fn reference_node(scorer: &Scorer, exs: &[&Example], eps: f64) -> TreeNode {
    let ls = labeled(exs);
    let k = ls.len();
    let width = scorer.ds.label_width();
    let prototype = LabelVector(
        (0..width)
            .map(|t| ls.iter().filter(|l| l[t]).count() as f64 / k as f64)
            .collect(),
    );
    let summary = NodeSummary {
        prototype,
        n_labeled: k,
        n_unlabeled: 0,
    };
    if k < 2 {
        return TreeNode::Leaf(summary);
    }
    let node = scorer.terms(exs, None);
    let mut best: Option<(SplitTest, f64)> = None;
    for test in scorer.candidates(exs) {
        let Some(h) = scorer.score(exs, &node, &test) else { continue };
        if h > eps && best.is_none_or(|(_, b)| h > b + eps) {
            best = Some((test, h));
        }
    }
    let Some((test, _)) = best else {
        return TreeNode::Leaf(summary);
    };
    let (yes, no, fallback) = scorer.split(exs, &test);
    TreeNode::Internal(Box::new(InternalNode {
        test,
        yes: reference_node(scorer, &yes, eps),
        no: reference_node(scorer, &no, eps),
        fallback,
        summary,
    }))
}

/// Largest acceptable variance reduction over all tests at the root, with
/// the scores of every acceptable test.
pub fn exhaustive_root(scorer: &Scorer) -> Vec<(SplitTest, f64)> {
    let all: Vec<&Example> = scorer.ds.examples.iter().collect();
    let node = scorer.terms(&all, None);
    scorer
        .candidates(&all)
        .into_iter()
        .filter_map(|t| scorer.score(&all, &node, &t).map(|h| (t, h)))
        .collect()
}

pub fn hierarchy_of(ds: &Dataset) -> &ClassHierarchy {
    ds.hierarchy.as_deref().expect("HMLC dataset")
}
