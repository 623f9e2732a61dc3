use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    build_hierarchy, AttributeKind, AttributeSchema, Dataset, Example, HierarchyShape, Role, Schema, Target, Task,
    Value, DEFAULT_OMEGA0,
};
use crate::error::{PctError, Result};

/// Label sets attached to the clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterLabels {
    /// One binary vector per cluster.
    Mlc(Vec<Vec<bool>>),
    /// Every class path of a tree hierarchy, and the classes of each cluster
    /// (closed under ancestors when generated).
    Hmlc { classes: Vec<String>, sets: Vec<Vec<String>> },
}

impl ClusterLabels {
    fn n_clusters(&self) -> usize {
        match self {
            ClusterLabels::Mlc(sets) => sets.len(),
            ClusterLabels::Hmlc { sets, .. } => sets.len(),
        }
    }
}

/// Gaussian clusters with one label set each.
///
/// Cluster centers sit on the vertices of a hypercube over the informative
/// attributes, neighbouring centers `separation` standard deviations apart.
/// Every attribute has unit variance around its center; noise attributes
/// are standard normal for every cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_examples: usize,
    pub n_informative: usize,
    pub n_noise: usize,
    pub separation: f64,
    pub labels: ClusterLabels,
    /// Probability of flipping each MLC label bit.
    pub label_noise: f64,
}

impl SyntheticSpec {
    /// Two well-separated clusters labeled `(1,0)` and `(0,1)` on one attribute.
    pub fn two_clusters() -> Self {
        SyntheticSpec {
            n_examples: 1000,
            n_informative: 1,
            n_noise: 0,
            separation: 6.0,
            labels: ClusterLabels::Mlc(vec![vec![true, false], vec![false, true]]),
            label_noise: 0.0,
        }
    }

    /// Two overlapping clusters (4 standard deviations apart) among 20 noise
    /// attributes, with 15% of label bits flipped. Hard enough that a handful
    /// of labeled examples leaves room for unlabeled data to help.
    pub fn noisy_two_clusters(n_examples: usize) -> Self {
        SyntheticSpec {
            n_examples,
            n_noise: 20,
            separation: 4.0,
            label_noise: 0.15,
            ..SyntheticSpec::two_clusters()
        }
    }
}

/// Draws a dataset from `spec`; identical seeds give identical datasets.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    let k = spec.labels.n_clusters();
    if k == 0 || spec.n_informative == 0 {
        return Err(PctError::config("need at least one cluster and one informative attribute"));
    }
    if spec.n_informative < usize::BITS as usize && k > 1usize << spec.n_informative {
        return Err(PctError::config(format!(
            "{k} clusters do not fit on the corners of a {}-dimensional cube",
            spec.n_informative
        )));
    }
    if !(spec.separation >= 0.0 && spec.separation.is_finite()) {
        return Err(PctError::config("separation must be finite and non-negative"));
    }
    if !(0.0..=1.0).contains(&spec.label_noise) {
        return Err(PctError::config("label noise must lie in [0,1]"));
    }
    let n_desc = spec.n_informative + spec.n_noise;
    let mut attributes: Vec<AttributeSchema> = (0..n_desc)
        .map(|i| AttributeSchema {
            name: if i < spec.n_informative {
                format!("x{i}")
            } else {
                format!("noise{}", i - spec.n_informative)
            },
            kind: AttributeKind::Numeric,
            role: Role::Descriptive,
        })
        .collect();
    let (task, hierarchy, targets): (Task, _, Vec<Vec<bool>>) = match &spec.labels {
        ClusterLabels::Mlc(sets) => {
            let width = sets[0].len();
            if width == 0 || sets.iter().any(|s| s.len() != width) {
                return Err(PctError::config("label sets must share a non-zero width"));
            }
            attributes.extend((0..width).map(|t| AttributeSchema {
                name: format!("label{t}"),
                kind: AttributeKind::Nominal(vec!["0".into(), "1".into()]),
                role: Role::Target,
            }));
            (Task::Mlc, None, sets.clone())
        }
        ClusterLabels::Hmlc { classes, sets } => {
            let h = build_hierarchy(classes, DEFAULT_OMEGA0, HierarchyShape::Tree)?;
            let bits = sets.iter().map(|s| h.encode_paths(s)).collect::<Result<Vec<_>>>()?;
            attributes.push(AttributeSchema {
                name: "class".into(),
                kind: AttributeKind::Hierarchical(classes.clone()),
                role: Role::Target,
            });
            (Task::Hmlc, Some(Arc::new(h)), bits)
        }
    };
    let schema = Arc::new(Schema::new("synthetic", task, attributes)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let examples = (0..spec.n_examples)
        .map(|i| {
            let c = i % k;
            let values = (0..n_desc)
                .map(|j| {
                    let center = if j < spec.n_informative && j < usize::BITS as usize && (c >> j) & 1 == 1 {
                        spec.separation
                    } else {
                        0.0
                    };
                    let z: f64 = rng.sample(StandardNormal);
                    Value::Numeric(center + z)
                })
                .collect();
            let mut labels = targets[c].clone();
            if task == Task::Mlc && spec.label_noise > 0.0 {
                for b in &mut labels {
                    if rng.random::<f64>() < spec.label_noise {
                        *b = !*b;
                    }
                }
            }
            Example {
                id: i,
                values,
                target: Target::Labeled(labels),
            }
        })
        .collect();
    Dataset::new(schema, hierarchy, examples)
}
