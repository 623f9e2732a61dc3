//! Data model for multi-label (MLC) and hierarchical multi-label (HMLC)
//! classification datasets, with ARFF-style reading and writing.
//!
//! Descriptive values are kept per example in descriptive-attribute order.
//! Targets are stored as binary vectors: one component per label for MLC,
//! one component per hierarchy class for HMLC (always closed under
//! ancestors). An example whose target fields are all missing is unlabeled.

mod arff;
mod hierarchy;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{PctError, Result};

pub use arff::{parse_dataset, write_arff, ParseConfig, TargetSpec};
pub use hierarchy::{build_hierarchy, ClassHierarchy, HierarchyShape, DEFAULT_OMEGA0};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "mlc")]
    Mlc,
    #[serde(rename = "hmlc")]
    Hmlc,
}

impl std::str::FromStr for Task {
    type Err = PctError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mlc" => Ok(Task::Mlc),
            "hmlc" => Ok(Task::Hmlc),
            other => Err(PctError::config(format!("unknown task `{other}`"))),
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Task::Mlc => "mlc",
            Task::Hmlc => "hmlc",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
    /// Class paths as declared in the header.
    Hierarchical(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Descriptive,
    Target,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttributeKind,
    pub role: Role,
}

impl AttributeSchema {
    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, AttributeKind::Numeric)
    }

    pub fn nominal_values(&self) -> Option<&[String]> {
        match &self.kind {
            AttributeKind::Nominal(values) => Some(values),
            _ => None,
        }
    }
}

/// Attribute list in file order plus the descriptive/target index maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub relation: String,
    pub task: Task,
    pub attributes: Vec<AttributeSchema>,
    descriptive: Vec<usize>,
    targets: Vec<usize>,
}

impl Schema {
    pub fn new(relation: impl Into<String>, task: Task, attributes: Vec<AttributeSchema>) -> Result<Self> {
        let descriptive: Vec<usize> = attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.role == Role::Descriptive)
            .map(|(i, _)| i)
            .collect();
        let targets: Vec<usize> = attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.role == Role::Target)
            .map(|(i, _)| i)
            .collect();
        if descriptive.is_empty() {
            return Err(PctError::config("dataset needs at least one descriptive attribute"));
        }
        if targets.is_empty() {
            return Err(PctError::config("dataset needs at least one target attribute"));
        }
        for attr in &attributes {
            if let AttributeKind::Nominal(values) = &attr.kind {
                if values.is_empty() {
                    return Err(PctError::config(format!("nominal attribute `{}` has no values", attr.name)));
                }
                let mut seen = std::collections::HashSet::new();
                for v in values {
                    if !seen.insert(v) {
                        return Err(PctError::config(format!(
                            "nominal attribute `{}` lists `{v}` twice",
                            attr.name
                        )));
                    }
                }
            }
            if matches!(attr.kind, AttributeKind::Hierarchical(_)) && attr.role == Role::Descriptive {
                return Err(PctError::config(format!(
                    "hierarchical attribute `{}` can only be a target",
                    attr.name
                )));
            }
        }
        match task {
            Task::Hmlc => {
                if targets.len() != 1 || !matches!(attributes[targets[0]].kind, AttributeKind::Hierarchical(_)) {
                    return Err(PctError::config(
                        "HMLC needs exactly one hierarchical target attribute",
                    ));
                }
            }
            Task::Mlc => {
                for &t in &targets {
                    let attr = &attributes[t];
                    let ok = match &attr.kind {
                        AttributeKind::Numeric => true,
                        AttributeKind::Nominal(values) => values.len() == 2,
                        AttributeKind::Hierarchical(_) => false,
                    };
                    if !ok {
                        return Err(PctError::config(format!(
                            "MLC target `{}` must be binary (two nominal values or numeric 0/1)",
                            attr.name
                        )));
                    }
                }
            }
        }
        Ok(Schema {
            relation: relation.into(),
            task,
            attributes,
            descriptive,
            targets,
        })
    }

    pub fn n_descriptive(&self) -> usize {
        self.descriptive.len()
    }

    /// The `i`-th descriptive attribute.
    pub fn descriptive(&self, i: usize) -> &AttributeSchema {
        &self.attributes[self.descriptive[i]]
    }

    pub fn descriptive_attributes(&self) -> impl Iterator<Item = &AttributeSchema> {
        self.descriptive.iter().map(|&i| &self.attributes[i])
    }

    pub fn target_attributes(&self) -> impl Iterator<Item = &AttributeSchema> {
        self.targets.iter().map(|&i| &self.attributes[i])
    }

    pub(crate) fn descriptive_positions(&self) -> &[usize] {
        &self.descriptive
    }

    pub(crate) fn target_positions(&self) -> &[usize] {
        &self.targets
    }
}

/// A descriptive attribute value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Missing,
    Numeric(f64),
    /// Index into the attribute's nominal value list.
    Nominal(usize),
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Target {
    /// Binary membership per label (MLC) or per class (HMLC, ancestor-closed).
    Labeled(Vec<bool>),
    Unlabeled,
}

impl Target {
    pub fn labels(&self) -> Option<&[bool]> {
        match self {
            Target::Labeled(labels) => Some(labels),
            Target::Unlabeled => None,
        }
    }

    pub fn is_labeled(&self) -> bool {
        matches!(self, Target::Labeled(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub id: usize,
    /// One value per descriptive attribute.
    pub values: Vec<Value>,
    pub target: Target,
}

/// Real-valued vector indexed by label (MLC) or class (HMLC).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelVector(pub Vec<f64>);

impl LabelVector {
    pub fn zeros(width: usize) -> Self {
        LabelVector(vec![0.0; width])
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        LabelVector(bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub schema: Arc<Schema>,
    pub hierarchy: Option<Arc<ClassHierarchy>>,
    pub examples: Vec<Example>,
}

impl Dataset {
    pub fn new(schema: Arc<Schema>, hierarchy: Option<Arc<ClassHierarchy>>, examples: Vec<Example>) -> Result<Self> {
        match (schema.task, hierarchy.is_some()) {
            (Task::Hmlc, false) => return Err(PctError::config("HMLC dataset requires a class hierarchy")),
            (Task::Mlc, true) => return Err(PctError::config("MLC dataset cannot carry a class hierarchy")),
            _ => {}
        }
        let ds = Dataset {
            schema,
            hierarchy,
            examples,
        };
        let width = ds.label_width();
        let d = ds.schema.n_descriptive();
        for e in &ds.examples {
            if e.values.len() != d {
                return Err(PctError::config(format!(
                    "example {} has {} descriptive values, expected {d}",
                    e.id,
                    e.values.len()
                )));
            }
            if let Target::Labeled(bits) = &e.target {
                if bits.len() != width {
                    return Err(PctError::config(format!(
                        "example {} has a label vector of width {}, expected {width}",
                        e.id,
                        bits.len()
                    )));
                }
            }
        }
        Ok(ds)
    }

    pub fn task(&self) -> Task {
        self.schema.task
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn n_labeled(&self) -> usize {
        self.examples.iter().filter(|e| e.target.is_labeled()).count()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.len() - self.n_labeled()
    }

    /// Width of label vectors: T labels for MLC, |C| classes for HMLC.
    pub fn label_width(&self) -> usize {
        match &self.hierarchy {
            Some(h) => h.len(),
            None => self.schema.target_positions().len(),
        }
    }

    /// Display names of label vector components.
    pub fn label_names(&self) -> Vec<String> {
        match &self.hierarchy {
            Some(h) => h.names().to_vec(),
            None => self.schema.target_attributes().map(|a| a.name.clone()).collect(),
        }
    }

    /// Positions of labeled examples.
    pub fn labeled_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.examples[i].target.is_labeled()).collect()
    }

    pub fn unlabeled_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.examples[i].target.is_labeled()).collect()
    }

    /// New dataset holding clones of the examples at `indices` (in order, repeats allowed).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: Arc::clone(&self.schema),
            hierarchy: self.hierarchy.clone(),
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
        }
    }

    /// Only the labeled examples.
    pub fn labeled_part(&self) -> Dataset {
        self.subset(&self.labeled_indices())
    }
}

/// Binary, ancestor-closed label vector of a labeled HMLC example.
pub fn encode_label_vector(example: &Example, hierarchy: &ClassHierarchy) -> Result<LabelVector> {
    match &example.target {
        Target::Unlabeled => Err(PctError::config(format!("example {} is unlabeled", example.id))),
        Target::Labeled(bits) => {
            if bits.len() != hierarchy.len() {
                return Err(PctError::config(format!(
                    "example {} has {} label components, hierarchy has {} classes",
                    example.id,
                    bits.len(),
                    hierarchy.len()
                )));
            }
            let members: Vec<usize> = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
            Ok(LabelVector::from_bits(&hierarchy.close(&members)))
        }
    }
}
