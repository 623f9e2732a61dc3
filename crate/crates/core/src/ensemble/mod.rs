//! Semi-supervised random forests, permutation feature importance, and the
//! learner abstraction shared by tuning and experiments.

mod forest;
mod importance;

pub use forest::{
    stratified_bootstrap, subspace_size, train_forest, train_forest_with, vote, ForestModel, ForestOptions,
};
pub use importance::{oob_importance, FeatureImportance};

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, LabelVector, Task, Value};
use crate::error::{PctError, Result};
use crate::heuristics::VarianceContext;
use crate::induction::{induce, prune, PctModel};

/// A trained single tree or forest.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Tree(PctModel),
    Forest(ForestModel),
}

impl Model {
    pub fn predict(&self, values: &[Value]) -> LabelVector {
        match self {
            Model::Tree(t) => t.predict(values),
            Model::Forest(f) => f.vote(values),
        }
    }

    /// Node count (summed over trees for a forest).
    pub fn size(&self) -> usize {
        match self {
            Model::Tree(t) => t.size(),
            Model::Forest(f) => f.size(),
        }
    }

    pub fn task(&self) -> Task {
        match self {
            Model::Tree(t) => t.task(),
            Model::Forest(f) => f.trees[0].task(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Model::Tree(t) => t.to_text(),
            Model::Forest(f) => f.to_text(),
        }
    }

    /// Reads either a tree or a forest.
    pub fn from_text(text: &str) -> Result<Self> {
        if text.trim_start().starts_with("pct-forest") {
            ForestModel::from_text(text).map(Model::Forest)
        } else {
            PctModel::from_text(text).map(Model::Tree)
        }
    }
}

/// Base learner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Learner {
    /// Single tree, optionally pruned on its training data.
    Tree { prune: bool },
    /// Forest of unpruned trees.
    Forest { trees: usize, seed: u64 },
}

/// A base learner plus optional descriptive attribute weights.
#[derive(Clone, Debug, PartialEq)]
pub struct LearnerSpec {
    pub learner: Learner,
    pub feature_weights: Option<Vec<f64>>,
    /// Worker threads for forests; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl LearnerSpec {
    pub fn new(learner: Learner) -> Self {
        LearnerSpec {
            learner,
            feature_weights: None,
            threads: None,
        }
    }

    pub fn with_feature_weights(mut self, weights: Vec<f64>) -> Self {
        self.feature_weights = Some(weights);
        self
    }

    /// Context normalized on `dataset` at weight `w`.
    pub fn context(&self, dataset: &Dataset, w: f64) -> Result<VarianceContext> {
        let ctx = VarianceContext::new(dataset, w)?;
        match &self.feature_weights {
            Some(s) => ctx.with_feature_weights(s.clone()),
            None => Ok(ctx),
        }
    }

    /// Trains on all examples of `dataset` at weight `w`.
    pub fn fit(&self, dataset: &Dataset, w: f64) -> Result<Model> {
        let ctx = self.context(dataset, w)?;
        match self.learner {
            Learner::Tree { prune: do_prune } => {
                let tree = induce(dataset, &ctx)?;
                Ok(Model::Tree(if do_prune { prune(&tree, dataset) } else { tree }))
            }
            Learner::Forest { trees, seed } => {
                let options = ForestOptions {
                    threads: self.threads,
                    ..ForestOptions::new(trees, seed)
                };
                train_forest_with(dataset, &ctx, &options).map(Model::Forest)
            }
        }
    }
}

/// Importance ranking from a supervised forest grown on the labeled examples only.
pub fn feature_ranking(dataset: &Dataset, trees: usize, seed: u64) -> Result<FeatureImportance> {
    let labeled = dataset.labeled_part();
    let ctx = VarianceContext::new(&labeled, 1.0)?;
    let forest = train_forest(&labeled, &ctx, trees, seed)?;
    oob_importance(&forest, &labeled)
}

/// Two-stage learning: rank attributes with a supervised forest on the labeled
/// examples, then train `learner` on all of `dataset` with those weights.
pub fn train_feature_weighted(
    dataset: &Dataset,
    w: f64,
    learner: Learner,
    ranking_trees: usize,
    seed: u64,
) -> Result<(Model, FeatureImportance)> {
    if ranking_trees == 0 {
        return Err(PctError::config("feature ranking needs at least one tree"));
    }
    let importance = feature_ranking(dataset, ranking_trees, seed)?;
    let model = LearnerSpec::new(learner)
        .with_feature_weights(importance.normalized.clone())
        .fit(dataset, w)?;
    Ok((model, importance))
}
