//! Choice of the supervision weight `w` by internal cross-validation.
//!
//! Only the labeled examples are split into folds. Every fold's training set
//! also contains all unlabeled examples, so unlabeled data never appears in
//! validation. One seeded partition is reused for the whole grid.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::ensemble::LearnerSpec;
use crate::error::{PctError, Result};
use crate::evaluation::model_auprc;

/// Candidate values of `w`: sorted, unique, inside `[0, 1]`, always containing 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WGrid(Vec<f64>);

impl WGrid {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(PctError::config("w candidates must lie in [0,1]"));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        if values.last() != Some(&1.0) {
            return Err(PctError::config("the w grid must contain 1"));
        }
        Ok(WGrid(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl Default for WGrid {
    /// 0.0, 0.1, ..., 1.0
    fn default() -> Self {
        WGrid((0..=10).map(|i| f64::from(i) / 10.0).collect())
    }
}

impl TryFrom<Vec<f64>> for WGrid {
    type Error = PctError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        WGrid::new(v)
    }
}

impl From<WGrid> for Vec<f64> {
    fn from(g: WGrid) -> Self {
        g.0
    }
}

impl std::str::FromStr for WGrid {
    type Err = PctError;

    /// Comma-separated values, e.g. `0,0.5,1`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| PctError::config(format!("bad w value `{x}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        WGrid::new(values)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub chosen_w: f64,
    pub grid: Vec<f64>,
    /// Mean validation AUPRC per grid value.
    pub scores: Vec<f64>,
    pub folds: usize,
}

/// Seeded shuffle of the labeled positions, dealt round-robin into `folds` folds.
pub fn fold_assignment(dataset: &Dataset, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let mut labeled = dataset.labeled_indices();
    if folds < 2 || labeled.len() < folds {
        return Err(PctError::config(format!(
            "cross-validation needs 2 <= folds <= labeled examples (folds {folds}, labeled {})",
            labeled.len()
        )));
    }
    labeled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = vec![Vec::new(); folds];
    for (i, r) in labeled.into_iter().enumerate() {
        out[i % folds].push(r);
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

fn check_folds(dataset: &Dataset, partition: &[Vec<usize>]) -> Result<()> {
    let n_labeled = dataset.n_labeled();
    for (j, fold) in partition.iter().enumerate() {
        let remaining = n_labeled - fold.len();
        if remaining < 2 {
            return Err(PctError::TooFewLabeled { fold: j, remaining });
        }
    }
    Ok(())
}

/// Training and validation sets of fold `j`.
fn fold_sets(dataset: &Dataset, partition: &[Vec<usize>], j: usize) -> (Dataset, Dataset) {
    let mut held = vec![false; dataset.len()];
    for &r in &partition[j] {
        held[r] = true;
    }
    let train: Vec<usize> = (0..dataset.len()).filter(|&r| !held[r]).collect();
    (dataset.subset(&train), dataset.subset(&partition[j]))
}

/// AUPRC of one fold, or `None` when the fold holds no positive label.
fn fold_score(dataset: &Dataset, partition: &[Vec<usize>], j: usize, w: f64, learner: &LearnerSpec) -> Result<Option<f64>> {
    let (train, valid) = fold_sets(dataset, partition, j);
    let model = learner.fit(&train, w)?;
    match model_auprc(&model, &valid) {
        Ok(score) => Ok(Some(score)),
        Err(PctError::NoPositiveLabels) => Ok(None),
        Err(e) => Err(e),
    }
}

fn mean_score(scores: &[Option<f64>]) -> Result<f64> {
    let valid: Vec<f64> = scores.iter().flatten().copied().collect();
    if valid.is_empty() {
        return Err(PctError::NoPositiveLabels);
    }
    Ok(valid.iter().sum::<f64>() / valid.len() as f64)
}

/// Mean validation AUPRC of `learner` at weight `w`.
///
/// Folds without any positive label in validation are skipped.
pub fn cross_validate(dataset: &Dataset, w: f64, folds: usize, learner: &LearnerSpec, seed: u64) -> Result<f64> {
    let partition = fold_assignment(dataset, folds, seed)?;
    check_folds(dataset, &partition)?;
    let scores = (0..folds)
        .into_par_iter()
        .map(|j| fold_score(dataset, &partition, j, w, learner))
        .collect::<Result<Vec<_>>>()?;
    mean_score(&scores)
}

/// Index of the best score; ties go to the later (larger) grid value.
pub fn select_best(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s >= scores[best] {
            best = i;
        }
    }
    best
}

/// Grid search for `w`, all candidates scored on one fold partition.
pub fn optimize_w(dataset: &Dataset, grid: &WGrid, folds: usize, learner: &LearnerSpec, seed: u64) -> Result<TuneResult> {
    let partition = fold_assignment(dataset, folds, seed)?;
    check_folds(dataset, &partition)?;
    let ws = grid.values();
    let jobs: Vec<(usize, usize)> = (0..ws.len()).flat_map(|i| (0..folds).map(move |j| (i, j))).collect();
    let results = jobs
        .par_iter()
        .map(|&(i, j)| fold_score(dataset, &partition, j, ws[i], learner))
        .collect::<Result<Vec<_>>>()?;
    let scores = results
        .chunks(folds)
        .map(mean_score)
        .collect::<Result<Vec<f64>>>()?;
    let best = select_best(&scores);
    Ok(TuneResult {
        chosen_w: ws[best],
        grid: ws.to_vec(),
        scores,
        folds,
    })
}
