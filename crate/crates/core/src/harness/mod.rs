//! Transductive experiment protocol.
//!
//! For each labeled-set size and run, a labeled sample is drawn; all other
//! examples become unlabeled training data and, with their labels restored,
//! the shared test set. Every learner in the matrix is trained and scored on
//! that same split.

mod synthetic;

pub use synthetic::{generate_synthetic, ClusterLabels, SyntheticSpec};

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Target};
use crate::ensemble::{feature_ranking, Learner, LearnerSpec};
use crate::error::{PctError, Result};
use crate::evaluation::{model_auprc, wilcoxon_signed_rank, WilcoxonResult};
use crate::tuning::{optimize_w, WGrid};

/// Learners of the comparison matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LearnerId {
    /// Supervised tree on the labeled examples.
    #[serde(rename = "SL-PCT")]
    SlPct,
    /// Semi-supervised tree with tuned `w`.
    #[serde(rename = "SSL-PCT")]
    SslPct,
    /// Semi-supervised tree with feature weights from a supervised ranking.
    #[serde(rename = "SSL-PCT-FR")]
    SslPctFr,
    /// Supervised forest on the labeled examples.
    #[serde(rename = "CLUS-RF")]
    ClusRf,
    #[serde(rename = "SSL-RF")]
    SslRf,
    #[serde(rename = "SSL-RF-FR")]
    SslRfFr,
    /// Tree on the labeled examples whose splits also use descriptive variance, with tuned `w`.
    #[serde(rename = "SL-PCT-DT")]
    SlPctDt,
}

impl LearnerId {
    pub const ALL: [LearnerId; 7] = [
        LearnerId::SlPct,
        LearnerId::SslPct,
        LearnerId::SslPctFr,
        LearnerId::ClusRf,
        LearnerId::SslRf,
        LearnerId::SslRfFr,
        LearnerId::SlPctDt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerId::SlPct => "SL-PCT",
            LearnerId::SslPct => "SSL-PCT",
            LearnerId::SslPctFr => "SSL-PCT-FR",
            LearnerId::ClusRf => "CLUS-RF",
            LearnerId::SslRf => "SSL-RF",
            LearnerId::SslRfFr => "SSL-RF-FR",
            LearnerId::SlPctDt => "SL-PCT-DT",
        }
    }

    pub fn uses_unlabeled(self) -> bool {
        matches!(self, LearnerId::SslPct | LearnerId::SslPctFr | LearnerId::SslRf | LearnerId::SslRfFr)
    }

    pub fn tunes_w(self) -> bool {
        !matches!(self, LearnerId::SlPct | LearnerId::ClusRf)
    }

    pub fn is_forest(self) -> bool {
        matches!(self, LearnerId::ClusRf | LearnerId::SslRf | LearnerId::SslRfFr)
    }

    pub fn feature_weighted(self) -> bool {
        matches!(self, LearnerId::SslPctFr | LearnerId::SslRfFr)
    }

    fn tag(self) -> u64 {
        LearnerId::ALL.iter().position(|&l| l == self).unwrap() as u64 + 1
    }
}

impl std::fmt::Display for LearnerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LearnerId {
    type Err = PctError;

    fn from_str(s: &str) -> Result<Self> {
        LearnerId::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| PctError::config(format!("unknown learner `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub labeled_sizes: Vec<usize>,
    pub runs: usize,
    pub folds: usize,
    pub grid: WGrid,
    pub trees: usize,
    pub learners: Vec<LearnerId>,
    pub seed: u64,
    /// Worker threads for the cell pool; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            labeled_sizes: vec![50, 100, 200, 350, 500],
            runs: 10,
            folds: 3,
            grid: WGrid::default(),
            trees: 100,
            learners: LearnerId::ALL.to_vec(),
            seed: 0,
            threads: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self, dataset: &Dataset) -> Result<()> {
        if self.runs == 0 {
            return Err(PctError::config("runs must be at least 1"));
        }
        if self.learners.is_empty() || self.labeled_sizes.is_empty() {
            return Err(PctError::config("need at least one learner and one labeled-set size"));
        }
        if self.trees == 0 && self.learners.iter().any(|l| l.is_forest() || l.feature_weighted()) {
            return Err(PctError::config("forest learners need at least one tree"));
        }
        let limit = dataset.n_labeled().saturating_sub(2).min(dataset.len().saturating_sub(2));
        if let Some(&bad) = self.labeled_sizes.iter().find(|&&s| s > limit || s < 2) {
            return Err(PctError::config(format!(
                "labeled-set size {bad} must lie in [2, {limit}] for this dataset"
            )));
        }
        Ok(())
    }
}

/// One cell of the experiment matrix. Missing values mark a failed cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub learner: LearnerId,
    pub labeled_size: usize,
    pub run: usize,
    pub w: Option<f64>,
    pub auprc: Option<f64>,
    pub size: Option<usize>,
    pub seconds: f64,
    pub error: Option<String>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of seed components.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x243F_6A88_85A3_08D3, |h, &p| splitmix64(h ^ p))
}

/// Seed of the labeled sample for `(size, run)`, shared by every learner.
pub fn split_seed(master: u64, labeled_size: usize, run: usize) -> u64 {
    mix_seed(&[master, 0, labeled_size as u64, run as u64])
}

/// Seed of one learner's cell; adding learners never changes other cells.
pub fn cell_seed(master: u64, learner: LearnerId, labeled_size: usize, run: usize) -> u64 {
    mix_seed(&[master, learner.tag(), labeled_size as u64, run as u64])
}

/// Samples `labeled_size` labeled examples for training. All other examples
/// join the training set without labels; the originally labeled ones among
/// them form the test set.
pub fn transductive_split(dataset: &Dataset, labeled_size: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    let mut labeled = dataset.labeled_indices();
    if labeled_size >= labeled.len() {
        return Err(PctError::config(format!(
            "cannot sample {labeled_size} labeled examples and keep a test set from {} labeled",
            labeled.len()
        )));
    }
    labeled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut sampled = vec![false; dataset.len()];
    for &r in &labeled[..labeled_size] {
        sampled[r] = true;
    }
    let mut train = dataset.clone();
    for (e, &keep) in train.examples.iter_mut().zip(&sampled) {
        if !keep {
            e.target = Target::Unlabeled;
        }
    }
    let test_rows: Vec<usize> = (0..dataset.len())
        .filter(|&r| !sampled[r] && dataset.examples[r].target.is_labeled())
        .collect();
    Ok((train, dataset.subset(&test_rows)))
}

struct CellOutcome {
    w: f64,
    auprc: f64,
    size: usize,
}

fn run_cell(
    config: &ExperimentConfig,
    learner: LearnerId,
    train: &Dataset,
    test: &Dataset,
    seed: u64,
) -> Result<CellOutcome> {
    let labeled_only;
    let data = if learner.uses_unlabeled() {
        train
    } else {
        labeled_only = train.labeled_part();
        &labeled_only
    };
    let base = if learner.is_forest() {
        Learner::Forest {
            trees: config.trees,
            seed,
        }
    } else {
        Learner::Tree { prune: true }
    };
    let mut spec = LearnerSpec::new(base);
    if learner.feature_weighted() {
        spec = spec.with_feature_weights(feature_ranking(data, config.trees, seed)?.normalized);
    }
    let w = if learner.tunes_w() {
        optimize_w(data, &config.grid, config.folds, &spec, seed)?.chosen_w
    } else {
        1.0
    };
    let model = spec.fit(data, w)?;
    Ok(CellOutcome {
        w,
        auprc: model_auprc(&model, test)?,
        size: model.size(),
    })
}

/// Runs every (labeled size, run, learner) cell. Failures become records
/// with missing values.
pub fn run_experiment(dataset: &Dataset, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate(dataset)?;
    let run_all = || -> Result<Vec<RunRecord>> {
        let mut splits = Vec::new();
        for &size in &config.labeled_sizes {
            for run in 0..config.runs {
                splits.push((size, run, transductive_split(dataset, size, split_seed(config.seed, size, run))?));
            }
        }
        let cells: Vec<(usize, LearnerId)> = (0..splits.len())
            .flat_map(|s| config.learners.iter().map(move |&l| (s, l)))
            .collect();
        Ok(cells
            .par_iter()
            .map(|&(s, learner)| {
                let (size, run, (train, test)) = &splits[s];
                let start = Instant::now();
                let outcome = run_cell(config, learner, train, test, cell_seed(config.seed, learner, *size, *run));
                let seconds = start.elapsed().as_secs_f64();
                match outcome {
                    Ok(o) => RunRecord {
                        learner,
                        labeled_size: *size,
                        run: *run,
                        w: Some(o.w),
                        auprc: Some(o.auprc),
                        size: Some(o.size),
                        seconds,
                        error: None,
                    },
                    Err(e) => {
                        log::warn!("{learner} at {size} labeled, run {run}: {e}");
                        RunRecord {
                            learner,
                            labeled_size: *size,
                            run: *run,
                            w: None,
                            auprc: None,
                            size: None,
                            seconds,
                            error: Some(e.to_string()),
                        }
                    }
                }
            })
            .collect())
    };
    let records = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| PctError::config(e.to_string()))?
            .install(run_all)?,
        None => run_all()?,
    };
    let summary = summarize(&records, config);
    Ok(ExperimentReport { records, summary })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEntry {
    pub learner: LearnerId,
    pub labeled_size: usize,
    pub completed_runs: usize,
    pub auprc: Option<f64>,
    pub size: Option<f64>,
    pub w: Option<f64>,
}

/// Paired comparison of a learner against its baseline over runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub learner: LearnerId,
    pub baseline: LearnerId,
    pub labeled_size: usize,
    pub test: Option<WilcoxonResult>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub means: Vec<MeanEntry>,
    pub comparisons: Vec<Comparison>,
}

/// Learner/baseline pairs compared in the summary.
pub const PAIRINGS: [(LearnerId, LearnerId); 5] = [
    (LearnerId::SslPct, LearnerId::SlPct),
    (LearnerId::SslPctFr, LearnerId::SlPct),
    (LearnerId::SslRf, LearnerId::ClusRf),
    (LearnerId::SslRfFr, LearnerId::ClusRf),
    (LearnerId::SslPct, LearnerId::SlPctDt),
];

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = xs.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn summarize(records: &[RunRecord], config: &ExperimentConfig) -> Summary {
    let mut means = Vec::new();
    for &size in &config.labeled_sizes {
        for &learner in &config.learners {
            let cell: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.learner == learner && r.labeled_size == size && r.auprc.is_some())
                .collect();
            means.push(MeanEntry {
                learner,
                labeled_size: size,
                completed_runs: cell.len(),
                auprc: mean(cell.iter().filter_map(|r| r.auprc)),
                size: mean(cell.iter().filter_map(|r| r.size.map(|s| s as f64))),
                w: mean(cell.iter().filter_map(|r| r.w)),
            });
        }
    }
    let mut comparisons = Vec::new();
    for &size in &config.labeled_sizes {
        for (learner, baseline) in PAIRINGS {
            if !config.learners.contains(&learner) || !config.learners.contains(&baseline) {
                continue;
            }
            let score = |l: LearnerId, run: usize| {
                records
                    .iter()
                    .find(|r| r.learner == l && r.labeled_size == size && r.run == run)
                    .and_then(|r| r.auprc)
            };
            let (a, b): (Vec<f64>, Vec<f64>) = (0..config.runs)
                .filter_map(|run| Some((score(learner, run)?, score(baseline, run)?)))
                .unzip();
            let (test, note) = match wilcoxon_signed_rank(&a, &b) {
                Ok(t) => (Some(t), None),
                Err(e) => (None, Some(e.to_string())),
            };
            comparisons.push(Comparison {
                learner,
                baseline,
                labeled_size: size,
                test,
                note,
            });
        }
    }
    Summary { means, comparisons }
}

/// Records plus their summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub records: Vec<RunRecord>,
    pub summary: Summary,
}

fn na<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

impl ExperimentReport {
    /// One row per cell; reproducible byte for byte from the configuration.
    pub fn records_csv(&self) -> String {
        let mut out = String::from("learner,labeled_size,run,w,auprc,size\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.learner,
                r.labeled_size,
                r.run,
                na(r.w),
                na(r.auprc),
                na(r.size)
            ));
        }
        out
    }

    /// Wall-clock training time per cell.
    pub fn timings_csv(&self) -> String {
        let mut out = String::from("learner,labeled_size,run,seconds\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{},{}\n", r.learner, r.labeled_size, r.run, r.seconds));
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}
