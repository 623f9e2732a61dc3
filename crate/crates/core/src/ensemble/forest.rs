use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{Dataset, LabelVector, Value};
use crate::error::{PctError, Result};
use crate::heuristics::stats::Columns;
use crate::heuristics::VarianceContext;
use crate::induction::{Grower, PctModel, Subspace};

/// Attributes examined per node: `floor(log2 D) + 1`.
pub fn subspace_size(n_descriptive: usize) -> usize {
    if n_descriptive == 0 {
        return 0;
    }
    n_descriptive.ilog2() as usize + 1
}

/// Bootstrap sample drawn separately from the labeled and unlabeled examples.
///
/// Returns positions into `dataset`: exactly N_l labeled draws followed by
/// exactly N_u unlabeled draws, both with replacement.
pub fn stratified_bootstrap<R: Rng + ?Sized>(dataset: &Dataset, rng: &mut R) -> Vec<usize> {
    let labeled = dataset.labeled_indices();
    let unlabeled = dataset.unlabeled_indices();
    let mut rows = Vec::with_capacity(dataset.len());
    for stratum in [&labeled, &unlabeled] {
        if stratum.is_empty() {
            continue;
        }
        rows.extend((0..stratum.len()).map(|_| stratum[rng.random_range(0..stratum.len())]));
    }
    rows
}

/// Knobs for forest training.
#[derive(Clone, Debug, PartialEq)]
pub struct ForestOptions {
    pub trees: usize,
    pub seed: u64,
    /// Draw a stratified bootstrap per tree. Disabling it trains every tree on all examples.
    pub bootstrap: bool,
    /// Attributes sampled per node; `None` uses `floor(log2 D) + 1`.
    pub subspace: Option<usize>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl ForestOptions {
    pub fn new(trees: usize, seed: u64) -> Self {
        ForestOptions {
            trees,
            seed,
            bootstrap: true,
            subspace: None,
            threads: None,
        }
    }
}

/// Unpruned trees, each grown on its own bootstrap sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<PctModel>,
    pub seed: u64,
    pub subspace_size: usize,
    /// Per tree, the sorted positions of training examples absent from its bootstrap sample.
    pub oob: Vec<Vec<usize>>,
}

pub(crate) fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// Trains a forest of `trees` trees with default options.
pub fn train_forest(dataset: &Dataset, ctx: &VarianceContext, trees: usize, seed: u64) -> Result<ForestModel> {
    train_forest_with(dataset, ctx, &ForestOptions::new(trees, seed))
}

/// Trains a forest. Tree `i` depends only on the data, the context, the seed and `i`.
pub fn train_forest_with(dataset: &Dataset, ctx: &VarianceContext, options: &ForestOptions) -> Result<ForestModel> {
    let n_labeled = dataset.n_labeled();
    if n_labeled < 2 {
        return Err(PctError::NoLabeledData { found: n_labeled });
    }
    if options.trees == 0 {
        return Err(PctError::config("a forest needs at least one tree"));
    }
    let size = options
        .subspace
        .unwrap_or_else(|| subspace_size(dataset.schema.n_descriptive()))
        .max(1);
    let cols = Columns::new(dataset);
    let grow_one = |i: usize| -> (PctModel, Vec<usize>) {
        let mut rng = tree_rng(options.seed, i);
        let rows: Vec<usize> = if options.bootstrap {
            stratified_bootstrap(dataset, &mut rng)
        } else {
            (0..dataset.len()).collect()
        };
        let mut in_bag = vec![false; dataset.len()];
        for &r in &rows {
            in_bag[r] = true;
        }
        let oob = (0..dataset.len()).filter(|&r| !in_bag[r]).collect();
        let subspace = Subspace { rng, size };
        let root = Grower::new(&cols, ctx, &rows, Some(subspace)).grow(rows);
        let model = PctModel::new(root, dataset.schema.clone(), dataset.hierarchy.clone(), ctx.w);
        (model, oob)
    };
    let train_all = || -> Vec<(PctModel, Vec<usize>)> { (0..options.trees).into_par_iter().map(grow_one).collect() };
    let grown = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| PctError::config(e.to_string()))?
            .install(train_all),
        None => train_all(),
    };
    let (trees, oob) = grown.into_iter().unzip();
    Ok(ForestModel {
        trees,
        seed: options.seed,
        subspace_size: size,
        oob,
    })
}

impl ForestModel {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Total node count over all trees.
    pub fn size(&self) -> usize {
        self.trees.iter().map(PctModel::size).sum()
    }

    /// Component-wise mean of the trees' leaf prototypes.
    pub fn vote(&self, values: &[Value]) -> LabelVector {
        let width = self.trees[0].label_width();
        let mut sum = vec![0.0; width];
        for tree in &self.trees {
            for (s, p) in sum.iter_mut().zip(&tree.leaf_for(values).prototype.0) {
                *s += p;
            }
        }
        let k = self.trees.len() as f64;
        LabelVector(sum.into_iter().map(|s| s / k).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "pct-forest 1").unwrap();
        writeln!(out, "trees {}", self.trees.len()).unwrap();
        writeln!(out, "seed {}", self.seed).unwrap();
        writeln!(out, "subspace {}", self.subspace_size).unwrap();
        for (tree, oob) in self.trees.iter().zip(&self.oob) {
            let ids: Vec<String> = oob.iter().map(usize::to_string).collect();
            writeln!(out, "oob {}", ids.join(",")).unwrap();
            out.push_str(&tree.to_text());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, message: &str| PctError::InvalidModel {
            line,
            message: message.to_string(),
        };
        let lines: Vec<&str> = text.lines().collect();
        let header = |i: usize, key: &str| -> Result<&str> {
            lines
                .get(i)
                .and_then(|l| l.strip_prefix(key))
                .and_then(|l| l.strip_prefix(' '))
                .ok_or_else(|| bad(i + 1, &format!("expected `{key} ...`")))
        };
        if lines.first().map(|l| l.trim()) != Some("pct-forest 1") {
            return Err(bad(1, "expected `pct-forest 1`"));
        }
        let k: usize = header(1, "trees")?.parse().map_err(|_| bad(2, "bad tree count"))?;
        let seed: u64 = header(2, "seed")?.parse().map_err(|_| bad(3, "bad seed"))?;
        let subspace_size: usize = header(3, "subspace")?.parse().map_err(|_| bad(4, "bad subspace size"))?;
        let starts: Vec<usize> = (4..lines.len()).filter(|&i| lines[i].starts_with("oob")).collect();
        if starts.len() != k {
            return Err(bad(2, &format!("declared {k} trees, found {}", starts.len())));
        }
        let mut trees = Vec::with_capacity(k);
        let mut oob = Vec::with_capacity(k);
        for (j, &s) in starts.iter().enumerate() {
            let end = starts.get(j + 1).copied().unwrap_or(lines.len());
            let ids = lines[s].trim_start_matches("oob").trim();
            let ids: Vec<usize> = ids
                .split(',')
                .filter(|x| !x.is_empty())
                .map(|x| x.parse().map_err(|_| bad(s + 1, "bad out-of-bag id")))
                .collect::<Result<_>>()?;
            oob.push(ids);
            let body = lines[s + 1..end].join("\n");
            let tree = PctModel::from_text(&body).map_err(|e| match e {
                PctError::InvalidModel { line, message } => PctError::InvalidModel {
                    line: line + s + 1,
                    message,
                },
                other => other,
            })?;
            trees.push(tree);
        }
        if trees.is_empty() {
            return Err(bad(2, "a forest needs at least one tree"));
        }
        Ok(ForestModel {
            trees,
            seed,
            subspace_size,
            oob,
        })
    }
}

/// Mean of per-tree predictions; see [`ForestModel::vote`].
pub fn vote(forest: &ForestModel, values: &[Value]) -> LabelVector {
    forest.vote(values)
}
