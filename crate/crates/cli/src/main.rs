//! Command-line front end: train, predict, evaluate, tune, run experiments and
//! generate synthetic data.
//!
//! Every option can also be given in a `key=value` file passed with
//! `--config`; keys are the long flag names without dashes, and flags on the
//! command line win over the file.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use sslpct::dataset::{parse_dataset, write_arff, Dataset, ParseConfig, TargetSpec, Task};
use sslpct::ensemble::{train_feature_weighted, Learner, LearnerSpec, Model};
use sslpct::evaluation::evaluate;
use sslpct::harness::{generate_synthetic, run_experiment, ExperimentConfig, LearnerId, SyntheticSpec};
use sslpct::induction::PctModel;
use sslpct::tuning::{optimize_w, WGrid};

#[derive(Parser, Debug)]
#[command(name = "sslpct", version, about = "Semi-supervised predictive clustering trees and forests")]
struct Cli {
    /// File of `key=value` lines supplying defaults for any option.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    options: Options,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a tree or forest and write the model file.
    Train { data: Option<PathBuf> },
    /// Write per-label scores for every example.
    Predict { data: Option<PathBuf> },
    /// Report AUPRC and label counts on the labeled examples.
    Evaluate { data: Option<PathBuf> },
    /// Choose w by internal cross-validation.
    Tune { data: Option<PathBuf> },
    /// Run the learner comparison matrix.
    Experiment { data: Option<PathBuf> },
    /// Write a synthetic two-cluster dataset.
    Synth,
}

/// Options shared by all subcommands. Everything is optional here so that the
/// config file can fill the gaps.
#[derive(Args, Debug, Default)]
struct Options {
    /// Task: mlc or hmlc.
    #[arg(long, global = true)]
    task: Option<Task>,
    /// Target attributes: comma-separated names or `last:N`.
    #[arg(long, global = true)]
    targets: Option<String>,
    /// Supervision weight; when absent, chosen by cross-validation.
    #[arg(long, global = true)]
    w: Option<f64>,
    /// Comma-separated candidates for w (must include 1).
    #[arg(long = "w-grid", global = true)]
    w_grid: Option<WGrid>,
    /// Cross-validation folds for tuning w
    #[arg(long, global = true)]
    folds: Option<usize>,
    /// Trees per forest; also the size of the feature-ranking forest.
    #[arg(long, global = true)]
    trees: Option<usize>,
    /// Seed for sampling, folds and forests
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated labeled-set sizes for experiments.
    #[arg(long = "labeled-sizes", global = true)]
    labeled_sizes: Option<String>,
    /// Repetitions per labeled-set size
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Comma-separated learner names for experiments.
    #[arg(long, global = true)]
    learners: Option<String>,
    /// Output file, or directory for experiments.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Model file for predict and evaluate.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Train a forest instead of a single tree.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    forest: Option<bool>,
    /// Skip pruning of single trees.
    #[arg(long = "no-prune", global = true, num_args = 0..=1, default_missing_value = "true")]
    no_prune: Option<bool>,
    /// Weight descriptive attributes by forest importance.
    #[arg(long = "rank-features", global = true, num_args = 0..=1, default_missing_value = "true")]
    rank_features: Option<bool>,
    /// Decision threshold for label counts.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Number of synthetic examples.
    #[arg(long, global = true)]
    examples: Option<usize>,
    /// Synthetic preset: two-clusters or noisy-two-clusters.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Dataset path when not given positionally.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
}

fn fill<T: FromStr>(slot: &mut Option<T>, key: &str, file: &mut HashMap<String, String>) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let Some(raw) = file.remove(key) {
        if slot.is_none() {
            let v = raw
                .parse::<T>()
                .map_err(|e| anyhow!("config key `{key}`: {e}"))?;
            *slot = Some(v);
        }
    }
    Ok(())
}

impl Options {
    /// Fills unset options from `key=value` text.
    fn merge_file(&mut self, text: &str) -> Result<()> {
        let mut file = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key=value", i + 1))?;
            file.insert(k.trim().to_string(), v.trim().to_string());
        }
        fill(&mut self.task, "task", &mut file)?;
        fill(&mut self.targets, "targets", &mut file)?;
        fill(&mut self.w, "w", &mut file)?;
        fill(&mut self.w_grid, "w-grid", &mut file)?;
        fill(&mut self.folds, "folds", &mut file)?;
        fill(&mut self.trees, "trees", &mut file)?;
        fill(&mut self.seed, "seed", &mut file)?;
        fill(&mut self.labeled_sizes, "labeled-sizes", &mut file)?;
        fill(&mut self.runs, "runs", &mut file)?;
        fill(&mut self.learners, "learners", &mut file)?;
        fill(&mut self.out, "out", &mut file)?;
        fill(&mut self.model, "model", &mut file)?;
        fill(&mut self.forest, "forest", &mut file)?;
        fill(&mut self.no_prune, "no-prune", &mut file)?;
        fill(&mut self.rank_features, "rank-features", &mut file)?;
        fill(&mut self.threshold, "threshold", &mut file)?;
        fill(&mut self.threads, "threads", &mut file)?;
        fill(&mut self.examples, "examples", &mut file)?;
        fill(&mut self.preset, "preset", &mut file)?;
        fill(&mut self.data, "data", &mut file)?;
        if let Some(k) = file.keys().next() {
            bail!("unknown config key `{k}`");
        }
        Ok(())
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn folds(&self) -> usize {
        self.folds.unwrap_or(3)
    }

    fn trees(&self) -> usize {
        self.trees.unwrap_or(100)
    }

    fn grid(&self) -> WGrid {
        self.w_grid.clone().unwrap_or_default()
    }

    fn learner(&self) -> Learner {
        if self.forest.unwrap_or(false) {
            Learner::Forest {
                trees: self.trees(),
                seed: self.seed(),
            }
        } else {
            Learner::Tree {
                prune: !self.no_prune.unwrap_or(false),
            }
        }
    }

    fn data_path(&self, positional: Option<PathBuf>) -> Result<PathBuf> {
        positional
            .or_else(|| self.data.clone())
            .ok_or_else(|| anyhow!("no dataset given"))
    }

    fn load(&self, positional: Option<PathBuf>) -> Result<Dataset> {
        let task = self.task.ok_or_else(|| anyhow!("--task is required to read a dataset"))?;
        let targets = self
            .targets
            .as_deref()
            .ok_or_else(|| anyhow!("--targets is required to read a dataset"))?;
        let config = ParseConfig::new(task, TargetSpec::from_str(targets)?);
        read_dataset(&self.data_path(positional)?, &config)
    }

    fn load_model(&self) -> Result<Model> {
        let path = self.model.as_ref().ok_or_else(|| anyhow!("--model is required"))?;
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Model::from_text(&text).with_context(|| format!("parsing model {}", path.display()))
    }

    /// Reads a dataset laid out like the model's training data.
    fn load_for_model(&self, model: &Model, positional: Option<PathBuf>) -> Result<Dataset> {
        let tree = first_tree(model);
        let names: Vec<String> = tree.schema.target_attributes().map(|a| a.name.clone()).collect();
        let config = ParseConfig::new(tree.task(), TargetSpec::Names(names));
        let data = read_dataset(&self.data_path(positional)?, &config)?;
        let expected: Vec<&str> = tree.schema.descriptive_attributes().map(|a| a.name.as_str()).collect();
        let found: Vec<&str> = data.schema.descriptive_attributes().map(|a| a.name.as_str()).collect();
        if expected != found {
            bail!("dataset attributes do not match the model's training attributes");
        }
        Ok(data)
    }

    /// Writes `text` to `--out`, or stdout when absent.
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn first_tree(model: &Model) -> &PctModel {
    match model {
        Model::Tree(t) => t,
        Model::Forest(f) => &f.trees[0],
    }
}

fn read_dataset(path: &Path, config: &ParseConfig) -> Result<Dataset> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dataset(&text, config).with_context(|| format!("parsing {}", path.display()))
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| anyhow!("bad list item `{x}`: {e}")))
        .collect()
}

fn train(opts: &Options, data: Option<PathBuf>) -> Result<()> {
    let dataset = opts.load(data)?;
    let learner = opts.learner();
    let start = Instant::now();
    let w = match opts.w {
        Some(w) => w,
        None => {
            let spec = LearnerSpec::new(learner);
            let tuned = optimize_w(&dataset, &opts.grid(), opts.folds(), &spec, opts.seed())?;
            info!("cross-validation scores {:?}", tuned.scores);
            tuned.chosen_w
        }
    };
    let model = if opts.rank_features.unwrap_or(false) {
        train_feature_weighted(&dataset, w, learner, opts.trees(), opts.seed())?.0
    } else {
        let mut spec = LearnerSpec::new(learner);
        spec.threads = opts.threads;
        spec.fit(&dataset, w)?
    };
    let out = opts.out.as_ref().ok_or_else(|| anyhow!("--out is required for train"))?;
    fs::write(out, model.to_text()).with_context(|| format!("writing {}", out.display()))?;
    let report = serde_json::json!({
        "w": w,
        "size": model.size(),
        "labeled": dataset.n_labeled(),
        "unlabeled": dataset.n_unlabeled(),
        "seconds": start.elapsed().as_secs_f64(),
    });
    println!("{report}");
    Ok(())
}

fn predict(opts: &Options, data: Option<PathBuf>) -> Result<()> {
    let model = opts.load_model()?;
    let dataset = opts.load_for_model(&model, data)?;
    let mut out = String::from("id");
    for name in dataset.label_names() {
        out.push(',');
        out.push_str(&name);
    }
    out.push('\n');
    for e in &dataset.examples {
        let scores = model.predict(&e.values);
        out.push_str(&e.id.to_string());
        for s in scores.as_slice() {
            out.push_str(&format!(",{s}"));
        }
        out.push('\n');
    }
    opts.emit(&out)
}

fn evaluate_cmd(opts: &Options, data: Option<PathBuf>) -> Result<()> {
    let model = opts.load_model()?;
    let dataset = opts.load_for_model(&model, data)?;
    let (report, curve) = evaluate(&model, &dataset, opts.threshold.unwrap_or(0.5), 0.0)?;
    if let Some(path) = &opts.out {
        fs::write(path, curve.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn tune(opts: &Options, data: Option<PathBuf>) -> Result<()> {
    let dataset = opts.load(data)?;
    let spec = LearnerSpec::new(opts.learner());
    let result = optimize_w(&dataset, &opts.grid(), opts.folds(), &spec, opts.seed())?;
    opts.emit(&format!("{}\n", serde_json::to_string_pretty(&result)?))
}

fn experiment(opts: &Options, data: Option<PathBuf>) -> Result<()> {
    let dataset = opts.load(data)?;
    let mut config = ExperimentConfig {
        folds: opts.folds(),
        grid: opts.grid(),
        trees: opts.trees(),
        seed: opts.seed(),
        threads: opts.threads,
        ..ExperimentConfig::default()
    };
    if let Some(s) = &opts.labeled_sizes {
        config.labeled_sizes = parse_list(s)?;
    }
    if let Some(r) = opts.runs {
        config.runs = r;
    }
    if let Some(l) = &opts.learners {
        config.learners = parse_list::<LearnerId>(l)?;
    }
    let dir = opts.out.as_ref().ok_or_else(|| anyhow!("--out <dir> is required for experiment"))?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let report = run_experiment(&dataset, &config)?;
    fs::write(dir.join("records.csv"), report.records_csv())?;
    fs::write(dir.join("timings.csv"), report.timings_csv())?;
    fs::write(dir.join("summary.json"), report.summary_json())?;
    let failed = report.records.iter().filter(|r| r.auprc.is_none()).count();
    info!("{} cells, {failed} failed", report.records.len());
    Ok(())
}

fn synth(opts: &Options) -> Result<()> {
    let n = opts.examples.unwrap_or(1000);
    let spec = match opts.preset.as_deref().unwrap_or("two-clusters") {
        "two-clusters" => SyntheticSpec {
            n_examples: n,
            ..SyntheticSpec::two_clusters()
        },
        "noisy-two-clusters" => SyntheticSpec::noisy_two_clusters(n),
        other => bail!("unknown preset `{other}`"),
    };
    let dataset = generate_synthetic(&spec, opts.seed())?;
    opts.emit(&write_arff(&dataset))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut opts = cli.options;
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        opts.merge_file(&text)?;
    }
    if let Some(t) = opts.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match cli.command {
        Command::Train { data } => train(&opts, data),
        Command::Predict { data } => predict(&opts, data),
        Command::Evaluate { data } => evaluate_cmd(&opts, data),
        Command::Tune { data } => tune(&opts, data),
        Command::Experiment { data } => experiment(&opts, data),
        Command::Synth => synth(&opts),
    }
}
