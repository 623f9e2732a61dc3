//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any gating criterion fails.
//!
//! The Emotions check runs only when `SSLPCT_EMOTIONS_ARFF` points to the
//! dataset (six targets in the last six columns); it never gates.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;

use common::{random_dataset, reference_tree, rng, Scorer, Shape};
use sslpct::dataset::{
    build_hierarchy, parse_dataset, AttributeKind, AttributeSchema, Dataset, Example, HierarchyShape, LabelVector,
    ParseConfig, Role, Schema, Target, TargetSpec, Task, Value,
};
use sslpct::ensemble::{stratified_bootstrap, subspace_size, train_forest, train_forest_with, ForestOptions, Learner, LearnerSpec};
use sslpct::evaluation::{auprc, micro_pr_curve, wilcoxon_signed_rank, Direction};
use sslpct::harness::{
    generate_synthetic, run_experiment, transductive_split, ClusterLabels, ExperimentConfig, LearnerId, SyntheticSpec,
};
use sslpct::heuristics::{gini, numeric_variance, target_variance_hmlc, weighted_sq_distance, AttributeRef, VarianceContext};
use sslpct::induction::{best_test, decide_labels, induce, Decision, PctModel, TreeNode};
use sslpct::tuning::{cross_validate, optimize_w, WGrid};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit_secs,
        format!("took {:.1}s, limit {limit_secs}s", elapsed.as_secs_f64()),
    )
}

// 1 -------------------------------------------------------------------------

fn supervised_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let mut nodes = 0;
    for i in 0..50 {
        let shape = Shape {
            n: r.random_range(10..=200),
            d: r.random_range(1..=8),
            task: if i % 2 == 0 { Task::Mlc } else { Task::Hmlc },
            unlabeled: 0.0,
            missing: if i % 3 == 0 { 0.0 } else { 0.1 },
            nominal: 0.3,
        };
        let ds = random_dataset(&mut r, &shape);
        let ctx = VarianceContext::new(&ds, 1.0).map_err(|e| e.to_string())?;
        let ours = induce(&ds, &ctx).map_err(|e| e.to_string())?;
        let reference = reference_tree(&ds);
        nodes += ours.size();
        check(
            ours.to_text() == reference.to_text(),
            format!("dataset {i} ({:?}, n={}, d={}): trees differ", shape.task, shape.n, shape.d),
        )?;
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "50/50 trees identical ({nodes} nodes in total) in {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

// 2 -------------------------------------------------------------------------

fn split_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(202);
    let mut splits = 0;
    for i in 0..1000 {
        let shape = Shape {
            n: r.random_range(4..=64),
            d: r.random_range(1..=4),
            task: if i % 3 == 0 { Task::Hmlc } else { Task::Mlc },
            unlabeled: r.random_range(0.0..0.7),
            missing: r.random_range(0.0..0.2),
            nominal: 0.3,
        };
        let ds = random_dataset(&mut r, &shape);
        if ds.n_labeled() < 2 {
            continue;
        }
        let w = f64::from(r.random_range(0..=10u8)) / 10.0;
        let sigma = if r.random_bool(0.3) {
            let mut s: Vec<f64> = (0..shape.d).map(|_| r.random_range(0.0..1.0)).collect();
            let k = r.random_range(0..shape.d);
            s[k] = 1.0;
            Some(s)
        } else {
            None
        };
        let mut ctx = VarianceContext::new(&ds, w).map_err(|e| e.to_string())?;
        if let Some(s) = &sigma {
            ctx = ctx.with_feature_weights(s.clone()).map_err(|e| e.to_string())?;
        }
        let scorer = Scorer::new(&ds, w, sigma);
        let scored = common::exhaustive_root(&scorer);
        let eps = scorer.epsilon();
        let max = scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let rows: Vec<usize> = (0..ds.len()).collect();
        match best_test(&ds, &rows, &ctx) {
            Some(b) => {
                splits += 1;
                check((b.h - max).abs() <= 1e-9, format!("instance {i}: h {} vs oracle max {max}", b.h))?;
                let own = scored
                    .iter()
                    .find(|(t, _)| *t == b.test)
                    .ok_or(format!("instance {i}: chosen test not acceptable to the oracle"))?;
                check((own.1 - b.h).abs() <= 1e-9, format!("instance {i}: chosen test rescored to {}", own.1))?;
            }
            None => check(
                max.is_nan() || max <= eps + 1e-9,
                format!("instance {i}: no split chosen but oracle finds h={max}"),
            )?,
        }
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!("1000 instances ({splits} with a split) in {:.2}s", start.elapsed().as_secs_f64()))
}

// 3 -------------------------------------------------------------------------

fn one_attribute(kind: AttributeKind, values: Vec<Value>) -> Dataset {
    let schema = Schema::new(
        "unit",
        Task::Mlc,
        vec![
            AttributeSchema {
                name: "x".into(),
                kind,
                role: Role::Descriptive,
            },
            AttributeSchema {
                name: "y".into(),
                kind: AttributeKind::Nominal(vec!["0".into(), "1".into()]),
                role: Role::Target,
            },
        ],
    )
    .unwrap();
    let examples = values
        .into_iter()
        .enumerate()
        .map(|(id, v)| Example {
            id,
            values: vec![v],
            target: Target::Unlabeled,
        })
        .collect();
    Dataset::new(Arc::new(schema), None, examples).unwrap()
}

fn heuristic_values() -> Outcome {
    let tol = 1e-9;
    let ds = one_attribute(
        AttributeKind::Numeric,
        vec![Value::Numeric(1.0), Value::Numeric(2.0), Value::Numeric(3.0), Value::Missing],
    );
    let refs: Vec<&Example> = ds.examples.iter().collect();
    let var = numeric_variance(&refs, 0).ok_or("numeric variance undefined")?;
    check((var - 1.25).abs() < tol, format!("numeric variance {var}, expected 1.25"))?;

    let (a, b) = (Value::Nominal(0), Value::Nominal(1));
    let ds = one_attribute(
        AttributeKind::Nominal(vec!["a".into(), "b".into()]),
        vec![a, a, b, Value::Missing, Value::Missing],
    );
    let refs: Vec<&Example> = ds.examples.iter().collect();
    let g = gini(&refs, &ds.schema, AttributeRef::Descriptive(0)).ok_or("gini undefined")?;
    check((g - 4.0 / 9.0).abs() < tol, format!("gini {g}, expected 4/9"))?;

    let h = build_hierarchy(&["a", "a/b"], 0.75, HierarchyShape::Tree).map_err(|e| e.to_string())?;
    let w = h.weights();
    check((w[0] - 0.75).abs() < tol && (w[1] - 0.5625).abs() < tol, format!("tree weights {w:?}"))?;
    let d2 = weighted_sq_distance(&[1.0, 0.0], &[0.0, 0.0], w);
    check((d2 - 0.75).abs() < tol, format!("squared distance {d2}, expected 0.75"))?;

    let examples: Vec<Example> = [vec![true, false], vec![true, true]]
        .into_iter()
        .enumerate()
        .map(|(id, bits)| Example {
            id,
            values: vec![],
            target: Target::Labeled(bits),
        })
        .collect();
    let refs: Vec<&Example> = examples.iter().collect();
    let v = target_variance_hmlc(&refs, &h).ok_or("hierarchical variance undefined")?;
    check((v - 0.140625 / 1.3125).abs() < tol, format!("hierarchical variance {v}"))?;
    check((v - 0.1071428571).abs() < 1e-10, format!("hierarchical variance {v}"))?;

    let dag = build_hierarchy(&["a/c", "b/d/c"], 0.75, HierarchyShape::Dag).map_err(|e| e.to_string())?;
    let c = dag.class_index("c").map_err(|e| e.to_string())?;
    let wc = dag.weight(c);
    check((wc - 0.4921875).abs() < tol, format!("DAG weight {wc}, expected 0.4921875"))?;
    Ok("1.25, 4/9, d²=0.75, 0.1071428571, 0.4921875 all within 1e-9".into())
}

// 4 -------------------------------------------------------------------------

fn monotone(p: &LabelVector, ds: &Dataset) -> bool {
    let h = common::hierarchy_of(ds);
    (0..h.len()).all(|c| h.parents(c).iter().all(|&q| p.0[c] <= p.0[q]))
}

fn closed_decisions(p: &LabelVector, ds: &Dataset) -> bool {
    let h = common::hierarchy_of(ds);
    [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .all(|&tau| h.is_closed(&decide_labels(p, Task::Hmlc, Decision::Threshold(tau))))
}

fn leaves(node: &TreeNode) -> Vec<&LabelVector> {
    node.leaves().into_iter().map(|s| &s.prototype).collect()
}

fn hierarchy_constraint() -> Outcome {
    let mut r = rng(404);
    let mut checked = 0;
    for i in 0..100 {
        let shape = Shape {
            n: r.random_range(20..=120),
            d: r.random_range(1..=5),
            task: Task::Hmlc,
            unlabeled: r.random_range(0.0..0.8),
            missing: 0.05,
            nominal: 0.3,
        };
        let ds = random_dataset(&mut r, &shape);
        if ds.n_labeled() < 2 {
            continue;
        }
        let w = f64::from(r.random_range(0..=10u8)) / 10.0;
        let ctx = VarianceContext::new(&ds, w).map_err(|e| e.to_string())?;
        let mut trees: Vec<PctModel> = Vec::new();
        let forest = if i % 2 == 0 {
            trees.push(induce(&ds, &ctx).map_err(|e| e.to_string())?);
            None
        } else {
            let f = train_forest(&ds, &ctx, 5, i).map_err(|e| e.to_string())?;
            trees.extend(f.trees.iter().cloned());
            Some(f)
        };
        for t in &trees {
            for p in leaves(&t.root) {
                check(monotone(p, &ds), format!("model {i}: non-monotone leaf {p:?}"))?;
                check(closed_decisions(p, &ds), format!("model {i}: open decision from {p:?}"))?;
            }
        }
        if let Some(f) = &forest {
            for e in &ds.examples {
                let v = f.vote(&e.values);
                check(monotone(&v, &ds) && closed_decisions(&v, &ds), format!("forest {i}: open vote {v:?}"))?;
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} HMLC models, all leaves monotone and decisions ancestor-closed"))
}

// 5 -------------------------------------------------------------------------

fn bootstrap_strata() -> Outcome {
    let spec = SyntheticSpec {
        n_examples: 100,
        ..SyntheticSpec::two_clusters()
    };
    let ds = generate_synthetic(&spec, 5).map_err(|e| e.to_string())?;
    let (ds, _) = transductive_split(&ds, 10, 5).map_err(|e| e.to_string())?;
    check(ds.n_labeled() == 10 && ds.n_unlabeled() == 90, "fixture is not 10/90")?;
    let mut r = rng(505);
    for b in 0..10_000 {
        let rows = stratified_bootstrap(&ds, &mut r);
        let labeled = rows.iter().filter(|&&i| ds.examples[i].target.is_labeled()).count();
        check(
            rows.len() == 100 && labeled == 10,
            format!("bootstrap {b}: {labeled} labeled of {}", rows.len()),
        )?;
    }
    Ok("10000 bootstraps, every one 10 labeled / 90 unlabeled".into())
}

// 6 -------------------------------------------------------------------------

fn safeguard() -> Outcome {
    let tree = LearnerSpec::new(Learner::Tree { prune: true });
    let grid = WGrid::default();
    let mut moved = 0;
    for run in 0..200u64 {
        let spec = SyntheticSpec {
            separation: (run % 5) as f64,
            ..SyntheticSpec::noisy_two_clusters(90)
        };
        let ds = generate_synthetic(&spec, run).map_err(|e| e.to_string())?;
        let (train, _) = transductive_split(&ds, 15, run).map_err(|e| e.to_string())?;
        let tuned = optimize_w(&train, &grid, 3, &tree, run).map_err(|e| e.to_string())?;
        let at_one = cross_validate(&train, 1.0, 3, &tree, run).map_err(|e| e.to_string())?;
        let at_chosen = cross_validate(&train, tuned.chosen_w, 3, &tree, run).map_err(|e| e.to_string())?;
        check(
            at_chosen >= at_one,
            format!("run {run}: chosen w={} scores {at_chosen} < {at_one} at w=1", tuned.chosen_w),
        )?;
        if tuned.chosen_w < 1.0 {
            moved += 1;
        }
    }
    Ok(format!("200 tuned runs, chosen w never below w=1 on CV ({moved} chose w<1)"))
}

// 7 -------------------------------------------------------------------------

/// Pooled curve computed threshold by threshold.
fn brute_curve(scores: &[Vec<f64>], truth: &[Vec<bool>]) -> Vec<(f64, f64)> {
    let mut all: Vec<f64> = scores.iter().flatten().copied().collect();
    all.sort_by(|a, b| b.total_cmp(a));
    all.dedup();
    let positives = truth.iter().flatten().filter(|&&t| t).count() as f64;
    let mut pts = Vec::new();
    for &s in &all {
        let (mut tp, mut fp) = (0.0, 0.0);
        for (row, trow) in scores.iter().zip(truth) {
            for (&x, &t) in row.iter().zip(trow) {
                if x >= s {
                    if t {
                        tp += 1.0;
                    } else {
                        fp += 1.0;
                    }
                }
            }
        }
        pts.push((tp / positives, tp / (tp + fp)));
    }
    pts.insert(0, (0.0, pts[0].1));
    pts
}

fn auprc_correctness() -> Outcome {
    let tol = 1e-9;
    let truth = vec![vec![true, false], vec![false, true], vec![true, true], vec![false, false]];
    let perfect: Vec<LabelVector> = truth
        .iter()
        .map(|t| LabelVector(t.iter().map(|&b| if b { 0.9 } else { 0.1 }).collect()))
        .collect();
    let a = auprc(&micro_pr_curve(&perfect, &truth).map_err(|e| e.to_string())?);
    check((a - 1.0).abs() < tol, format!("perfect classifier AUPRC {a}"))?;
    let constant = vec![LabelVector(vec![0.3, 0.3]); 4];
    let a = auprc(&micro_pr_curve(&constant, &truth).map_err(|e| e.to_string())?);
    check((a - 0.5).abs() < tol, format!("constant scores AUPRC {a}, prevalence 0.5"))?;

    let mut r = rng(707);
    for i in 0..500 {
        let n = r.random_range(1..=100);
        let l = r.random_range(1..=10);
        let scores: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..l).map(|_| f64::from(r.random_range(0..=20u8)) / 20.0).collect())
            .collect();
        let mut truth: Vec<Vec<bool>> = (0..n).map(|_| (0..l).map(|_| r.random_bool(0.3)).collect()).collect();
        truth[0][0] = true;
        let lv: Vec<LabelVector> = scores.iter().map(|s| LabelVector(s.clone())).collect();
        let curve = micro_pr_curve(&lv, &truth).map_err(|e| e.to_string())?;
        let brute = brute_curve(&scores, &truth);
        check(curve.points.len() == brute.len(), format!("instance {i}: point counts differ"))?;
        for (p, b) in curve.points.iter().zip(&brute) {
            check(
                (p.recall - b.0).abs() <= 1e-12 && (p.precision - b.1).abs() <= 1e-12,
                format!("instance {i}: ({}, {}) vs brute force {b:?}", p.recall, p.precision),
            )?;
        }
        let brute_area: f64 = brute.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum();
        check((auprc(&curve) - brute_area).abs() <= 1e-12, format!("instance {i}: area differs"))?;

        let f = |x: f64| (3.0 * x).exp() + x * x * x;
        let moved: Vec<LabelVector> = scores.iter().map(|s| LabelVector(s.iter().map(|&x| f(x)).collect())).collect();
        let curve2 = micro_pr_curve(&moved, &truth).map_err(|e| e.to_string())?;
        let mapped: Vec<f64> = curve.thresholds().into_iter().map(f).collect();
        check(curve2.thresholds() == mapped, format!("instance {i}: threshold sets differ"))?;
        check(auprc(&curve2) == auprc(&curve), format!("instance {i}: AUPRC not invariant"))?;
    }
    Ok("perfect=1, constant=prevalence, 500 brute-force and monotone-transform instances agree".into())
}

// 8 -------------------------------------------------------------------------

fn cluster_benefit() -> Outcome {
    let start = Instant::now();
    let spec = SyntheticSpec::noisy_two_clusters(820);
    let config = ExperimentConfig {
        labeled_sizes: vec![20],
        runs: 1,
        learners: vec![LearnerId::SlPct, LearnerId::SslPct],
        ..ExperimentConfig::default()
    };
    let (mut sl, mut ssl, mut wins) = (0.0, 0.0, 0);
    let mut detail = Vec::new();
    for seed in 0..10u64 {
        let ds = generate_synthetic(&spec, seed).map_err(|e| e.to_string())?;
        let report = run_experiment(&ds, &ExperimentConfig { seed, ..config.clone() }).map_err(|e| e.to_string())?;
        let score = |id: LearnerId| {
            report
                .records
                .iter()
                .find(|r| r.learner == id)
                .and_then(|r| r.auprc)
                .ok_or(format!("seed {seed}: {id} failed"))
        };
        let (a, b) = (score(LearnerId::SlPct)?, score(LearnerId::SslPct)?);
        sl += a / 10.0;
        ssl += b / 10.0;
        if b > a {
            wins += 1;
        }
        detail.push(format!("{:+.3}", b - a));
    }
    let summary = format!(
        "SL {sl:.4}, SSL {ssl:.4}, SSL better in {wins}/10 seeds [{}] in {:.1}s",
        detail.join(" "),
        start.elapsed().as_secs_f64()
    );
    check(ssl >= sl - 0.01, format!("mean SSL below SL - 0.01: {summary}"))?;
    check(wins >= 7, format!("too few wins: {summary}"))?;
    within(start.elapsed(), 120.0)?;
    Ok(summary)
}

// 9 -------------------------------------------------------------------------

fn subspace() -> Outcome {
    check(subspace_size(103) == 7, format!("D=103 gives {}", subspace_size(103)))?;
    check(subspace_size(2) == 2, format!("D=2 gives {}", subspace_size(2)))?;
    Ok("D=103 -> 7, D=2 -> 2".into())
}

// 10 ------------------------------------------------------------------------

fn performance() -> Outcome {
    let patterns = vec![
        vec![true, false, false, true],
        vec![false, true, false, false],
        vec![true, true, true, false],
        vec![false, false, true, true],
    ];
    let spec = SyntheticSpec {
        n_examples: 2000,
        n_informative: 2,
        n_noise: 48,
        separation: 3.0,
        labels: ClusterLabels::Mlc(patterns),
        label_noise: 0.1,
    };
    let ds = generate_synthetic(&spec, 10).map_err(|e| e.to_string())?;
    let (train, _) = transductive_split(&ds, 200, 10).map_err(|e| e.to_string())?;
    let ctx = VarianceContext::new(&train, 0.5).map_err(|e| e.to_string())?;
    let time = |k: usize| -> Result<f64, String> {
        let options = ForestOptions {
            threads: Some(1),
            ..ForestOptions::new(k, 10)
        };
        // Best of three repeats filters out scheduler noise.
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let start = Instant::now();
            train_forest_with(&train, &ctx, &options).map_err(|e| e.to_string())?;
            best = best.min(start.elapsed().as_secs_f64());
        }
        Ok(best)
    };
    let t25 = time(25)?;
    let t100 = time(100)?;
    let ratio = t100 / t25;
    let summary = format!("k=25 {t25:.2}s, k=100 {t100:.2}s (best of 3), ratio {ratio:.2}");
    check(t100 < 60.0, format!("too slow: {summary}"))?;
    check((3.0..=5.0).contains(&ratio), format!("not near-linear (4 ± 25%): {summary}"))?;
    Ok(summary)
}

// 11 ------------------------------------------------------------------------

fn wilcoxon() -> Outcome {
    let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let b = [0.0; 6];
    let r = wilcoxon_signed_rank(&a, &b).map_err(|e| e.to_string())?;
    check((r.p_value - 0.03125).abs() <= 1e-12, format!("p = {}", r.p_value))?;
    let s = wilcoxon_signed_rank(&b, &a).map_err(|e| e.to_string())?;
    check(
        r.direction == Direction::Plus && s.direction == Direction::Minus && s.p_value == r.p_value,
        "direction not antisymmetric under swap",
    )?;
    Ok(format!("p = {}, direction flips under swap", r.p_value))
}

// 12 ------------------------------------------------------------------------

fn emotions() -> Option<Outcome> {
    let path = std::env::var("SSLPCT_EMOTIONS_ARFF").ok()?;
    Some((|| {
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
        let ds = parse_dataset(&text, &ParseConfig::new(Task::Mlc, TargetSpec::Last(6))).map_err(|e| e.to_string())?;
        let config = ExperimentConfig {
            labeled_sizes: vec![100],
            learners: vec![LearnerId::SlPct, LearnerId::SslPct],
            ..ExperimentConfig::default()
        };
        let report = run_experiment(&ds, &config).map_err(|e| e.to_string())?;
        check(report.records.len() == 20, format!("{} records", report.records.len()))?;
        for rec in &report.records {
            let a = rec.auprc.ok_or(format!("{} run {} failed", rec.learner, rec.run))?;
            check((0.0..=1.0).contains(&a), format!("AUPRC {a} out of range"))?;
        }
        let mean_size = |id: LearnerId| {
            let s: Vec<f64> = report
                .records
                .iter()
                .filter(|r| r.learner == id)
                .filter_map(|r| r.size.map(|x| x as f64))
                .collect();
            s.iter().sum::<f64>() / s.len() as f64
        };
        let (sl, ssl) = (mean_size(LearnerId::SlPct), mean_size(LearnerId::SslPct));
        Ok(format!(
            "20 records in [0,1]; mean size SL {sl:.1}, SSL {ssl:.1} ({})",
            if ssl > sl { "SSL larger, as expected" } else { "SSL not larger" }
        ))
    })())
}

fn run(f: fn() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 supervised equivalence", supervised_equivalence),
        ("2 split oracle", split_oracle),
        ("3 heuristic unit values", heuristic_values),
        ("4 hierarchy constraint", hierarchy_constraint),
        ("5 stratified bootstrap", bootstrap_strata),
        ("6 tuning safeguard", safeguard),
        ("7 AUPRC correctness", auprc_correctness),
        ("8 cluster-assumption benefit", cluster_benefit),
        ("9 forest subspace size", subspace),
        ("10 performance envelope", performance),
        ("11 Wilcoxon signed-rank", wilcoxon),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        match run(f) {
            Ok(msg) => println!("[PASS] {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {name}: {msg}");
            }
        }
    }
    match emotions() {
        None => println!("[SKIP] 12 Emotions pipeline (non-gating): set SSLPCT_EMOTIONS_ARFF to run"),
        Some(Ok(msg)) => println!("[PASS] 12 Emotions pipeline (non-gating): {msg}"),
        Some(Err(msg)) => println!("[FAIL] 12 Emotions pipeline (non-gating): {msg}"),
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
