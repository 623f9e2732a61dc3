//! Columnar training data and additive sufficient statistics.
//!
//! Split search sweeps examples from one side of a candidate test to the
//! other, so every estimator is expressed through counts and sums that can
//! be added and subtracted in O(D + T).

use super::{gini_from_counts, missing_aware_variance, VarianceContext};
use crate::dataset::{Dataset, Task, Value};

pub(crate) const MISSING_NOMINAL: u32 = u32::MAX;

pub(crate) enum Column {
    /// NaN marks a missing value.
    Numeric(Vec<f64>),
    Nominal { values: Vec<u32>, n_values: usize },
}

#[derive(Clone, Copy)]
enum Slot {
    Numeric(usize),
    Nominal { slot: usize, offset: usize, n_values: usize },
}

/// Dataset in column-major form, addressed by example position.
pub(crate) struct Columns {
    pub columns: Vec<Column>,
    pub labeled: Vec<bool>,
    /// Row-major label bits, `width` per example.
    pub bits: Vec<u8>,
    pub width: usize,
    slots: Vec<Slot>,
    n_numeric: usize,
    n_nominal: usize,
    nominal_cells: usize,
    class_weights: Vec<f64>,
    total_class_weight: f64,
}

impl Columns {
    pub fn new(dataset: &Dataset) -> Self {
        let schema = &dataset.schema;
        let n = dataset.len();
        let width = dataset.label_width();
        let mut columns = Vec::with_capacity(schema.n_descriptive());
        let mut slots = Vec::with_capacity(schema.n_descriptive());
        let (mut n_numeric, mut n_nominal, mut nominal_cells) = (0, 0, 0);
        for d in 0..schema.n_descriptive() {
            match schema.descriptive(d).nominal_values() {
                None => {
                    let col = dataset
                        .examples
                        .iter()
                        .map(|e| match e.values[d] {
                            Value::Numeric(x) => x,
                            _ => f64::NAN,
                        })
                        .collect();
                    columns.push(Column::Numeric(col));
                    slots.push(Slot::Numeric(n_numeric));
                    n_numeric += 1;
                }
                Some(list) => {
                    let col = dataset
                        .examples
                        .iter()
                        .map(|e| match e.values[d] {
                            Value::Nominal(v) => v as u32,
                            _ => MISSING_NOMINAL,
                        })
                        .collect();
                    columns.push(Column::Nominal {
                        values: col,
                        n_values: list.len(),
                    });
                    slots.push(Slot::Nominal {
                        slot: n_nominal,
                        offset: nominal_cells,
                        n_values: list.len(),
                    });
                    n_nominal += 1;
                    nominal_cells += list.len();
                }
            }
        }
        let mut labeled = Vec::with_capacity(n);
        let mut bits = vec![0u8; n * width];
        for (i, e) in dataset.examples.iter().enumerate() {
            match e.target.labels() {
                Some(b) => {
                    labeled.push(true);
                    for (t, &x) in b.iter().enumerate() {
                        bits[i * width + t] = u8::from(x);
                    }
                }
                None => labeled.push(false),
            }
        }
        let class_weights = dataset
            .hierarchy
            .as_ref()
            .map(|h| h.weights().to_vec())
            .unwrap_or_default();
        let total_class_weight = class_weights.iter().sum();
        Columns {
            columns,
            labeled,
            bits,
            width,
            slots,
            n_numeric,
            n_nominal,
            nominal_cells,
            class_weights,
            total_class_weight,
        }
    }

    pub fn n_descriptive(&self) -> usize {
        self.columns.len()
    }

    pub fn labels(&self, row: usize) -> &[u8] {
        &self.bits[row * self.width..(row + 1) * self.width]
    }
}

/// Additive statistics of a multiset of rows.
#[derive(Clone, Debug)]
pub(crate) struct Stats {
    pub n: u32,
    pub n_labeled: u32,
    pub positives: Vec<u32>,
    num_k: Vec<u32>,
    num_sum: Vec<f64>,
    num_sq: Vec<f64>,
    nom_k: Vec<u32>,
    nom_counts: Vec<u32>,
    track_descriptive: bool,
}

impl Stats {
    pub fn new(cols: &Columns, track_descriptive: bool) -> Self {
        let (nn, nc, cells) = if track_descriptive {
            (cols.n_numeric, cols.n_nominal, cols.nominal_cells)
        } else {
            (0, 0, 0)
        };
        Stats {
            n: 0,
            n_labeled: 0,
            positives: vec![0; cols.width],
            num_k: vec![0; nn],
            num_sum: vec![0.0; nn],
            num_sq: vec![0.0; nn],
            nom_k: vec![0; nc],
            nom_counts: vec![0; cells],
            track_descriptive,
        }
    }

    pub fn clear(&mut self) {
        self.n = 0;
        self.n_labeled = 0;
        self.positives.fill(0);
        self.num_k.fill(0);
        self.num_sum.fill(0.0);
        self.num_sq.fill(0.0);
        self.nom_k.fill(0);
        self.nom_counts.fill(0);
    }

    pub fn add_row(&mut self, cols: &Columns, row: usize) {
        self.n += 1;
        if cols.labeled[row] {
            self.n_labeled += 1;
            for (p, &b) in self.positives.iter_mut().zip(cols.labels(row)) {
                *p += u32::from(b);
            }
        }
        if !self.track_descriptive {
            return;
        }
        for (col, slot) in cols.columns.iter().zip(&cols.slots) {
            match (col, *slot) {
                (Column::Numeric(v), Slot::Numeric(s)) => {
                    let x = v[row];
                    if !x.is_nan() {
                        self.num_k[s] += 1;
                        self.num_sum[s] += x;
                        self.num_sq[s] += x * x;
                    }
                }
                (Column::Nominal { values, .. }, Slot::Nominal { slot, offset, .. }) => {
                    let v = values[row];
                    if v != MISSING_NOMINAL {
                        self.nom_k[slot] += 1;
                        self.nom_counts[offset + v as usize] += 1;
                    }
                }
                _ => unreachable!("slot layout mirrors the columns"),
            }
        }
    }

    pub fn add(&mut self, other: &Stats) {
        self.n += other.n;
        self.n_labeled += other.n_labeled;
        for (a, b) in self.positives.iter_mut().zip(&other.positives) {
            *a += b;
        }
        for (a, b) in self.num_k.iter_mut().zip(&other.num_k) {
            *a += b;
        }
        for (a, b) in self.num_sum.iter_mut().zip(&other.num_sum) {
            *a += b;
        }
        for (a, b) in self.num_sq.iter_mut().zip(&other.num_sq) {
            *a += b;
        }
        for (a, b) in self.nom_k.iter_mut().zip(&other.nom_k) {
            *a += b;
        }
        for (a, b) in self.nom_counts.iter_mut().zip(&other.nom_counts) {
            *a += b;
        }
    }

    /// `self = a - b`.
    pub fn set_difference(&mut self, a: &Stats, b: &Stats) {
        self.n = a.n - b.n;
        self.n_labeled = a.n_labeled - b.n_labeled;
        for ((o, x), y) in self.positives.iter_mut().zip(&a.positives).zip(&b.positives) {
            *o = x - y;
        }
        for ((o, x), y) in self.num_k.iter_mut().zip(&a.num_k).zip(&b.num_k) {
            *o = x - y;
        }
        for ((o, x), y) in self.num_sum.iter_mut().zip(&a.num_sum).zip(&b.num_sum) {
            *o = x - y;
        }
        for ((o, x), y) in self.num_sq.iter_mut().zip(&a.num_sq).zip(&b.num_sq) {
            *o = x - y;
        }
        for ((o, x), y) in self.nom_k.iter_mut().zip(&a.nom_k).zip(&b.nom_k) {
            *o = x - y;
        }
        for ((o, x), y) in self.nom_counts.iter_mut().zip(&a.nom_counts).zip(&b.nom_counts) {
            *o = x - y;
        }
    }

    pub fn copy_from(&mut self, other: &Stats) {
        self.clone_from(other);
    }

    fn target_term(&self, cols: &Columns, ctx: &VarianceContext, t: usize) -> Option<f64> {
        let k = f64::from(self.n_labeled);
        match ctx.task {
            Task::Mlc => {
                let pos = f64::from(self.positives[t]);
                gini_from_counts([k - pos, pos], k)
            }
            Task::Hmlc => {
                if self.n_labeled <= 1 {
                    return None;
                }
                let raw: f64 = self
                    .positives
                    .iter()
                    .zip(&cols.class_weights)
                    .map(|(&p, &w)| {
                        let p = f64::from(p);
                        w * p * (k - p) / (k * k)
                    })
                    .sum();
                Some(raw / cols.total_class_weight)
            }
        }
    }

    fn descriptive_term(&self, cols: &Columns, d: usize) -> Option<f64> {
        match cols.slots[d] {
            Slot::Numeric(s) => missing_aware_variance(
                f64::from(self.n),
                f64::from(self.num_k[s]),
                self.num_sum[s],
                self.num_sq[s],
            ),
            Slot::Nominal { slot, offset, n_values } => {
                let k = f64::from(self.nom_k[slot]);
                gini_from_counts(self.nom_counts[offset..offset + n_values].iter().map(|&c| f64::from(c)), k)
            }
        }
    }

    /// Per-attribute estimates with undefined ones taken from `parent`.
    pub fn resolve(&self, cols: &Columns, ctx: &VarianceContext, parent: Option<&Resolved>) -> Resolved {
        let target = (0..ctx.n_target_terms())
            .map(|t| {
                self.target_term(cols, ctx, t)
                    .unwrap_or_else(|| parent.map_or(0.0, |p| p.target[t]))
            })
            .collect();
        let descriptive = if self.track_descriptive {
            (0..cols.n_descriptive())
                .map(|d| {
                    self.descriptive_term(cols, d)
                        .unwrap_or_else(|| parent.map_or(0.0, |p| p.descriptive[d]))
                })
                .collect()
        } else {
            vec![0.0; cols.n_descriptive()]
        };
        Resolved { target, descriptive }
    }

    /// Combined variance of these rows, falling back to `parent` per attribute.
    pub fn combined(&self, cols: &Columns, ctx: &VarianceContext, parent: &Resolved) -> f64 {
        let target = match ctx.task {
            Task::Hmlc => self.target_term(cols, ctx, 0).unwrap_or(parent.target[0]),
            Task::Mlc => {
                let den = &ctx.normalization.targets;
                let mut sum = 0.0;
                for (t, &q) in den.iter().enumerate() {
                    if q > 0.0 {
                        sum += self.target_term(cols, ctx, t).unwrap_or(parent.target[t]) / q;
                    }
                }
                sum / den.len() as f64
            }
        };
        if !self.track_descriptive {
            return ctx.mix(target, 0.0);
        }
        let den = &ctx.normalization.descriptive;
        let mut sum = 0.0;
        for (d, &q) in den.iter().enumerate() {
            if q > 0.0 {
                let v = self.descriptive_term(cols, d).unwrap_or(parent.descriptive[d]);
                let s = ctx.feature_weights.as_ref().map_or(1.0, |s| s[d]);
                sum += s * v / q;
            }
        }
        ctx.mix(target, sum / den.len() as f64)
    }
}

/// Per-attribute variance estimates of a node after parent fallback.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Resolved {
    pub target: Vec<f64>,
    pub descriptive: Vec<f64>,
}

impl Resolved {
    pub fn combined(&self, ctx: &VarianceContext) -> f64 {
        ctx.mix(ctx.target_from_terms(&self.target), ctx.descriptive_from_terms(&self.descriptive))
    }
}
