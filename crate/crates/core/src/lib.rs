//! Semi-supervised predictive clustering trees and random forests for
//! multi-label and hierarchical multi-label classification.
//!
//! Split selection mixes target-space variance (computed on labeled
//! examples) with descriptive-space variance (computed on all examples)
//! through a weight `w`: `w = 1` is purely supervised, `w = 0` purely
//! unsupervised.

pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod heuristics;
pub mod induction;
pub mod tuning;

pub use error::{PctError, Result};
