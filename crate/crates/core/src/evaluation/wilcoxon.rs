use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{PctError, Result};

/// Largest sample size for which the null distribution is enumerated.
const EXACT_LIMIT: usize = 12;
const MIN_PAIRS: usize = 5;

/// Which list tends to be larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// The first list is larger (positive differences dominate).
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Tie,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// The smaller of the positive and negative rank sums.
    pub statistic: f64,
    pub p_value: f64,
    pub direction: Direction,
    /// Number of non-zero differences.
    pub n: usize,
    pub exact: bool,
}

/// Two-sided Wilcoxon signed-rank test on the paired differences `a - b`.
///
/// Zero differences are dropped and tied magnitudes get average ranks. The
/// p-value is exact for up to 12 non-zero differences and otherwise uses the
/// normal approximation with tie correction.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(PctError::config(format!("paired lists differ in length: {} vs {}", a.len(), b.len())));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            statistic: 0.0,
            p_value: 1.0,
            direction: Direction::Tie,
            n: 0,
            exact: true,
        });
    }
    if n < MIN_PAIRS {
        return Err(PctError::InsufficientPairs {
            needed: MIN_PAIRS,
            found: n,
        });
    }
    // Ranks are kept doubled so that average ranks stay integral.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut doubled = vec![0u64; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        let avg2 = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            doubled[k] = avg2;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let plus2: u64 = (0..n).filter(|&k| diffs[k] > 0.0).map(|k| doubled[k]).sum();
    let total2 = (n * (n + 1)) as u64;
    let minus2 = total2 - plus2;
    let direction = match plus2.cmp(&minus2) {
        std::cmp::Ordering::Greater => Direction::Plus,
        std::cmp::Ordering::Less => Direction::Minus,
        std::cmp::Ordering::Equal => Direction::Tie,
    };
    let small2 = plus2.min(minus2);
    let (p_value, exact) = if n <= EXACT_LIMIT {
        let mut at_most = 0u64;
        for mask in 0u32..(1 << n) {
            let w: u64 = (0..n).filter(|&k| mask >> k & 1 == 1).map(|k| doubled[k]).sum();
            if w <= small2 {
                at_most += 1;
            }
        }
        let p = 2.0 * at_most as f64 / f64::from(1u32 << n);
        (p.min(1.0), true)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = (plus2 as f64 / 2.0 - mean) / var.sqrt();
        (erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0), false)
    };
    Ok(WilcoxonResult {
        statistic: small2 as f64 / 2.0,
        p_value,
        direction,
        n,
        exact,
    })
}
