use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::base::RngSeed;
use crate::error::{dim, param, Result};

use super::GramMatrix;

/// Unbiased MMD² between the groups `labels[i] == false` and `== true`:
///
/// `(1/(a(a−1))) Σ_{i≠j∈A} k + (1/(b(b−1))) Σ_{i≠j∈B} k − (2/(ab)) Σ_{A×B} k`.
pub fn mmd2_unbiased(gram: &GramMatrix, labels: &[bool]) -> Result<f64> {
    let m = gram.size();
    if labels.len() != m {
        return Err(dim(format!("{} labels for a {m}×{m} Gram", labels.len())));
    }
    let b = labels.iter().filter(|&&l| l).count();
    let a = m - b;
    if a < 2 || b < 2 {
        return Err(param(format!("both groups need at least 2 members, got {a} and {b}")));
    }
    let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
    for i in 0..m {
        let row = &gram.values()[i * m..(i + 1) * m];
        for j in i + 1..m {
            match (labels[i], labels[j]) {
                (false, false) => saa += row[j],
                (true, true) => sbb += row[j],
                _ => sab += row[j],
            }
        }
    }
    // off-diagonal sums over ordered pairs are twice the upper-triangle sums
    let (a, b) = (a as f64, b as f64);
    Ok(2.0 * saa / (a * (a - 1.0)) + 2.0 * sbb / (b * (b - 1.0)) - 2.0 * sab / (a * b))
}

/// Outcome of a permutation two-sample test.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleResult {
    pub statistic: f64,
    pub permutations: usize,
    /// `(1 + #{null ≥ statistic}) / (P + 1)`.
    pub p_value: f64,
    pub null: Vec<f64>,
    pub alpha: f64,
    pub reject: bool,
}

/// Permutation test of MMD² on a fixed Gram matrix. Replicate `r` shuffles the
/// labels with `seed.child(r)`; null statistics within a relative `1e-12` of
/// the observed one count as ties (and so as "at least as large").
pub fn permutation_test(gram: &GramMatrix, labels: &[bool], permutations: usize, alpha: f64, seed: RngSeed) -> Result<TwoSampleResult> {
    if permutations == 0 {
        return Err(param("permutation count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(param(format!("test level must lie in [0, 1], got {alpha}")));
    }
    let statistic = mmd2_unbiased(gram, labels)?;
    let null = (0..permutations)
        .into_par_iter()
        .map(|r| {
            let mut shuffled = labels.to_vec();
            shuffled.shuffle(&mut seed.child(r as u64).rng());
            mmd2_unbiased(gram, &shuffled)
        })
        .collect::<Result<Vec<_>>>()?;
    let tie = 1e-12 * statistic.abs().max(1e-300);
    let exceed = null.iter().filter(|&&v| v >= statistic - tie).count();
    let p_value = (1 + exceed) as f64 / (permutations + 1) as f64;
    Ok(TwoSampleResult { statistic, permutations, p_value, null, alpha, reject: p_value <= alpha })
}
