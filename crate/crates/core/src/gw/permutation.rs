use crate::base::check_exponent;
use crate::error::{param, Result};
use crate::estimators::pth_root;
use crate::spaces::MetricMeasureSpace;

use super::{GwEstimate, GwMode};

/// Largest space size [`gw_permutation_min`] accepts (`8! = 40320` plans).
pub const PERMUTATION_SIZE_LIMIT: usize = 8;

/// `(1/m²) Σ_{i,j} |d_X(i,j) − d_Y(σ(i),σ(j))|^p`: the GW objective of the
/// coupling that sends point `i` to `σ(i)` with mass `1/m`.
pub fn gw_objective_for_permutation(x: &MetricMeasureSpace, y: &MetricMeasureSpace, sigma: &[usize], p: f64) -> f64 {
    let m = x.size();
    let mut total = 0.0;
    for i in 0..m {
        let (rx, ry) = (x.row(i), y.row(sigma[i]));
        for j in 0..m {
            total += (rx[j] - ry[sigma[j]]).abs().powf(p);
        }
    }
    total / (m * m) as f64
}

/// Minimum of the GW objective over all permutation couplings of two
/// uniform spaces of equal size. Any coupling bounds GW from above, so this
/// is an upper bound on `GW_p`.
pub fn gw_permutation_min(x: &MetricMeasureSpace, y: &MetricMeasureSpace, p: f64) -> Result<GwEstimate> {
    check_exponent(p)?;
    let m = x.size();
    if m != y.size() {
        return Err(param(format!("permutation couplings need equal sizes, got {m} and {}", y.size())));
    }
    if m > PERMUTATION_SIZE_LIMIT {
        return Err(param(format!("permutation search is limited to {PERMUTATION_SIZE_LIMIT} points, got {m}")));
    }
    if !x.is_uniform() || !y.is_uniform() {
        return Err(param("permutation couplings need uniform measures"));
    }
    // Heap's algorithm
    let mut sigma: Vec<usize> = (0..m).collect();
    let mut best = gw_objective_for_permutation(x, y, &sigma, p);
    let mut best_sigma = sigma.clone();
    let mut c = vec![0usize; m];
    let mut i = 1;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                sigma.swap(0, i);
            } else {
                sigma.swap(c[i], i);
            }
            let v = gw_objective_for_permutation(x, y, &sigma, p);
            if v < best {
                best = v;
                best_sigma.copy_from_slice(&sigma);
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let mut coupling = vec![0.0; m * m];
    for (i, &j) in best_sigma.iter().enumerate() {
        coupling[i * m + j] = 1.0 / m as f64;
    }
    Ok(GwEstimate { value: pth_root(best, p), p, mode: GwMode::PermutationMin, iterations: 0, converged: true, timed_out: false, coupling })
}
