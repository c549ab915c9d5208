use crate::base::check_exponent;
use crate::error::{param, Result};

/// A probability measure on the real line with finitely many atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure1D {
    values: Vec<f64>,
    weights: Vec<f64>,
    uniform: bool,
}

impl DiscreteMeasure1D {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(param("empty measure"));
        }
        if values.len() != weights.len() {
            return Err(param(format!("{} values but {} weights", values.len(), weights.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(param("measure values must be finite"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(param("measure weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(param(format!("measure weights sum to {total}, not 1")));
        }
        Ok(Self { values, weights, uniform: false })
    }

    /// Equal mass `1/K` on each value.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(param("empty measure"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(param("measure values must be finite"));
        }
        let w = 1.0 / values.len() as f64;
        Ok(Self { weights: vec![w; values.len()], values, uniform: true })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    fn sorted(&self) -> (Vec<f64>, Vec<f64>) {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        (idx.iter().map(|&i| self.values[i]).collect(), idx.iter().map(|&i| self.weights[i]).collect())
    }
}

/// `(1/K) Σ_k |a_(k) − b_(k)|^p` for two ascending samples of equal length.
#[inline]
pub fn sorted_uniform_cost(a_sorted: &[f64], b_sorted: &[f64], p: f64) -> f64 {
    debug_assert_eq!(a_sorted.len(), b_sorted.len());
    let sum: f64 = if p == 1.0 {
        a_sorted.iter().zip(b_sorted).map(|(x, y)| (x - y).abs()).sum()
    } else {
        a_sorted.iter().zip(b_sorted).map(|(x, y)| (x - y).abs().powf(p)).sum()
    };
    sum / a_sorted.len() as f64
}

/// `W_p^p` between two measures on the line.
///
/// Uniform measures with the same number of atoms are matched in sorted
/// order; anything else goes through the monotone (quantile) coupling built
/// by a two-pointer merge of the cumulative weights.
pub fn w1d_pth_power(a: &DiscreteMeasure1D, b: &DiscreteMeasure1D, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if a.is_empty() || b.is_empty() {
        return Err(param("empty measure"));
    }
    if a.uniform && b.uniform && a.len() == b.len() {
        let mut x = a.values.clone();
        let mut y = b.values.clone();
        x.sort_by(f64::total_cmp);
        y.sort_by(f64::total_cmp);
        return Ok(sorted_uniform_cost(&x, &y, p));
    }
    let (xv, xw) = a.sorted();
    let (yv, yw) = b.sorted();
    Ok(quantile_cost(&xv, &xw, &yv, &yw, p))
}

pub(crate) fn quantile_cost(xv: &[f64], xw: &[f64], yv: &[f64], yw: &[f64], p: f64) -> f64 {
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (xw[0], yw[0]);
    let mut total = 0.0;
    loop {
        let t = ra.min(rb);
        if t > 0.0 {
            total += t * (xv[i] - yv[j]).abs().powf(p);
        }
        ra -= t;
        rb -= t;
        // advance whichever side ran out; on an exact tie advance both
        let next_a = ra <= 0.0;
        let next_b = rb <= 0.0;
        if next_a {
            i += 1;
            if i == xv.len() {
                break;
            }
            ra = xw[i];
        }
        if next_b {
            j += 1;
            if j == yv.len() {
                break;
            }
            rb = yw[j];
        }
    }
    total
}
