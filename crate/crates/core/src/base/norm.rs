use crate::error::{dim, param, Result};

use super::pairs::{num_pairs, pair_offset};

/// Pairwise distances of one ordered `n`-tuple, indexed by unordered pairs in
/// row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVector {
    order: usize,
    entries: Vec<f64>,
}

impl DistanceVector {
    pub fn new(order: usize, entries: Vec<f64>) -> Result<Self> {
        if order < 2 {
            return Err(param(format!("tuple order must be at least 2, got {order}")));
        }
        if entries.len() != num_pairs(order) {
            return Err(dim(format!("order {order} needs {} entries, got {}", num_pairs(order), entries.len())));
        }
        if let Some(bad) = entries.iter().find(|d| !d.is_finite() || **d < 0.0) {
            return Err(param(format!("distance entries must be finite and nonnegative, got {bad}")));
        }
        Ok(Self { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Distance between tuple positions `i < j`.
    pub fn get(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.entries[pair_offset(i, j, self.order)?])
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }
}

/// Rejects exponents outside `[1, ∞)`.
pub fn check_exponent(p: f64) -> Result<()> {
    if !p.is_finite() || p < 1.0 {
        return Err(param(format!("exponent p must be a finite real ≥ 1, got {p}")));
    }
    Ok(())
}

/// Hölder conjugate `q` of `p`, with `q = ∞` at `p = 1`.
pub fn holder_conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `(1/N) Σ |a_k − b_k|^p` over equal-length slices; the `p`-th power of the
/// pair-averaged norm of `a − b`.
///
/// The caller guarantees equal lengths and a valid exponent.
#[inline]
pub fn avg_norm_pow(a: &[f64], b: &[f64], p: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return 0.0;
    }
    let sum: f64 = if p == 1.0 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    } else if p == 2.0 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    } else {
        a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum()
    };
    sum / a.len() as f64
}

/// The normalized ℓp metric `((1/N) Σ |a_ij − b_ij|^p)^{1/p}` between two
/// distance vectors of the same order.
pub fn avg_norm(a: &DistanceVector, b: &DistanceVector, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if a.order != b.order {
        return Err(dim(format!("distance vectors have orders {} and {}", a.order, b.order)));
    }
    Ok(avg_norm_pow(&a.entries, &b.entries, p).powf(1.0 / p))
}
