use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{param, Result};

use super::Dissimilarity;

/// Relative eigenvalue tolerance: a Gram matrix counts as PSD when its
/// smallest eigenvalue is at least `−PSD_TOLERANCE · max diagonal`.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// `K = exp(−λ D)` with the outcome of its eigenvalue check.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    size: usize,
    values: Vec<f64>,
    lambda: f64,
    min_eigenvalue: f64,
    clipped: bool,
}

impl GramMatrix {
    pub fn from_values(size: usize, values: Vec<f64>, lambda: f64) -> Result<Self> {
        if values.len() != size * size {
            return Err(crate::error::dim(format!("{size}×{size} Gram needs {} entries", size * size)));
        }
        let min_eigenvalue = min_eigenvalue(size, &values);
        Ok(Self { size, values, lambda, min_eigenvalue, clipped: false })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn is_clipped(&self) -> bool {
        self.clipped
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.size).map(|i| self.get(i, i)).fold(0.0, f64::max)
    }

    /// Whether the smallest eigenvalue is within tolerance of nonnegative.
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -PSD_TOLERANCE * self.max_diagonal().max(1.0)
    }

    /// Spectral repair: negative eigenvalues set to zero. Never applied
    /// implicitly.
    pub fn clipped(&self) -> Self {
        let m = self.size;
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(m, m, &self.values));
        let lam = eig.eigenvalues.map(|v| v.max(0.0));
        let q = &eig.eigenvectors;
        let repaired = q * DMatrix::from_diagonal(&lam) * q.transpose();
        let mut values: Vec<f64> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| repaired[(i, j)]).collect();
        // restore exact symmetry lost to round-off
        for i in 0..m {
            for j in 0..i {
                let avg = 0.5 * (values[i * m + j] + values[j * m + i]);
                values[i * m + j] = avg;
                values[j * m + i] = avg;
            }
        }
        let min_eigenvalue = min_eigenvalue(m, &values);
        Self { size: m, values, lambda: self.lambda, min_eigenvalue, clipped: true }
    }
}

fn min_eigenvalue(m: usize, values: &[f64]) -> f64 {
    if m == 0 {
        return 0.0;
    }
    SymmetricEigen::new(DMatrix::from_row_slice(m, m, values)).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Entrywise `exp(−λ D)`. An indefinite result is reported through
/// [`GramMatrix::is_psd`], not treated as an error.
pub fn gram_from_dissimilarity(d: &Dissimilarity, lambda: f64) -> Result<GramMatrix> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(param(format!("kernel bandwidth must be positive, got {lambda}")));
    }
    let values = d.values().iter().map(|v| (-lambda * v).exp()).collect();
    GramMatrix::from_values(d.size(), values, lambda)
}

/// `1 / median` of the off-diagonal dissimilarities, or 1 when they are all 0.
pub fn median_heuristic(d: &Dissimilarity) -> f64 {
    let m = d.size();
    let mut off: Vec<f64> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).map(|(i, j)| d.get(i, j)).collect();
    if off.is_empty() {
        return 1.0;
    }
    off.sort_by(f64::total_cmp);
    let mid = off.len() / 2;
    let median = if off.len() % 2 == 1 { off[mid] } else { 0.5 * (off[mid - 1] + off[mid]) };
    if median > 0.0 {
        1.0 / median
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diss(m: usize, f: impl Fn(usize, usize) -> f64) -> Dissimilarity {
        let values = (0..m * m).map(|k| if k / m == k % m { 0.0 } else { f((k / m).min(k % m), (k / m).max(k % m)) }).collect();
        Dissimilarity::new(m, values).unwrap()
    }

    #[test]
    fn zero_dissimilarity_gives_all_ones() {
        let g = gram_from_dissimilarity(&diss(4, |_, _| 0.0), 1.0).unwrap();
        assert!(g.values().iter().all(|&v| v == 1.0));
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(4, 4, g.values())).eigenvalues;
        let mut e: Vec<f64> = eig.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        assert!((e[3] - 4.0).abs() < 1e-12 && e[..3].iter().all(|v| v.abs() < 1e-12));
        assert!(g.is_psd());
    }

    #[test]
    fn large_bandwidth_tends_to_identity() {
        let g = gram_from_dissimilarity(&diss(5, |i, j| 0.1 + (i + j) as f64 * 0.01), 1e4).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((g.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn indefinite_matrix_is_flagged_and_clipping_repairs() {
        // a non-metric dissimilarity: d(0,2) far exceeds d(0,1) + d(1,2)
        let d = diss(3, |i, j| if (i, j) == (0, 2) { 20.0 } else { 0.01 });
        let g = gram_from_dissimilarity(&d, 1.0).unwrap();
        assert!(!g.is_psd(), "{}", g.min_eigenvalue());
        let c = g.clipped();
        assert!(c.is_clipped() && c.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn bandwidth_is_validated() {
        assert!(gram_from_dissimilarity(&diss(2, |_, _| 1.0), 0.0).is_err());
    }

    #[test]
    fn median_heuristic_examples() {
        assert_eq!(median_heuristic(&diss(3, |i, j| (i + j) as f64)), 1.0 / 2.0);
        assert_eq!(median_heuristic(&diss(3, |_, _| 0.0)), 1.0);
    }
}
