use rayon::prelude::*;

use crate::base::{check_exponent, DirectionMode, RngSeed};
use crate::error::{dim, param, Result};
use crate::spaces::MetricMeasureSpace;

use super::empirical::{empirical_dmw, exact_dmw, OtSolver};
use super::law::sample_matrix_law;
use super::sliced::{sliced_dmw, Layout, SlicedConfig};
use super::DmwEstimate;

/// A finite set of orders with convex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleWeights {
    scales: Vec<usize>,
    weights: Vec<f64>,
}

impl ScaleWeights {
    pub fn new(scales: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if scales.is_empty() || scales.len() != weights.len() {
            return Err(dim(format!("{} scales with {} weights", scales.len(), weights.len())));
        }
        if let Some(&n) = scales.iter().find(|&&n| n < 2) {
            return Err(param(format!("scale {n} is below the minimum order 2")));
        }
        let mut sorted = scales.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(param("scales must be distinct"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(param("scale weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(param(format!("scale weights sum to {total}, not 1")));
        }
        Ok(Self { scales, weights })
    }

    pub fn single(order: usize) -> Result<Self> {
        Self::new(vec![order], vec![1.0])
    }

    pub fn uniform(scales: Vec<usize>) -> Result<Self> {
        let w = 1.0 / scales.len().max(1) as f64;
        let weights = vec![w; scales.len()];
        Self::new(scales, weights)
    }

    /// Weights proportional to `1/n`.
    pub fn inverse_order(scales: Vec<usize>) -> Result<Self> {
        let raw: Vec<f64> = scales.iter().map(|&n| 1.0 / n as f64).collect();
        let total: f64 = raw.iter().sum();
        Self::new(scales, raw.iter().map(|w| w / total).collect())
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.scales.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Softmin weights `α_n ∝ exp(−B_n / τ)` over scales with per-scale error
/// bounds `B_n`, evaluated after shifting by `min B` so nothing underflows
/// to an all-zero vector.
pub fn softmin_weights(scales: Vec<usize>, bounds: &[f64], tau: f64) -> Result<ScaleWeights> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(param(format!("softmin temperature must be positive, got {tau}")));
    }
    if bounds.len() != scales.len() {
        return Err(dim(format!("{} scales with {} bounds", scales.len(), bounds.len())));
    }
    if bounds.iter().any(|b| !b.is_finite()) {
        return Err(param("scale bounds must be finite"));
    }
    let lo = bounds.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = bounds.iter().map(|b| (-(b - lo) / tau).exp()).collect();
    let total: f64 = raw.iter().sum();
    ScaleWeights::new(scales, raw.iter().map(|w| w / total).collect())
}

/// How each per-scale value is estimated.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleEstimator {
    Sliced { tuples: usize, directions: usize, p: f64, mode: DirectionMode, layout: Layout },
    Empirical { tuples: usize, p: f64, solver: OtSolver },
    Exact { p: f64 },
}

impl ScaleEstimator {
    pub fn p(&self) -> f64 {
        match self {
            Self::Sliced { p, .. } | Self::Empirical { p, .. } | Self::Exact { p } => *p,
        }
    }

    fn estimate(&self, x: &MetricMeasureSpace, y: &MetricMeasureSpace, order: usize, seed: RngSeed) -> Result<DmwEstimate> {
        match self {
            Self::Sliced { tuples, directions, p, mode, layout } => {
                let cfg = SlicedConfig::new(order, *tuples, *directions, *p, *mode).with_layout(*layout);
                sliced_dmw(x, y, &cfg, seed)
            }
            Self::Empirical { tuples, p, solver } => {
                let lx = sample_matrix_law(x, order, *tuples, seed.child(0))?;
                let ly = sample_matrix_law(y, order, *tuples, seed.child(1))?;
                empirical_dmw(&lx, &ly, *p, solver)
            }
            Self::Exact { p } => exact_dmw(x, y, order, *p),
        }
    }
}

/// A weighted sum of per-scale estimates, with the parts kept for auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiscaleEstimate {
    pub value: f64,
    pub weights: ScaleWeights,
    pub per_scale: Vec<DmwEstimate>,
}

/// `Σ_n α_n · D_n(X, Y)` where `D_n` is the configured per-order estimator.
/// Scale `n` draws its randomness from `seed.child(n)`.
pub fn multiscale_dmw(
    x: &MetricMeasureSpace,
    y: &MetricMeasureSpace,
    weights: &ScaleWeights,
    estimator: &ScaleEstimator,
    seed: RngSeed,
) -> Result<MultiscaleEstimate> {
    check_exponent(estimator.p())?;
    let per_scale = weights.scales().par_iter().map(|&n| estimator.estimate(x, y, n, seed.child(n as u64))).collect::<Result<Vec<_>>>()?;
    let value = weights.weights().iter().zip(&per_scale).map(|(a, e)| a * e.value).sum();
    Ok(MultiscaleEstimate { value, weights: weights.clone(), per_scale })
}
