use rayon::prelude::*;

use crate::base::{DirectionMode, DirectionSet, RngSeed};
use crate::error::{param, Result};
use crate::estimators::{Layout, ScaleWeights, SlicedSketch};
use crate::spaces::MetricMeasureSpace;

/// Budgets shared by every pairwise comparison in a kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSketchConfig {
    pub weights: ScaleWeights,
    pub tuples: usize,
    pub directions: usize,
    pub mode: DirectionMode,
    /// Must be 1: only then is the exponential kernel positive definite.
    pub p: f64,
    pub layout: Layout,
}

impl KernelSketchConfig {
    pub fn new(weights: ScaleWeights, tuples: usize, directions: usize, mode: DirectionMode) -> Self {
        Self { weights, tuples, directions, mode, p: 1.0, layout: Layout::InMemory }
    }

    pub fn describe(&self) -> String {
        format!("sliced-multiscale p={} mode={} K={} L={}", self.p, self.mode.name(), self.tuples, self.directions)
    }
}

/// A symmetric matrix of pairwise dissimilarities with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissimilarity {
    size: usize,
    values: Vec<f64>,
}

impl Dissimilarity {
    pub fn new(size: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != size * size {
            return Err(crate::error::dim(format!("{size}×{size} matrix needs {} entries", size * size)));
        }
        for i in 0..size {
            if values[i * size + i] != 0.0 {
                return Err(param(format!("dissimilarity diagonal entry {i} is not zero")));
            }
            for j in 0..i {
                let (a, b) = (values[i * size + j], values[j * size + i]);
                if !(a.is_finite() && a >= 0.0) || (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                    return Err(param(format!("dissimilarity entry ({i},{j}) is not symmetric and nonnegative")));
                }
            }
        }
        Ok(Self { size, values })
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
}

/// Tuple-stream seed for one space at one order, derived from the space's
/// contents so that equal spaces draw equal tuples.
pub fn space_tuple_seed(space: &MetricMeasureSpace, order: usize, seed: RngSeed) -> RngSeed {
    seed.child(order as u64).mix_f64(space.distances()).mix_f64(space.weights())
}

/// Pairwise sliced multi-scale DMW with `p = 1` over a collection.
///
/// For each order one direction set is drawn and each space is sketched once,
/// so every pair is compared on shared samples. The matrix is then an exact
/// pseudometric: zero diagonal, symmetric, and satisfying the triangle
/// inequality, which is what makes `exp(−λ D)` positive semidefinite.
pub fn msdmw_dissimilarity_matrix(spaces: &[MetricMeasureSpace], config: &KernelSketchConfig, seed: RngSeed) -> Result<Dissimilarity> {
    if config.p != 1.0 {
        return Err(param(format!(
            "kernel dissimilarities need p = 1 (exp(-λD) is only guaranteed positive definite then), got {}",
            config.p
        )));
    }
    let m = spaces.len();
    let mut values = vec![0.0; m * m];
    for (order, alpha) in config.weights.iter() {
        let dirs = DirectionSet::sample(order, config.directions, 1.0, config.mode, seed.child(order as u64).child(0))?;
        let sketches = spaces
            .par_iter()
            .map(|s| SlicedSketch::build(s, &dirs, config.tuples, space_tuple_seed(s, order, seed), config.layout))
            .collect::<Result<Vec<_>>>()?;
        let upper: Vec<(usize, usize, f64)> = (0..m)
            .into_par_iter()
            .flat_map_iter(|i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| sketches[i].distance(&sketches[j]).map(|d| (i, j, d)))
            .collect::<Result<_>>()?;
        for (i, j, d) in upper {
            values[i * m + j] += alpha * d;
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            values[j * m + i] = values[i * m + j];
        }
    }
    Ok(Dissimilarity { size: m, values })
}
