//! Finite metric measure spaces and the ways this crate builds them.

mod generators;
mod graph;
mod tu;

pub use generators::{
    counterexample_x, counterexample_y, random_euclidean_space, space_from_cloud, space_from_cloud_at_angles, space_from_sbm, SbmSpec,
    Shape, ShapeCloudSpec, SBM_RETRY_CAP,
};
pub use graph::{space_from_graph, GraphSpec, NodeBudget};
pub use tu::{load_tu_dataset, LabeledSpace, TuOptions};

use rand::Rng;

use crate::base::RngSeed;
use crate::error::{DmwError, Result};

/// Spaces up to this size get an exhaustive triangle-inequality check on
/// construction; larger ones are checked on a fixed random sample of triples.
pub const EXHAUSTIVE_TRIANGLE_CHECK: usize = 512;
const SAMPLED_TRIANGLES: usize = 200_000;

/// A finite metric measure space: `m` points, a dense symmetric distance
/// matrix and a probability vector of point weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMeasureSpace {
    size: usize,
    distances: Vec<f64>,
    weights: Vec<f64>,
    diameter: f64,
}

impl MetricMeasureSpace {
    /// Builds a space from a row-major `m × m` distance matrix and weights,
    /// checking the metric axioms and that the weights form a probability vector.
    pub fn new(distances: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let m = weights.len();
        if m == 0 {
            return Err(construction("a metric measure space needs at least one point"));
        }
        if distances.len() != m * m {
            return Err(construction(format!("{m} weights need a {m}×{m} distance matrix, got {} entries", distances.len())));
        }
        check_weights(&weights)?;
        let mut diameter = 0.0f64;
        for i in 0..m {
            if distances[i * m + i] != 0.0 {
                return Err(construction(format!("distance from point {i} to itself is {}", distances[i * m + i])));
            }
            for j in 0..m {
                let d = distances[i * m + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(construction(format!("distance ({i}, {j}) = {d} is not a finite nonnegative number")));
                }
                diameter = diameter.max(d);
            }
        }
        let sym_tol = 1e-12 * diameter.max(1.0);
        for i in 0..m {
            for j in i + 1..m {
                if (distances[i * m + j] - distances[j * m + i]).abs() > sym_tol {
                    return Err(construction(format!("distance matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let space = Self { size: m, distances, weights, diameter };
        space.check_triangles()?;
        Ok(space)
    }

    /// A space with the uniform measure `1/m` on its points.
    pub fn uniform(distances: Vec<f64>, size: usize) -> Result<Self> {
        Self::new(distances, vec![1.0 / size.max(1) as f64; size])
    }

    pub fn from_rows(rows: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        Self::new(rows.iter().flatten().copied().collect(), weights)
    }

    /// Euclidean distances between points (all of the same dimension) with the
    /// uniform measure.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let m = points.len();
        let mut distances = vec![0.0; m * m];
        for i in 0..m {
            for j in i + 1..m {
                if points[i].len() != points[j].len() {
                    return Err(construction("points have different dimensions"));
                }
                let d = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                distances[i * m + j] = d;
                distances[j * m + i] = d;
            }
        }
        Self::uniform(distances, m)
    }

    fn check_triangles(&self) -> Result<()> {
        let m = self.size;
        let tol = 1e-12 * self.diameter.max(1.0);
        let d = &self.distances;
        let violated = |i: usize, j: usize, k: usize| d[i * m + k] > d[i * m + j] + d[j * m + k] + tol;
        if m <= EXHAUSTIVE_TRIANGLE_CHECK {
            for i in 0..m {
                for j in 0..m {
                    let dij = d[i * m + j];
                    let row_j = &d[j * m..(j + 1) * m];
                    let row_i = &d[i * m..(i + 1) * m];
                    if let Some(k) = (0..m).find(|&k| row_i[k] > dij + row_j[k] + tol) {
                        return Err(triangle_error(i, j, k));
                    }
                }
            }
        } else {
            let mut rng = RngSeed(0x7472_6961_6e67_6c65).rng();
            for _ in 0..SAMPLED_TRIANGLES {
                let (i, j, k) = (rng.random_range(0..m), rng.random_range(0..m), rng.random_range(0..m));
                if violated(i, j, k) {
                    return Err(triangle_error(i, j, k));
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.distances[i * self.size..(i + 1) * self.size]
    }

    /// Row-major `m × m` distance matrix.
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.size as f64;
        self.weights.iter().all(|x| (x - w).abs() <= 1e-15)
    }

    /// The same space with distances divided by the diameter (diameter 1),
    /// or an unchanged copy when the diameter is 0.
    pub fn normalized(&self) -> Self {
        if self.diameter == 0.0 {
            return self.clone();
        }
        let inv = self.diameter;
        Self { size: self.size, distances: self.distances.iter().map(|d| d / inv).collect(), weights: self.weights.clone(), diameter: 1.0 }
    }

    /// Relabels points: point `i` of the result is point `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let m = self.size;
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(DmwError::Parameter(format!("not a permutation of 0..{m}")));
        }
        let mut distances = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                distances[i * m + j] = self.distance(perm[i], perm[j]);
            }
        }
        Ok(Self { size: m, distances, weights: perm.iter().map(|&p| self.weights[p]).collect(), diameter: self.diameter })
    }

    /// Multiset of off-diagonal distances over unordered pairs, sorted.
    pub fn pair_distances(&self) -> Vec<f64> {
        let m = self.size;
        let mut out = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for i in 0..m {
            out.extend_from_slice(&self.row(i)[i + 1..]);
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
        return Err(construction(format!("weight {i} = {w} is not a finite nonnegative number")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(construction(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

fn triangle_error(i: usize, j: usize, k: usize) -> DmwError {
    construction(format!("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})"))
}

pub(crate) fn construction(msg: impl Into<String>) -> DmwError {
    DmwError::Construction(msg.into())
}
