use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::base::RngSeed;
use crate::error::{param, DmwError, Result};

use super::graph::{adjacency_from_edges, metric_from_adjacency};
use super::MetricMeasureSpace;

/// Four points with `(1,3)` and `(2,4)` at distance 2 and all other pairs at
/// distance 1: the shortest-path metric of the 4-cycle (1-based labels).
pub fn counterexample_x() -> MetricMeasureSpace {
    four_point_space(&[(0, 2), (1, 3)])
}

/// Four points with `(1,2)` and `(1,3)` at distance 2 and all other pairs at
/// distance 1. Same pair-distance histogram as [`counterexample_x`], not
/// isometric to it.
pub fn counterexample_y() -> MetricMeasureSpace {
    four_point_space(&[(0, 1), (0, 2)])
}

fn four_point_space(far: &[(usize, usize)]) -> MetricMeasureSpace {
    let mut d = vec![1.0; 16];
    for i in 0..4 {
        d[i * 4 + i] = 0.0;
    }
    for &(i, j) in far {
        d[i * 4 + j] = 2.0;
        d[j * 4 + i] = 2.0;
    }
    MetricMeasureSpace::uniform(d, 4).expect("four-point counterexample is a metric")
}

/// `m` uniform points in the unit cube of dimension `dim`, Euclidean metric
/// rescaled to diameter 1, uniform measure.
pub fn random_euclidean_space(m: usize, dim: usize, seed: RngSeed) -> Result<MetricMeasureSpace> {
    if m == 0 || dim == 0 {
        return Err(param("random space needs at least one point and one dimension"));
    }
    let mut rng = seed.rng();
    let points: Vec<Vec<f64>> = (0..m).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
    Ok(MetricMeasureSpace::from_points(&points)?.normalized())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Circle,
    Ellipse,
}

/// Noisy samples from the unit circle or from an ellipse whose minor axis is
/// shrunk by `eccentricity_shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeCloudSpec {
    pub shape: Shape,
    pub samples: usize,
    pub eccentricity_shift: f64,
    pub noise: f64,
    pub seed: RngSeed,
}

impl ShapeCloudSpec {
    pub fn circle(samples: usize, noise: f64, seed: RngSeed) -> Self {
        Self { shape: Shape::Circle, samples, eccentricity_shift: 0.0, noise, seed }
    }

    pub fn ellipse(samples: usize, eccentricity_shift: f64, noise: f64, seed: RngSeed) -> Self {
        Self { shape: Shape::Ellipse, samples, eccentricity_shift, noise, seed }
    }

    fn shift(&self) -> f64 {
        match self.shape {
            Shape::Circle => 0.0,
            Shape::Ellipse => self.eccentricity_shift,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(param(format!("point cloud needs at least 2 samples, got {}", self.samples)));
        }
        if !self.noise.is_finite() || self.noise < 0.0 {
            return Err(param(format!("noise scale must be finite and ≥ 0, got {}", self.noise)));
        }
        if !self.eccentricity_shift.is_finite() || self.eccentricity_shift < 0.0 {
            return Err(param(format!("eccentricity shift must be finite and ≥ 0, got {}", self.eccentricity_shift)));
        }
        Ok(())
    }
}

/// Angles uniform on `[0, 2π)`, points `(cos t, (1 − Δ) sin t)` plus isotropic
/// Gaussian noise, Euclidean distances, uniform measure.
pub fn space_from_cloud(spec: &ShapeCloudSpec) -> Result<MetricMeasureSpace> {
    spec.validate()?;
    let mut rng = spec.seed.rng();
    let angles: Vec<f64> = (0..spec.samples).map(|_| rng.random::<f64>() * TAU).collect();
    cloud(spec, &angles, &mut rng)
}

/// [`space_from_cloud`] at caller-chosen angles; `spec.seed` drives only the noise.
pub fn space_from_cloud_at_angles(spec: &ShapeCloudSpec, angles: &[f64]) -> Result<MetricMeasureSpace> {
    spec.validate()?;
    if angles.len() != spec.samples {
        return Err(param(format!("expected {} angles, got {}", spec.samples, angles.len())));
    }
    cloud(spec, angles, &mut spec.seed.rng())
}

fn cloud<R: Rng>(spec: &ShapeCloudSpec, angles: &[f64], rng: &mut R) -> Result<MetricMeasureSpace> {
    let minor = 1.0 - spec.shift();
    let points: Vec<Vec<f64>> = angles
        .iter()
        .map(|t| {
            let mut p = vec![t.cos(), minor * t.sin()];
            if spec.noise > 0.0 {
                for c in &mut p {
                    *c += spec.noise * rng.sample::<f64, _>(StandardNormal);
                }
            }
            p
        })
        .collect();
    MetricMeasureSpace::from_points(&points)
}

/// Maximum number of resamples when an SBM draw is disconnected.
pub const SBM_RETRY_CAP: usize = 64;

/// Stochastic block model: independent edges with probability `p_within`
/// inside a block and `p_between` across blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub block_sizes: Vec<usize>,
    pub p_within: f64,
    pub p_between: f64,
    pub seed: RngSeed,
}

/// Samples SBM graphs until one is connected (at most [`SBM_RETRY_CAP`]
/// attempts) and returns its normalized shortest-path space.
pub fn space_from_sbm(spec: &SbmSpec) -> Result<MetricMeasureSpace> {
    for p in [spec.p_within, spec.p_between] {
        if !(0.0..=1.0).contains(&p) {
            return Err(param(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let n: usize = spec.block_sizes.iter().sum();
    if n == 0 {
        return Err(param("SBM needs at least one node"));
    }
    let block: Vec<usize> = spec.block_sizes.iter().enumerate().flat_map(|(b, &size)| std::iter::repeat_n(b, size)).collect();
    for attempt in 0..SBM_RETRY_CAP {
        let mut rng = spec.seed.child(attempt as u64).rng();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let p = if block[i] == block[j] { spec.p_within } else { spec.p_between };
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        let adj = adjacency_from_edges(n, &edges);
        if super::graph::largest_component(&adj).len() == n {
            return Ok(metric_from_adjacency(&adj));
        }
    }
    Err(DmwError::Generation(format!(
        "no connected SBM sample in {SBM_RETRY_CAP} attempts (blocks {:?}, p_within {}, p_between {})",
        spec.block_sizes, spec.p_within, spec.p_between
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degree_multiset(space: &MetricMeasureSpace, level: f64) -> Vec<usize> {
        let m = space.size();
        let mut deg: Vec<usize> = (0..m).map(|i| (0..m).filter(|&j| space.distance(i, j) == level).count()).collect();
        deg.sort_unstable();
        deg
    }

    #[test]
    fn counterexamples_share_pair_histogram() {
        for s in [counterexample_x(), counterexample_y()] {
            assert_eq!(s.pair_distances(), vec![1.0, 1.0, 1.0, 1.0, 2.0, 2.0]);
            assert!(s.is_uniform());
        }
    }

    #[test]
    fn counterexamples_are_not_isometric() {
        assert_eq!(degree_multiset(&counterexample_x(), 2.0), vec![1, 1, 1, 1]);
        assert_eq!(degree_multiset(&counterexample_y(), 2.0), vec![0, 1, 1, 2]);
    }

    #[test]
    fn unit_circle_square() {
        let spec = ShapeCloudSpec::circle(4, 0.0, RngSeed(0));
        let angles = [0.0, TAU / 4.0, TAU / 2.0, 3.0 * TAU / 4.0];
        let s = space_from_cloud_at_angles(&spec, &angles).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = match (i as i32 - j as i32).rem_euclid(4) {
                    0 => 0.0,
                    2 => 2.0,
                    _ => 2f64.sqrt(),
                };
                assert!((s.distance(i, j) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cloud_determinism_and_degenerate_axis() {
        let a = space_from_cloud(&ShapeCloudSpec::ellipse(30, 0.0, 0.05, RngSeed(3))).unwrap();
        let b = space_from_cloud(&ShapeCloudSpec::ellipse(30, 0.0, 0.05, RngSeed(3))).unwrap();
        let c = space_from_cloud(&ShapeCloudSpec::circle(30, 0.05, RngSeed(3))).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        // Δ = 1 puts every point on the x-axis: distances are |cos s − cos t|.
        let angles: Vec<f64> = (0..6).map(|k| k as f64).collect();
        let flat = space_from_cloud_at_angles(&ShapeCloudSpec::ellipse(6, 1.0, 0.0, RngSeed(0)), &angles).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((flat.distance(i, j) - (angles[i].cos() - angles[j].cos()).abs()).abs() < 1e-12);
            }
        }
        assert!(space_from_cloud(&ShapeCloudSpec::circle(1, 0.0, RngSeed(0))).is_err());
        assert!(space_from_cloud(&ShapeCloudSpec::circle(5, -1.0, RngSeed(0))).is_err());
    }

    #[test]
    fn sbm_cases() {
        let complete = space_from_sbm(&SbmSpec { block_sizes: vec![3, 4], p_within: 1.0, p_between: 1.0, seed: RngSeed(1) }).unwrap();
        assert!(complete.pair_distances().iter().all(|&d| d == 1.0));
        let split = space_from_sbm(&SbmSpec { block_sizes: vec![3, 4], p_within: 1.0, p_between: 0.0, seed: RngSeed(1) });
        assert!(matches!(split, Err(DmwError::Generation(_))));
        let spec = SbmSpec { block_sizes: vec![20, 20], p_within: 0.3, p_between: 0.05, seed: RngSeed(8) };
        assert_eq!(space_from_sbm(&spec).unwrap(), space_from_sbm(&spec).unwrap());
    }
}
