use rayon::prelude::*;

use crate::base::{check_exponent, num_pairs, DirectionMode, DirectionSet, RngSeed};
use crate::error::{dim, param, Result};
use crate::ot::{sorted_uniform_cost, w1d_pth_power, DiscreteMeasure1D};
use crate::spaces::MetricMeasureSpace;

use super::law::{MatrixLaw, TupleSampler};
use super::{pth_root, DmwEstimate, EstimateMode};

/// Memory layout for building a sliced sketch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    /// Materialize the full `K × N` atom matrix once.
    #[default]
    InMemory,
    /// Never store the atom matrix: for each batch of directions, replay the
    /// tuple stream and project each tuple as it is drawn. Working memory is
    /// `O(N + K · batch)`. Output is bit-identical to [`Layout::InMemory`].
    Streaming { batch: usize },
}

/// Budgets for one sliced estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicedConfig {
    pub order: usize,
    pub tuples: usize,
    pub directions: usize,
    pub p: f64,
    pub mode: DirectionMode,
    pub layout: Layout,
}

impl SlicedConfig {
    pub fn new(order: usize, tuples: usize, directions: usize, p: f64, mode: DirectionMode) -> Self {
        Self { order, tuples, directions, p, mode, layout: Layout::InMemory }
    }

    pub fn with_layout(mut self, layout: Layout) -> Self {
        self.layout = layout;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(param(format!("tuple order must be at least 2, got {}", self.order)));
        }
        if self.tuples == 0 {
            return Err(param("tuple count K must be at least 1"));
        }
        if self.directions == 0 {
            return Err(param("direction count L must be at least 1"));
        }
        if let Layout::Streaming { batch: 0 } = self.layout {
            return Err(param("streaming batch size must be at least 1"));
        }
        check_exponent(self.p)
    }

    pub fn sample_directions(&self, seed: RngSeed) -> Result<DirectionSet> {
        DirectionSet::sample(self.order, self.directions, self.p, self.mode, seed)
    }
}

/// Seeds for the three random streams of a sliced estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlicedSeeds {
    pub x_tuples: RngSeed,
    pub y_tuples: RngSeed,
    pub directions: RngSeed,
}

impl SlicedSeeds {
    /// Independent child streams of one root seed.
    pub fn from_root(seed: RngSeed) -> Self {
        Self { x_tuples: seed.child(0), y_tuples: seed.child(1), directions: seed.child(2) }
    }

    /// Both spaces replay the same tuple stream.
    pub fn shared(seed: RngSeed) -> Self {
        Self { x_tuples: seed.child(0), y_tuples: seed.child(0), directions: seed.child(2) }
    }
}

/// Sorted projections of one space's sampled tuples, one row per direction.
///
/// Two sketches built with the same directions and tuple budget are compared
/// in `O(LK)`; this is how a whole collection of spaces shares samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicedSketch {
    order: usize,
    p: f64,
    tuples: usize,
    directions: usize,
    sorted: Vec<f64>,
}

impl SlicedSketch {
    pub fn build(
        space: &MetricMeasureSpace,
        directions: &DirectionSet,
        tuples: usize,
        tuple_seed: RngSeed,
        layout: Layout,
    ) -> Result<Self> {
        if tuples == 0 {
            return Err(param("tuple count K must be at least 1"));
        }
        let order = directions.order();
        let l = directions.len();
        match layout {
            Layout::InMemory => {
                let law = super::law::sample_matrix_law(space, order, tuples, tuple_seed)?;
                Self::from_law(&law, directions)
            }
            Layout::Streaming { batch } => {
                if batch == 0 {
                    return Err(param("streaming batch size must be at least 1"));
                }
                let mut sorted = vec![0.0; l * tuples];
                let mut entries = vec![0.0; num_pairs(order)];
                for start in (0..l).step_by(batch) {
                    let end = (start + batch).min(l);
                    let block = &mut sorted[start * tuples..end * tuples];
                    let mut sampler = TupleSampler::new(space, order, tuple_seed);
                    for k in 0..tuples {
                        sampler.next_into(&mut entries);
                        for (b, dir) in (start..end).enumerate() {
                            block[b * tuples + k] = crate::base::dot(directions.theta(dir), &entries);
                        }
                    }
                    block.par_chunks_exact_mut(tuples).for_each(|row| row.sort_unstable_by(f64::total_cmp));
                }
                Ok(Self { order, p: directions.p(), tuples, directions: l, sorted })
            }
        }
    }

    /// Sketch of an already sampled law; it must carry uniform weights.
    pub fn from_law(law: &MatrixLaw, directions: &DirectionSet) -> Result<Self> {
        if law.order() != directions.order() {
            return Err(dim(format!("law of order {} with directions of order {}", law.order(), directions.order())));
        }
        if !law.is_uniform() {
            return Err(param("sliced sketches need a uniformly weighted law"));
        }
        let k = law.len();
        let mut sorted = vec![0.0; directions.len() * k];
        sorted.par_chunks_exact_mut(k).enumerate().for_each(|(l, row)| {
            let theta = directions.theta(l);
            for (slot, atom) in row.iter_mut().zip(law.atoms().chunks_exact(law.width())) {
                *slot = crate::base::dot(theta, atom);
            }
            row.sort_unstable_by(f64::total_cmp);
        });
        Ok(Self { order: law.order(), p: directions.p(), tuples: k, directions: directions.len(), sorted })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tuples(&self) -> usize {
        self.tuples
    }

    pub fn directions(&self) -> usize {
        self.directions
    }

    /// Ascending projected values along direction `l`.
    pub fn projections(&self, l: usize) -> &[f64] {
        &self.sorted[l * self.tuples..(l + 1) * self.tuples]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.order != other.order || self.directions != other.directions || self.p != other.p {
            return Err(dim("sketches must share order, exponent and direction set"));
        }
        Ok(())
    }

    /// The 1D costs `c_ℓ = W_p^p` between the projected samples, per direction.
    pub fn per_direction_costs(&self, other: &Self) -> Result<Vec<f64>> {
        self.check_compatible(other)?;
        (0..self.directions)
            .map(|l| {
                let (a, b) = (self.projections(l), other.projections(l));
                if a.len() == b.len() {
                    Ok(sorted_uniform_cost(a, b, self.p))
                } else {
                    w1d_pth_power(&DiscreteMeasure1D::uniform(a.to_vec())?, &DiscreteMeasure1D::uniform(b.to_vec())?, self.p)
                }
            })
            .collect()
    }

    /// `((1/L) Σ_ℓ c_ℓ)^{1/p}`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        let costs = self.per_direction_costs(other)?;
        Ok(pth_root(costs.iter().sum::<f64>() / costs.len() as f64, self.p))
    }
}

/// Per-direction `W_p^p` between the projections of two (arbitrarily
/// weighted) matrix laws.
pub fn per_direction_costs(x: &MatrixLaw, y: &MatrixLaw, directions: &DirectionSet) -> Result<Vec<f64>> {
    if x.order() != directions.order() || y.order() != directions.order() {
        return Err(dim("laws and directions must share one order"));
    }
    let project = |law: &MatrixLaw, theta: &[f64]| -> Result<DiscreteMeasure1D> {
        let values = law.atoms().chunks_exact(law.width()).map(|a| crate::base::dot(theta, a)).collect();
        DiscreteMeasure1D::new(values, law.weights().to_vec())
    };
    directions.iter().map(|theta| w1d_pth_power(&project(x, theta)?, &project(y, theta)?, directions.p())).collect()
}

/// A sliced estimate together with its per-direction costs.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicedOutcome {
    pub estimate: DmwEstimate,
    /// `c_ℓ` for each direction; their mean is `estimate.value^p`.
    pub costs: Vec<f64>,
}

/// Sliced DMW: sample `K` tuples from each space and `L` directions, project,
/// sort, average the `p`-powered 1D costs and take the `p`-th root.
pub fn sliced_dmw(x: &MetricMeasureSpace, y: &MetricMeasureSpace, config: &SlicedConfig, seed: RngSeed) -> Result<DmwEstimate> {
    let mut outcome = sliced_dmw_with_seeds(x, y, config, &SlicedSeeds::from_root(seed))?;
    outcome.estimate.seed = Some(seed);
    Ok(outcome.estimate)
}

pub fn sliced_dmw_with_seeds(
    x: &MetricMeasureSpace,
    y: &MetricMeasureSpace,
    config: &SlicedConfig,
    seeds: &SlicedSeeds,
) -> Result<SlicedOutcome> {
    config.validate()?;
    let directions = config.sample_directions(seeds.directions)?;
    let sx = SlicedSketch::build(x, &directions, config.tuples, seeds.x_tuples, config.layout)?;
    let sy = SlicedSketch::build(y, &directions, config.tuples, seeds.y_tuples, config.layout)?;
    let costs = sx.per_direction_costs(&sy)?;
    let value = pth_root(costs.iter().sum::<f64>() / costs.len() as f64, config.p);
    let estimate = DmwEstimate {
        value,
        p: config.p,
        order: config.order,
        tuples: Some(config.tuples),
        directions: Some(config.directions),
        mode: EstimateMode::Sliced { mode: config.mode },
        seed: None,
    };
    Ok(SlicedOutcome { estimate, costs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::SlicingDirection;
    use crate::estimators::{enumerate_matrix_law, exact_dmw, sample_matrix_law};
    use crate::spaces::random_euclidean_space;

    fn pair() -> (MetricMeasureSpace, MetricMeasureSpace) {
        (random_euclidean_space(9, 2, RngSeed(1)).unwrap(), random_euclidean_space(11, 3, RngSeed(2)).unwrap())
    }

    #[test]
    fn same_space_same_stream_is_zero() {
        let (x, _) = pair();
        let cfg = SlicedConfig::new(4, 100, 16, 2.0, DirectionMode::Euclidean);
        let out = sliced_dmw_with_seeds(&x, &x, &cfg, &SlicedSeeds::shared(RngSeed(3))).unwrap();
        assert_eq!(out.estimate.value, 0.0);
    }

    #[test]
    fn streaming_matches_in_memory_bitwise() {
        let (x, y) = pair();
        for batch in [1, 3, 16, 40] {
            let cfg = SlicedConfig::new(5, 137, 16, 1.0, DirectionMode::Dual);
            let a = sliced_dmw(&x, &y, &cfg, RngSeed(4)).unwrap();
            let b = sliced_dmw(&x, &y, &cfg.with_layout(Layout::Streaming { batch }), RngSeed(4)).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits(), "batch {batch}");
        }
    }

    #[test]
    fn single_pinned_direction_is_one_dimensional_transport() {
        let (x, y) = pair();
        let n = 3;
        let theta = [0.2, -0.5, 0.3];
        let dir = SlicingDirection::from_vec(n, 2.0, DirectionMode::Euclidean, {
            let norm = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
            theta.iter().map(|t| t / norm).collect()
        })
        .unwrap();
        let set = DirectionSet::from_directions(std::slice::from_ref(&dir)).unwrap();
        let lx = sample_matrix_law(&x, n, 60, RngSeed(5)).unwrap();
        let ly = sample_matrix_law(&y, n, 60, RngSeed(6)).unwrap();
        let sx = SlicedSketch::from_law(&lx, &set).unwrap();
        let sy = SlicedSketch::from_law(&ly, &set).unwrap();
        let px = DiscreteMeasure1D::uniform((0..60).map(|k| dir.project(lx.atom(k))).collect()).unwrap();
        let py = DiscreteMeasure1D::uniform((0..60).map(|k| dir.project(ly.atom(k))).collect()).unwrap();
        let oracle = w1d_pth_power(&px, &py, 2.0).unwrap().sqrt();
        assert!((sx.distance(&sy).unwrap() - oracle).abs() <= 1e-12);
    }

    #[test]
    fn dual_slices_lower_bound_exact_dmw() {
        let x = random_euclidean_space(4, 2, RngSeed(7)).unwrap();
        let y = random_euclidean_space(4, 2, RngSeed(8)).unwrap();
        for p in [1.0, 2.0] {
            let exact = exact_dmw(&x, &y, 3, p).unwrap().value;
            let lx = enumerate_matrix_law(&x, 3).unwrap();
            let ly = enumerate_matrix_law(&y, 3).unwrap();
            let dirs = DirectionSet::sample(3, 100, p, DirectionMode::Dual, RngSeed(9)).unwrap();
            for c in per_direction_costs(&lx, &ly, &dirs).unwrap() {
                assert!(c.powf(1.0 / p) <= exact + 1e-9);
            }
        }
    }

    #[test]
    fn parameters_are_validated() {
        let (x, y) = pair();
        let bad = [
            SlicedConfig::new(1, 10, 10, 1.0, DirectionMode::Dual),
            SlicedConfig::new(3, 0, 10, 1.0, DirectionMode::Dual),
            SlicedConfig::new(3, 10, 0, 1.0, DirectionMode::Dual),
            SlicedConfig::new(3, 10, 10, 0.5, DirectionMode::Dual),
        ];
        for cfg in bad {
            assert!(sliced_dmw(&x, &y, &cfg, RngSeed(0)).is_err());
        }
    }
}
