//! Estimators of the distance-matrix Wasserstein statistic: matrix laws of
//! sampled or enumerated tuples, empirical DMW by exact or entropic OT,
//! sliced DMW by random projection, and multi-scale aggregation.

mod empirical;
mod law;
mod multiscale;
mod sliced;

pub use empirical::{empirical_dmw, exact_dmw, hierarchy_check, law_distance, HierarchyReport, OtSolver, HIERARCHY_SLACK};
pub use law::{enumerate_matrix_law, sample_matrix_law, LawKind, MatrixLaw, ENUMERATION_BUDGET};
pub use multiscale::{multiscale_dmw, softmin_weights, MultiscaleEstimate, ScaleEstimator, ScaleWeights};
pub use sliced::{per_direction_costs, sliced_dmw, sliced_dmw_with_seeds, Layout, SlicedConfig, SlicedOutcome, SlicedSeeds, SlicedSketch};

use crate::base::{DirectionMode, RngSeed};

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateMode {
    /// Exact OT between fully enumerated laws.
    ExactEnumerated,
    /// Exact OT between (at least one) sampled laws.
    EmpiricalExactOt,
    /// Sinkhorn between laws; the value is the unregularized cost of the plan.
    EmpiricalSinkhorn { epsilon: f64, converged: bool },
    /// Monte Carlo slicing.
    Sliced { mode: DirectionMode },
}

impl EstimateMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ExactEnumerated => "exact-enumerated",
            Self::EmpiricalExactOt => "empirical-exact-ot",
            Self::EmpiricalSinkhorn { .. } => "empirical-sinkhorn",
            Self::Sliced { .. } => "sliced",
        }
    }
}

/// A DMW value with the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DmwEstimate {
    pub value: f64,
    pub p: f64,
    pub order: usize,
    /// Tuple budget `K`, when tuples were sampled.
    pub tuples: Option<usize>,
    /// Direction budget `L`, for sliced estimates.
    pub directions: Option<usize>,
    pub mode: EstimateMode,
    pub seed: Option<RngSeed>,
}

/// `max(x, 0)^{1/p}`; clamps tiny negative round-off from OT solvers.
pub(crate) fn pth_root(x: f64, p: f64) -> f64 {
    let x = x.max(0.0);
    if p == 1.0 {
        x
    } else {
        x.powf(1.0 / p)
    }
}
