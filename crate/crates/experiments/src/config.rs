use std::path::{Path, PathBuf};

use dmw::base::DirectionMode;
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};

/// Output format for record tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Serde-friendly mirror of [`DirectionMode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Dual,
    Euclidean,
}

impl From<Mode> for DirectionMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Dual => DirectionMode::Dual,
            Mode::Euclidean => DirectionMode::Euclidean,
        }
    }
}

/// Parameters of a noisy circle or ellipse point cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CloudConfig {
    pub samples: usize,
    pub noise: f64,
}

impl Default for CloudConfig {
    fn default() -> Self {
        Self { samples: 60, noise: 0.05 }
    }
}

/// Budgets of one sliced estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlicedBudget {
    pub order: usize,
    pub tuples: usize,
    pub directions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TradeoffConfig {
    pub cloud: CloudConfig,
    pub shift: f64,
    pub orders: Vec<usize>,
    pub tuples: usize,
    pub directions: usize,
    pub replicates: usize,
    pub p: f64,
    pub mode: Mode,
    pub reference: SlicedBudget,
}

impl Default for TradeoffConfig {
    fn default() -> Self {
        Self {
            cloud: CloudConfig::default(),
            shift: 0.3,
            orders: vec![2, 3, 4, 6, 8, 12],
            tuples: 400,
            directions: 64,
            replicates: 12,
            p: 1.0,
            mode: Mode::Euclidean,
            reference: SlicedBudget { order: 12, tuples: 4000, directions: 512 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectionsConfig {
    pub cloud: CloudConfig,
    pub shift: f64,
    pub order: usize,
    pub tuples: usize,
    pub direction_counts: Vec<usize>,
    pub reference_directions: usize,
    pub replicates: usize,
    pub p: f64,
    pub mode: Mode,
    /// Rescale both spaces to diameter 1 so the concentration bound uses R = 1.
    pub normalize: bool,
    pub tolerance: f64,
}

impl Default for DirectionsConfig {
    fn default() -> Self {
        Self {
            cloud: CloudConfig::default(),
            shift: 0.3,
            order: 4,
            tuples: 500,
            direction_counts: vec![8, 16, 32, 64, 128, 256, 512],
            reference_directions: 4096,
            replicates: 40,
            p: 1.0,
            mode: Mode::Dual,
            normalize: true,
            tolerance: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalabilityConfig {
    pub node_counts: Vec<usize>,
    pub blocks: usize,
    pub p_within: f64,
    pub p_between: f64,
    pub order: usize,
    pub tuples: usize,
    pub directions: usize,
    /// `L` values swept at `sweep_nodes` nodes.
    pub direction_sweep: Vec<usize>,
    /// `K` values swept at `sweep_nodes` nodes.
    pub tuple_sweep: Vec<usize>,
    pub sweep_nodes: usize,
    /// Timing repeats; the minimum is reported.
    pub repeats: usize,
    pub empirical_tuples: usize,
    pub empirical_max_nodes: usize,
    pub gw_epsilon: f64,
    pub gw_max_nodes: usize,
    /// Wall-clock cap per baseline instance, in seconds.
    pub cap_seconds: f64,
}

impl Default for ScalabilityConfig {
    fn default() -> Self {
        Self {
            node_counts: vec![50, 100, 200, 400],
            blocks: 2,
            p_within: 0.3,
            p_between: 0.05,
            order: 4,
            tuples: 2000,
            directions: 256,
            direction_sweep: vec![128, 256, 512],
            tuple_sweep: vec![1000, 2000, 4000],
            sweep_nodes: 200,
            repeats: 15,
            empirical_tuples: 150,
            empirical_max_nodes: 400,
            gw_epsilon: 0.05,
            gw_max_nodes: 200,
            cap_seconds: 60.0,
        }
    }
}

/// Kernel budgets shared by the two-sample and export experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub scales: Vec<usize>,
    /// Convex weights over `scales`; uniform when empty.
    pub weights: Vec<f64>,
    pub tuples: usize,
    pub directions: usize,
    pub mode: Mode,
    /// Bandwidth; the median heuristic when absent.
    pub lambda: Option<f64>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { scales: vec![2, 3, 4], weights: vec![], tuples: 200, directions: 32, mode: Mode::Euclidean, lambda: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoSampleConfig {
    pub cloud: CloudConfig,
    pub shifts: Vec<f64>,
    pub group_sizes: Vec<usize>,
    pub trials: usize,
    pub permutations: usize,
    pub alpha: f64,
    pub kernel: KernelConfig,
}

impl Default for TwoSampleConfig {
    fn default() -> Self {
        Self {
            cloud: CloudConfig { samples: 40, noise: 0.05 },
            shifts: vec![0.0, 0.02, 0.04, 0.08],
            group_sizes: vec![8, 16, 32],
            trials: 80,
            permutations: 199,
            alpha: 0.05,
            kernel: KernelConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HierarchyConfig {
    pub orders: Vec<usize>,
    pub p: f64,
    /// Random uniform space pairs, in addition to the fixed ones.
    pub random_pairs: usize,
    pub points: usize,
    pub dimension: usize,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        Self { orders: vec![2, 3, 4], p: 1.0, random_pairs: 10, points: 4, dimension: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub orders: Vec<usize>,
    pub p: f64,
    pub gw_epsilon: f64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self { orders: vec![2, 3, 4], p: 1.0, gw_epsilon: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelExportConfig {
    pub dataset_dir: Option<PathBuf>,
    pub dataset: String,
    pub node_budget: Option<usize>,
    pub kernel: KernelConfig,
    /// Also write a spectrally clipped copy when the Gram is indefinite.
    pub clip: bool,
}

impl Default for KernelExportConfig {
    fn default() -> Self {
        Self {
            dataset_dir: None,
            dataset: "MUTAG".into(),
            node_budget: None,
            kernel: KernelConfig { scales: vec![2, 3, 4, 6], ..KernelConfig::default() },
            clip: false,
        }
    }
}

/// Root of an experiment config file. Every section is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub charts: bool,
    pub tradeoff: TradeoffConfig,
    pub directions: DirectionsConfig,
    pub scalability: ScalabilityConfig,
    pub twosample: TwoSampleConfig,
    pub hierarchy: HierarchyConfig,
    pub counterexample: CounterexampleConfig,
    pub kernel_export: KernelExportConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 42,
            charts: true,
            tradeoff: TradeoffConfig::default(),
            directions: DirectionsConfig::default(),
            scalability: ScalabilityConfig::default(),
            twosample: TwoSampleConfig::default(),
            hierarchy: HierarchyConfig::default(),
            counterexample: CounterexampleConfig::default(),
            kernel_export: KernelExportConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))
    }
}

pub(crate) fn require(cond: bool, message: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(ExperimentError::Config(message()))
    }
}

pub(crate) fn require_positive(name: &str, values: &[usize]) -> Result<()> {
    require(!values.is_empty() && values.iter().all(|&v| v > 0), || format!("{name} must be a nonempty list of positive values"))
}
