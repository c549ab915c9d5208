use dmw::base::RngSeed;
use dmw::estimators::{Layout, ScaleWeights};
use dmw::kernels::{
    gram_from_dissimilarity, median_heuristic, msdmw_dissimilarity_matrix, permutation_test, KernelSketchConfig, TwoSampleResult,
};
use dmw::spaces::{space_from_cloud, ShapeCloudSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::chart::{LineChart, Series};
use crate::config::{require, require_positive, CloudConfig, KernelConfig, TwoSampleConfig};
use crate::error::Result;
use crate::output::{timed, Output, Timing};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSampleRecord {
    pub shift: f64,
    pub group_size: usize,
    pub trials: usize,
    pub rejections: usize,
    pub rejection_rate: f64,
    pub mean_p_value: f64,
    pub permutations: usize,
    pub alpha: f64,
    pub statistic: &'static str,
    pub seed: u64,
}

impl KernelConfig {
    pub fn sketch_config(&self) -> Result<KernelSketchConfig> {
        let weights = if self.weights.is_empty() {
            ScaleWeights::uniform(self.scales.clone())?
        } else {
            ScaleWeights::new(self.scales.clone(), self.weights.clone())?
        };
        Ok(KernelSketchConfig {
            weights,
            tuples: self.tuples,
            directions: self.directions,
            mode: self.mode.into(),
            p: 1.0,
            layout: Layout::InMemory,
        })
    }
}

/// One MMD permutation test between `group_size` circles and `group_size`
/// ellipses with eccentricity shift `shift`.
pub fn twosample_trial(
    cloud: &CloudConfig,
    kernel: &KernelConfig,
    shift: f64,
    group_size: usize,
    permutations: usize,
    alpha: f64,
    seed: RngSeed,
) -> Result<TwoSampleResult> {
    let mut spaces = Vec::with_capacity(2 * group_size);
    for i in 0..group_size {
        spaces.push(space_from_cloud(&ShapeCloudSpec::circle(cloud.samples, cloud.noise, seed.child(0).child(i as u64)))?);
    }
    for i in 0..group_size {
        spaces.push(space_from_cloud(&ShapeCloudSpec::ellipse(cloud.samples, shift, cloud.noise, seed.child(1).child(i as u64)))?);
    }
    let labels: Vec<bool> = (0..2 * group_size).map(|i| i >= group_size).collect();
    let d = msdmw_dissimilarity_matrix(&spaces, &kernel.sketch_config()?, seed.child(2))?;
    let lambda = kernel.lambda.unwrap_or_else(|| median_heuristic(&d));
    let gram = gram_from_dissimilarity(&d, lambda)?;
    Ok(permutation_test(&gram, &labels, permutations, alpha, seed.child(3))?)
}

/// Rejection rates of the MMD permutation test over a grid of shifts and
/// group sizes.
pub fn run_twosample(cfg: &TwoSampleConfig, seed: u64) -> Result<Output<TwoSampleRecord>> {
    require_positive("group_sizes", &cfg.group_sizes)?;
    require(!cfg.shifts.is_empty() && cfg.shifts.iter().all(|s| (0.0..=1.0).contains(s)), || "shifts must lie in [0, 1]".into())?;
    require(cfg.trials > 0 && cfg.permutations > 0, || "trials and permutations must be positive".into())?;
    require(cfg.group_sizes.iter().all(|&g| g >= 2), || "group sizes must be at least 2".into())?;
    let root = RngSeed(seed);
    let mut out = Output::new(Vec::new());
    for (si, &shift) in cfg.shifts.iter().enumerate() {
        for (gi, &g) in cfg.group_sizes.iter().enumerate() {
            let cell = root.child(si as u64).child(gi as u64);
            let (results, secs) = timed(|| {
                (0..cfg.trials)
                    .into_par_iter()
                    .map(|t| twosample_trial(&cfg.cloud, &cfg.kernel, shift, g, cfg.permutations, cfg.alpha, cell.child(t as u64)))
                    .collect::<Result<Vec<_>>>()
            });
            let results = results?;
            let rejections = results.iter().filter(|r| r.reject).count();
            out.records.push(TwoSampleRecord {
                shift,
                group_size: g,
                trials: cfg.trials,
                rejections,
                rejection_rate: rejections as f64 / cfg.trials as f64,
                mean_p_value: results.iter().map(|r| r.p_value).sum::<f64>() / cfg.trials as f64,
                permutations: cfg.permutations,
                alpha: cfg.alpha,
                statistic: "unbiased-mmd2",
                seed,
            });
            out.timings.push(Timing::new(format!("shift={shift} group_size={g}"), "total", secs));
        }
    }
    let mut chart = LineChart::new("Two-sample test power", "eccentricity shift", "rejection rate");
    for &g in &cfg.group_sizes {
        let pts = out.records.iter().filter(|r| r.group_size == g).map(|r| (r.shift, r.rejection_rate)).collect();
        chart = chart.with_series(Series::new(format!("{g} per group"), pts));
    }
    out.charts.push(("twosample".into(), chart.to_svg()));
    Ok(out)
}
