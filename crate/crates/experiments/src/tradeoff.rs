use dmw::base::{DirectionMode, RngSeed};
use dmw::estimators::{sliced_dmw, SlicedConfig};
use dmw::spaces::{space_from_cloud, MetricMeasureSpace, ShapeCloudSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::chart::{LineChart, Series};
use crate::config::{require, require_positive, CloudConfig, TradeoffConfig};
use crate::error::Result;
use crate::output::{timed, Output, Timing};
use crate::stats::mean_std;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffRecord {
    pub order: usize,
    pub tuples: usize,
    pub directions: usize,
    pub replicates: usize,
    pub mean_estimate: f64,
    pub std_estimate: f64,
    /// Mean of `|estimate − reference|` over replicates.
    pub mean_gap: f64,
    pub reference_value: f64,
    pub reference_order: usize,
    pub reference_tuples: usize,
    pub reference_directions: usize,
    pub shift: f64,
    pub p: f64,
    pub mode: &'static str,
    pub seed: u64,
}

pub(crate) fn circle_and_ellipse(cloud: &CloudConfig, shift: f64, seed: RngSeed) -> Result<(MetricMeasureSpace, MetricMeasureSpace)> {
    let x = space_from_cloud(&ShapeCloudSpec::circle(cloud.samples, cloud.noise, seed.child(0)))?;
    let y = space_from_cloud(&ShapeCloudSpec::ellipse(cloud.samples, shift, cloud.noise, seed.child(1)))?;
    Ok((x, y))
}

/// Compares a low-budget sliced estimate at each order with one high-order,
/// high-budget reference on a circle/ellipse pair.
pub fn run_tradeoff(cfg: &TradeoffConfig, seed: u64) -> Result<Output<TradeoffRecord>> {
    require_positive("orders", &cfg.orders)?;
    require(cfg.replicates > 0 && cfg.tuples > 0 && cfg.directions > 0, || "budgets must be positive".into())?;
    let root = RngSeed(seed);
    let mode = DirectionMode::from(cfg.mode);
    let (x, y) = circle_and_ellipse(&cfg.cloud, cfg.shift, root.child(0))?;
    let r = &cfg.reference;
    let ref_cfg = SlicedConfig::new(r.order, r.tuples, r.directions, cfg.p, mode);
    let (reference, ref_secs) = timed(|| sliced_dmw(&x, &y, &ref_cfg, root.child(1)));
    let reference = reference?.value;

    let cells: Vec<(usize, usize)> = cfg.orders.iter().flat_map(|&n| (0..cfg.replicates).map(move |k| (n, k))).collect();
    let estimates = cells
        .par_iter()
        .map(|&(n, k)| {
            let c = SlicedConfig::new(n, cfg.tuples, cfg.directions, cfg.p, mode);
            let (e, secs) = timed(|| sliced_dmw(&x, &y, &c, root.child(2).child(n as u64).child(k as u64)));
            e.map(|e| (e.value, secs))
        })
        .collect::<dmw::Result<Vec<_>>>()?;

    let mut out = Output::new(Vec::new());
    out.timings.push(Timing::new(format!("reference order={}", r.order), "sliced", ref_secs));
    for (i, &n) in cfg.orders.iter().enumerate() {
        let chunk = &estimates[i * cfg.replicates..(i + 1) * cfg.replicates];
        let values: Vec<f64> = chunk.iter().map(|e| e.0).collect();
        let gaps: Vec<f64> = values.iter().map(|v| (v - reference).abs()).collect();
        let (mean_estimate, std_estimate) = mean_std(&values);
        out.records.push(TradeoffRecord {
            order: n,
            tuples: cfg.tuples,
            directions: cfg.directions,
            replicates: cfg.replicates,
            mean_estimate,
            std_estimate,
            mean_gap: mean_std(&gaps).0,
            reference_value: reference,
            reference_order: r.order,
            reference_tuples: r.tuples,
            reference_directions: r.directions,
            shift: cfg.shift,
            p: cfg.p,
            mode: mode.name(),
            seed,
        });
        out.timings.push(Timing::new(format!("order={n}"), "sliced", chunk.iter().map(|e| e.1).sum()));
    }
    let gap = out.records.iter().map(|r| (r.order as f64, r.mean_gap)).collect();
    let std = out.records.iter().map(|r| (r.order as f64, r.std_estimate)).collect();
    let chart = LineChart::new("Approximation-estimation tradeoff", "order n", "value")
        .with_series(Series::new("mean gap to reference", gap))
        .with_series(Series::new("std over replicates", std));
    out.charts.push(("tradeoff".into(), chart.to_svg()));
    Ok(out)
}
