use dmw::base::RngSeed;
use dmw::estimators::hierarchy_check;
use dmw::gw::{gw_entropic, gw_permutation_min, EntropicGwConfig};
use dmw::spaces::{counterexample_x, counterexample_y, random_euclidean_space, MetricMeasureSpace};
use serde::Serialize;

use crate::chart::{LineChart, Series};
use crate::config::{require, require_positive, CounterexampleConfig, HierarchyConfig};
use crate::error::Result;
use crate::output::{timed, Output, Timing};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyRecord {
    pub pair: String,
    pub order: usize,
    pub value: f64,
    /// Whether the pair's whole sequence is non-decreasing.
    pub monotone: bool,
    pub p: f64,
    pub seed: u64,
}

/// Exact DMW by order for the counterexample pair, a space against itself,
/// and random uniform pairs.
pub fn run_hierarchy(cfg: &HierarchyConfig, seed: u64) -> Result<Output<HierarchyRecord>> {
    require_positive("orders", &cfg.orders)?;
    require(cfg.points > 0 && cfg.dimension > 0, || "points and dimension must be positive".into())?;
    let root = RngSeed(seed);
    let mut pairs: Vec<(String, MetricMeasureSpace, MetricMeasureSpace)> =
        vec![("counterexample".into(), counterexample_x(), counterexample_y())];
    let same = random_euclidean_space(cfg.points, cfg.dimension, root.child(0))?;
    pairs.push(("identical".into(), same.clone(), same));
    for i in 0..cfg.random_pairs {
        let s = root.child(1).child(i as u64);
        pairs.push((
            format!("random-{i}"),
            random_euclidean_space(cfg.points, cfg.dimension, s.child(0))?,
            random_euclidean_space(cfg.points, cfg.dimension, s.child(1))?,
        ));
    }
    let mut out = Output::new(Vec::new());
    let mut chart = LineChart::new("Exact DMW by order", "order n", "DMW");
    for (name, x, y) in &pairs {
        let (report, secs) = timed(|| hierarchy_check(x, y, &cfg.orders, cfg.p));
        let report = report?;
        out.timings.push(Timing::new(format!("pair={name}"), "exact", secs));
        for (&order, &value) in report.orders.iter().zip(&report.values) {
            out.records.push(HierarchyRecord { pair: name.clone(), order, value, monotone: report.monotone, p: cfg.p, seed });
        }
        if name == "counterexample" || name == "random-0" {
            let pts = report.orders.iter().zip(&report.values).map(|(&n, &v)| (n as f64, v)).collect();
            chart = chart.with_series(Series::new(name.as_str(), pts));
        }
    }
    out.charts.push(("hierarchy".into(), chart.to_svg()));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleRecord {
    pub quantity: &'static str,
    pub order: Option<usize>,
    pub value: f64,
    pub p: f64,
}

/// The four-point pair whose order-2 laws coincide: exact DMW per order, the
/// permutation GW upper bound and the entropic GW objective.
pub fn run_counterexample(cfg: &CounterexampleConfig) -> Result<Output<CounterexampleRecord>> {
    require_positive("orders", &cfg.orders)?;
    let (x, y) = (counterexample_x(), counterexample_y());
    let mut out = Output::new(Vec::new());
    let (report, secs) = timed(|| hierarchy_check(&x, &y, &cfg.orders, cfg.p));
    let report = report?;
    out.timings.push(Timing::new("exact-dmw", "exact", secs));
    for (&order, &value) in report.orders.iter().zip(&report.values) {
        out.records.push(CounterexampleRecord { quantity: "exact-dmw", order: Some(order), value, p: cfg.p });
    }
    let perm = gw_permutation_min(&x, &y, cfg.p)?;
    out.records.push(CounterexampleRecord { quantity: "gw-permutation-min", order: None, value: perm.value, p: cfg.p });
    let ent = gw_entropic(&x, &y, &EntropicGwConfig::new(cfg.p, cfg.gw_epsilon))?;
    out.records.push(CounterexampleRecord { quantity: "gw-entropic", order: None, value: ent.value, p: cfg.p });
    Ok(out)
}
