use dmw::base::{DirectionMode, DirectionSet, RngSeed};
use dmw::estimators::{sample_matrix_law, MatrixLaw, SlicedSketch};
use rayon::prelude::*;
use serde::Serialize;

use crate::chart::{LineChart, Series};
use crate::config::{require, require_positive, DirectionsConfig};
use crate::error::Result;
use crate::output::{timed, Output, Timing};
use crate::stats::mean_std;
use crate::tradeoff::circle_and_ellipse;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionsRecord {
    pub directions: usize,
    pub replicates: usize,
    /// Mean over replicates of the `p`-powered statistic `(1/L) Σ c_ℓ`.
    pub mean_statistic: f64,
    pub std_statistic: f64,
    /// `R^p / (2 √L)`.
    pub bound: f64,
    /// Fraction of replicates whose value lies within the relative tolerance
    /// of the reference value.
    pub within_fraction: f64,
    pub reference_value: f64,
    pub reference_directions: usize,
    pub order: usize,
    pub tuples: usize,
    pub p: f64,
    pub mode: &'static str,
    pub seed: u64,
}

fn powered_statistic(lx: &MatrixLaw, ly: &MatrixLaw, dirs: &DirectionSet) -> dmw::Result<f64> {
    let costs = SlicedSketch::from_law(lx, dirs)?.per_direction_costs(&SlicedSketch::from_law(ly, dirs)?)?;
    Ok(costs.iter().sum::<f64>() / costs.len() as f64)
}

/// Direction-count sweep at fixed sampled atoms: only the directions are
/// redrawn between replicates, isolating the Monte Carlo slicing error.
pub fn run_directions(cfg: &DirectionsConfig, seed: u64) -> Result<Output<DirectionsRecord>> {
    require_positive("direction_counts", &cfg.direction_counts)?;
    require(cfg.replicates > 0 && cfg.tuples > 0 && cfg.reference_directions > 0, || "budgets must be positive".into())?;
    let root = RngSeed(seed);
    let mode = DirectionMode::from(cfg.mode);
    let (mut x, mut y) = circle_and_ellipse(&cfg.cloud, cfg.shift, root.child(0))?;
    if cfg.normalize {
        x = x.normalized();
        y = y.normalized();
    }
    let radius = x.diameter().max(y.diameter());
    let lx = sample_matrix_law(&x, cfg.order, cfg.tuples, root.child(1))?;
    let ly = sample_matrix_law(&y, cfg.order, cfg.tuples, root.child(2))?;
    let ref_seed = root.child(3);
    let ref_dirs = DirectionSet::sample(cfg.order, cfg.reference_directions, cfg.p, mode, ref_seed)?;
    let reference = powered_statistic(&lx, &ly, &ref_dirs)?.powf(1.0 / cfg.p);

    let mut out = Output::new(Vec::new());
    for &l in &cfg.direction_counts {
        let (stats, secs) = timed(|| {
            (0..cfg.replicates)
                .into_par_iter()
                .map(|r| {
                    // at the reference budget, replicates reuse the reference directions
                    let s = if l == cfg.reference_directions { ref_seed } else { root.child(4).child(l as u64).child(r as u64) };
                    powered_statistic(&lx, &ly, &DirectionSet::sample(cfg.order, l, cfg.p, mode, s)?)
                })
                .collect::<dmw::Result<Vec<_>>>()
        });
        let stats = stats?;
        let (mean_statistic, std_statistic) = mean_std(&stats);
        let within = stats.iter().filter(|s| (s.powf(1.0 / cfg.p) - reference).abs() <= cfg.tolerance * reference).count();
        out.records.push(DirectionsRecord {
            directions: l,
            replicates: cfg.replicates,
            mean_statistic,
            std_statistic,
            bound: radius.powf(cfg.p) / (2.0 * (l as f64).sqrt()),
            within_fraction: within as f64 / cfg.replicates as f64,
            reference_value: reference,
            reference_directions: cfg.reference_directions,
            order: cfg.order,
            tuples: cfg.tuples,
            p: cfg.p,
            mode: mode.name(),
            seed,
        });
        out.timings.push(Timing::new(format!("directions={l}"), "slicing", secs));
    }
    let pick = |f: fn(&DirectionsRecord) -> f64| out.records.iter().map(|r| (r.directions as f64, f(r))).collect::<Vec<_>>();
    let spread = LineChart::new("Finite-direction concentration", "directions L", "std of powered statistic")
        .log_x()
        .with_series(Series::new("empirical std", pick(|r| r.std_statistic)))
        .with_series(Series::new("R^p / (2 sqrt L)", pick(|r| r.bound)));
    let hits = LineChart::new("Agreement with the high-L reference", "directions L", "fraction within tolerance")
        .log_x()
        .with_series(Series::new("within tolerance", pick(|r| r.within_fraction)));
    out.charts.push(("directions_std".into(), spread.to_svg()));
    out.charts.push(("directions_within".into(), hits.to_svg()));
    Ok(out)
}
