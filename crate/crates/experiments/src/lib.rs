//! Desk-scale experiment drivers for DMW statistics. Each driver takes its
//! config section and a seed and returns records, timings and charts; the
//! `dmw` binary writes them to disk.

pub mod chart;
pub mod config;
pub mod directions;
mod error;
pub mod hierarchy;
pub mod kernel_export;
pub mod output;
pub mod scalability;
mod stats;
pub mod tradeoff;
pub mod twosample;

use std::path::{Path, PathBuf};

pub use config::{Config, Format};
pub use error::{ExperimentError, Result};
pub use output::{Output, Timing};

/// The available experiments, one per CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Tradeoff,
    Directions,
    Scalability,
    TwoSample,
    Hierarchy,
    Counterexample,
    KernelExport,
}

impl Experiment {
    pub const ALL: [Experiment; 7] =
        [Self::Tradeoff, Self::Directions, Self::Scalability, Self::TwoSample, Self::Hierarchy, Self::Counterexample, Self::KernelExport];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tradeoff => "tradeoff",
            Self::Directions => "directions",
            Self::Scalability => "scalability",
            Self::TwoSample => "twosample",
            Self::Hierarchy => "hierarchy",
            Self::Counterexample => "counterexample",
            Self::KernelExport => "kernel-export",
        }
    }
}

/// Runs one experiment and writes its records (`<name>.csv` or `.json`),
/// timings, charts and a config echo into `out_dir`.
pub fn run_and_write(experiment: Experiment, config: &Config, out_dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let seed = config.seed;
    let name = experiment.name().replace('-', "_");
    let charts = config.charts;
    let mut written = match experiment {
        Experiment::Tradeoff => tradeoff::run_tradeoff(&config.tradeoff, seed)?.write(out_dir, &name, format, charts)?,
        Experiment::Directions => directions::run_directions(&config.directions, seed)?.write(out_dir, &name, format, charts)?,
        Experiment::Scalability => scalability::run_scalability(&config.scalability, seed)?.write(out_dir, &name, format, charts)?,
        Experiment::TwoSample => twosample::run_twosample(&config.twosample, seed)?.write(out_dir, &name, format, charts)?,
        Experiment::Hierarchy => hierarchy::run_hierarchy(&config.hierarchy, seed)?.write(out_dir, &name, format, charts)?,
        Experiment::Counterexample => hierarchy::run_counterexample(&config.counterexample)?.write(out_dir, &name, format, charts)?,
        Experiment::KernelExport => kernel_export::run_kernel_export(&config.kernel_export, seed)?.write(out_dir, &name, format, charts)?,
    };
    let echo = match experiment {
        Experiment::Tradeoff => output::write_config_echo(out_dir, &name, seed, &config.tradeoff)?,
        Experiment::Directions => output::write_config_echo(out_dir, &name, seed, &config.directions)?,
        Experiment::Scalability => output::write_config_echo(out_dir, &name, seed, &config.scalability)?,
        Experiment::TwoSample => output::write_config_echo(out_dir, &name, seed, &config.twosample)?,
        Experiment::Hierarchy => output::write_config_echo(out_dir, &name, seed, &config.hierarchy)?,
        Experiment::Counterexample => output::write_config_echo(out_dir, &name, seed, &config.counterexample)?,
        Experiment::KernelExport => output::write_config_echo(out_dir, &name, seed, &config.kernel_export)?,
    };
    written.push(echo);
    Ok(written)
}
