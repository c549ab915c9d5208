use std::path::Path;

use dmw::base::RngSeed;
use dmw::kernels::{gram_from_dissimilarity, median_heuristic, msdmw_dissimilarity_matrix, write_gram};
use dmw::spaces::{load_tu_dataset, LabeledSpace, TuOptions};
use serde::Serialize;

use crate::config::{require, KernelExportConfig};
use crate::error::Result;
use crate::output::{timed, Output, Timing};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelExportRecord {
    pub dataset: String,
    pub graphs: usize,
    pub lambda: f64,
    pub min_eigenvalue: f64,
    pub psd: bool,
    pub file: String,
    pub seed: u64,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Gram file for labeled spaces, with a provenance header.
pub fn export_gram(name: &str, spaces: &[LabeledSpace], cfg: &KernelExportConfig, seed: u64) -> Result<Output<KernelExportRecord>> {
    require(!spaces.is_empty(), || format!("dataset {name} has no graphs"))?;
    let sketch = cfg.kernel.sketch_config()?;
    let plain: Vec<_> = spaces.iter().map(|s| s.space.clone()).collect();
    let (d, secs) = timed(|| msdmw_dissimilarity_matrix(&plain, &sketch, RngSeed(seed)));
    let d = d?;
    let lambda = cfg.kernel.lambda.unwrap_or_else(|| median_heuristic(&d));
    let gram = gram_from_dissimilarity(&d, lambda)?;
    let labels: Vec<String> = spaces.iter().map(|s| s.label.clone()).collect();
    let header = vec![
        ("dataset".to_string(), name.to_string()),
        ("seed".to_string(), seed.to_string()),
        ("estimator".to_string(), sketch.describe()),
        ("scales".to_string(), join(sketch.weights.scales())),
        ("scale_weights".to_string(), join(sketch.weights.weights())),
        ("node_budget".to_string(), cfg.node_budget.map_or("none".into(), |b| b.to_string())),
        ("order".to_string(), "rows and columns follow dataset graph order".to_string()),
    ];
    let file = format!("{name}_gram.txt");
    let mut bytes = Vec::new();
    write_gram(&mut bytes, &gram, &labels, &header)?;
    let mut out = Output::new(vec![KernelExportRecord {
        dataset: name.to_string(),
        graphs: spaces.len(),
        lambda,
        min_eigenvalue: gram.min_eigenvalue(),
        psd: gram.is_psd(),
        file: file.clone(),
        seed,
    }]);
    out.files.push((file, bytes));
    if cfg.clip && !gram.is_psd() {
        let mut clipped = Vec::new();
        write_gram(&mut clipped, &gram.clipped(), &labels, &header)?;
        out.files.push((format!("{name}_gram_clipped.txt"), clipped));
    }
    out.timings.push(Timing::new(format!("dataset={name}"), "dissimilarity", secs));
    Ok(out)
}

/// Loads a TU-format dataset and exports its kernel.
pub fn run_kernel_export(cfg: &KernelExportConfig, seed: u64) -> Result<Output<KernelExportRecord>> {
    let dir = cfg.dataset_dir.as_deref().unwrap_or(Path::new("."));
    let options = TuOptions { node_budget: cfg.node_budget, seed: RngSeed(seed) };
    let spaces = load_tu_dataset(dir, &cfg.dataset, &options)?;
    export_gram(&cfg.dataset, &spaces, cfg, seed)
}
