use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::Format;
use crate::error::Result;

/// One wall-clock measurement. Timings go to their own file so that the
/// record tables stay byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub key: String,
    pub phase: String,
    pub seconds: f64,
}

impl Timing {
    pub fn new(key: impl Into<String>, phase: &str, seconds: f64) -> Self {
        Self { key: key.into(), phase: phase.into(), seconds }
    }
}

/// Runs `f` and returns its result with the elapsed seconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Everything one experiment produces.
#[derive(Debug, Clone)]
pub struct Output<R> {
    pub records: Vec<R>,
    pub timings: Vec<Timing>,
    /// `(file stem, svg text)`.
    pub charts: Vec<(String, String)>,
    /// Extra files, `(file name, contents)`.
    pub files: Vec<(String, Vec<u8>)>,
}

impl<R> Output<R> {
    pub fn new(records: Vec<R>) -> Self {
        Self { records, timings: Vec::new(), charts: Vec::new(), files: Vec::new() }
    }
}

impl<R: Serialize> Output<R> {
    /// Writes `<name>.csv|json`, `<name>_timings.csv`, charts and extra files
    /// into `dir`, returning the paths written.
    pub fn write(&self, dir: &Path, name: &str, format: Format, charts: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = vec![write_records(dir, name, &self.records, format)?];
        if !self.timings.is_empty() {
            written.push(write_records(dir, &format!("{name}_timings"), &self.timings, Format::Csv)?);
        }
        if charts {
            for (stem, svg) in &self.charts {
                let path = dir.join(format!("{stem}.svg"));
                fs::write(&path, svg)?;
                written.push(path);
            }
        }
        for (file, bytes) in &self.files {
            let path = dir.join(file);
            fs::write(&path, bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn write_records<T: Serialize>(dir: &Path, stem: &str, records: &[T], format: Format) -> Result<PathBuf> {
    let path = match format {
        Format::Csv => dir.join(format!("{stem}.csv")),
        Format::Json => dir.join(format!("{stem}.json")),
    };
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_path(&path)?;
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut text = serde_json::to_string_pretty(records)?;
            text.push('\n');
            fs::write(&path, text)?;
        }
    }
    Ok(path)
}

#[derive(Serialize)]
struct Echo<'a, C: Serialize> {
    experiment: &'a str,
    seed: u64,
    config: &'a C,
    environment: Environment,
}

#[derive(Serialize)]
struct Environment {
    package_version: &'static str,
    os: &'static str,
    arch: &'static str,
}

/// Writes `<name>_config.json`: the effective config section, the seed and
/// a build stamp.
pub fn write_config_echo<C: Serialize>(dir: &Path, name: &str, seed: u64, config: &C) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let echo = Echo {
        experiment: name,
        seed,
        config,
        environment: Environment { package_version: env!("CARGO_PKG_VERSION"), os: std::env::consts::OS, arch: std::env::consts::ARCH },
    };
    let path = dir.join(format!("{name}_config.json"));
    let mut text = serde_json::to_string_pretty(&echo)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}
