//! Reader for the TU graph dataset layout:
//!
//! * `DS_A.txt`: one `row, col` edge per line, 1-based global node ids;
//! * `DS_graph_indicator.txt`: line `k` holds the 1-based graph id of node `k`;
//! * `DS_graph_labels.txt`: line `g` holds the class label of graph `g`.
//!
//! Node and edge attribute files are ignored.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::base::RngSeed;
use crate::error::{DmwError, Result};

use super::graph::{adjacency_from_edges, induced_subgraph, largest_component, metric_from_adjacency};
use super::{space_from_graph, GraphSpec, MetricMeasureSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TuOptions {
    /// Optional per-graph node budget; graph `g` truncates with `seed.child(g)`.
    pub node_budget: Option<usize>,
    pub seed: RngSeed,
}

impl Default for TuOptions {
    fn default() -> Self {
        Self { node_budget: None, seed: RngSeed(0) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSpace {
    pub space: MetricMeasureSpace,
    /// Class label exactly as written in the labels file.
    pub label: String,
}

fn ingestion(path: &Path, line: Option<usize>, message: impl Into<String>) -> DmwError {
    DmwError::Ingestion { path: path.to_path_buf(), line, message: message.into() }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| ingestion(path, None, format!("cannot read file: {e}")))
}

/// Non-blank lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn parse_id(path: &Path, line: usize, field: &str) -> Result<usize> {
    field.trim().parse::<usize>().map_err(|_| ingestion(path, Some(line), format!("expected a positive integer, got {:?}", field.trim())))
}

/// Loads every graph of dataset `name` under `dir` as a normalized
/// shortest-path space with the uniform node measure.
///
/// Disconnected graphs are reduced to their largest connected component and a
/// warning is logged.
pub fn load_tu_dataset(dir: impl AsRef<Path>, name: &str, options: &TuOptions) -> Result<Vec<LabeledSpace>> {
    let dir = dir.as_ref();
    let file = |suffix: &str| -> PathBuf { dir.join(format!("{name}_{suffix}.txt")) };
    let (edges_path, indicator_path, labels_path) = (file("A"), file("graph_indicator"), file("graph_labels"));

    let indicator_text = read(&indicator_path)?;
    let mut graph_of = Vec::new();
    for (line, text) in lines(&indicator_text) {
        let g = parse_id(&indicator_path, line, text)?;
        if g == 0 {
            return Err(ingestion(&indicator_path, Some(line), "graph ids are 1-based"));
        }
        graph_of.push(g - 1);
    }
    if graph_of.is_empty() {
        return Err(ingestion(&indicator_path, None, "indicator file lists no nodes"));
    }
    let graph_count = graph_of.iter().max().map_or(0, |g| g + 1);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); graph_count];
    let mut local = vec![0usize; graph_of.len()];
    for (node, &g) in graph_of.iter().enumerate() {
        local[node] = members[g].len();
        members[g].push(node);
    }
    if let Some(g) = members.iter().position(Vec::is_empty) {
        return Err(ingestion(&indicator_path, None, format!("graph {} has no nodes", g + 1)));
    }

    let labels_text = read(&labels_path)?;
    let labels: Vec<String> = lines(&labels_text).map(|(_, l)| l.to_string()).collect();
    if labels.len() != graph_count {
        return Err(ingestion(&labels_path, None, format!("{} labels for {graph_count} graphs", labels.len())));
    }

    let edges_text = read(&edges_path)?;
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    for (line, text) in lines(&edges_text) {
        let mut fields = text.split(',');
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(ingestion(&edges_path, Some(line), format!("expected `row, col`, got {text:?}")));
        };
        let (a, b) = (parse_id(&edges_path, line, a)?, parse_id(&edges_path, line, b)?);
        for v in [a, b] {
            if v == 0 || v > graph_of.len() {
                return Err(ingestion(&edges_path, Some(line), format!("node {v} outside 1..={}", graph_of.len())));
            }
        }
        let (a, b) = (a - 1, b - 1);
        if graph_of[a] != graph_of[b] {
            return Err(ingestion(&edges_path, Some(line), format!("edge joins graph {} and graph {}", graph_of[a] + 1, graph_of[b] + 1)));
        }
        if a != b {
            edges[graph_of[a]].push((local[a], local[b]));
        }
    }

    (0..graph_count)
        .into_par_iter()
        .map(|g| {
            let n = members[g].len();
            let space = match options.node_budget {
                Some(budget) if budget < n => {
                    space_from_graph(&GraphSpec::new(n, edges[g].clone()).with_node_budget(budget, options.seed.child(g as u64)))?
                }
                _ => {
                    let adj = adjacency_from_edges(n, &edges[g]);
                    let component = largest_component(&adj);
                    if component.len() < n {
                        log::warn!(
                            "{name}: graph {} is disconnected; keeping its largest component ({} of {n} nodes)",
                            g + 1,
                            component.len()
                        );
                        metric_from_adjacency(&induced_subgraph(&adj, &component))
                    } else {
                        metric_from_adjacency(&adj)
                    }
                }
            };
            Ok(LabeledSpace { space, label: labels[g].clone() })
        })
        .collect()
}
