use std::collections::VecDeque;

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::base::RngSeed;
use crate::error::{param, Result};

use super::{construction, MetricMeasureSpace};

/// Cap on the number of nodes kept before computing graph distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeBudget {
    pub max_nodes: usize,
    pub seed: RngSeed,
}

/// An undirected, unweighted graph to be turned into a metric measure space.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub node_budget: Option<NodeBudget>,
}

impl GraphSpec {
    pub fn new(node_count: usize, edges: Vec<(usize, usize)>) -> Self {
        Self { node_count, edges, node_budget: None }
    }

    pub fn with_node_budget(mut self, max_nodes: usize, seed: RngSeed) -> Self {
        self.node_budget = Some(NodeBudget { max_nodes, seed });
        self
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect())
    }

    fn adjacency(&self) -> Result<Vec<Vec<usize>>> {
        if self.node_count == 0 {
            return Err(construction("graph has no nodes"));
        }
        let mut adj = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            if u >= self.node_count || v >= self.node_count {
                return Err(param(format!("edge ({u}, {v}) references a node ≥ {}", self.node_count)));
            }
            if u == v {
                return Err(param(format!("self-loop at node {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(adj)
    }
}

/// Shortest-path metric of a graph, normalized by its diameter, with the
/// uniform measure on nodes.
///
/// With a node budget smaller than the graph, a uniform sample of nodes is
/// drawn without replacement and the largest connected component of the
/// induced subgraph is kept. Without truncation the graph must be connected.
pub fn space_from_graph(spec: &GraphSpec) -> Result<MetricMeasureSpace> {
    let adj = spec.adjacency()?;
    let adj = match spec.node_budget {
        Some(budget) if budget.max_nodes < spec.node_count => {
            if budget.max_nodes == 0 {
                return Err(param("node budget must be at least 1"));
            }
            let mut keep = sample(&mut budget.seed.rng(), spec.node_count, budget.max_nodes).into_vec();
            keep.sort_unstable();
            let sub = induced_subgraph(&adj, &keep);
            let component = largest_component(&sub);
            induced_subgraph(&sub, &component)
        }
        _ => {
            if let Some(unreached) = first_unreachable(&adj) {
                return Err(construction(format!("graph is disconnected: no path between nodes 0 and {unreached}")));
            }
            adj
        }
    };
    Ok(metric_from_adjacency(&adj))
}

/// BFS hop counts from every node; requires a connected graph.
pub(crate) fn metric_from_adjacency(adj: &[Vec<usize>]) -> MetricMeasureSpace {
    let m = adj.len();
    let rows: Vec<Vec<u32>> = (0..m).into_par_iter().map(|s| bfs(adj, s)).collect();
    let diameter = rows.iter().flatten().copied().max().unwrap_or(0);
    let scale = if diameter == 0 { 1.0 } else { diameter as f64 };
    let distances: Vec<f64> = rows.into_iter().flatten().map(|h| h as f64 / scale).collect();
    MetricMeasureSpace::uniform(distances, m).expect("graph metrics satisfy the metric axioms")
}

fn bfs(adj: &[Vec<usize>], source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    let mut queue = VecDeque::with_capacity(adj.len());
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &v in &adj[u] {
            if dist[v] == u32::MAX {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn first_unreachable(adj: &[Vec<usize>]) -> Option<usize> {
    bfs(adj, 0).iter().position(|&d| d == u32::MAX)
}

/// Nodes of the largest connected component, ascending; ties go to the
/// component holding the smallest node id.
pub(crate) fn largest_component(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut label = vec![usize::MAX; adj.len()];
    let mut best: Vec<usize> = Vec::new();
    for start in 0..adj.len() {
        if label[start] != usize::MAX {
            continue;
        }
        let mut members = vec![start];
        label[start] = start;
        let mut head = 0;
        while head < members.len() {
            let u = members[head];
            head += 1;
            for &v in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = start;
                    members.push(v);
                }
            }
        }
        if members.len() > best.len() {
            members.sort_unstable();
            best = members;
        }
    }
    best
}

/// Subgraph induced by `keep` (ascending node ids), relabeled `0..keep.len()`.
pub(crate) fn induced_subgraph(adj: &[Vec<usize>], keep: &[usize]) -> Vec<Vec<usize>> {
    let mut index = vec![usize::MAX; adj.len()];
    for (new, &old) in keep.iter().enumerate() {
        index[old] = new;
    }
    keep.iter().map(|&old| adj[old].iter().filter_map(|&v| (index[v] != usize::MAX).then_some(index[v])).collect()).collect()
}

pub(crate) fn adjacency_from_edges(node_count: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); node_count];
    for &(u, v) in edges {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}
