//! Fixtures shared by the CLI tests and the acceptance suite.

use std::fs;
use std::path::Path;

/// Small budgets for every experiment so a full CLI sweep takes seconds.
/// `[kernel_export]` comes last, so appending a `dataset_dir = ...` line
/// lands in that table.
pub const SMALL_CONFIG: &str = r#"
seed = 7

[tradeoff]
orders = [2, 4]
tuples = 60
directions = 16
replicates = 3
cloud = { samples = 20, noise = 0.05 }
reference = { order = 4, tuples = 200, directions = 32 }

[directions]
tuples = 80
direction_counts = [8, 32]
reference_directions = 128
replicates = 5
cloud = { samples = 20, noise = 0.05 }

[scalability]
node_counts = [20, 40]
tuples = 100
directions = 16
direction_sweep = [16, 32]
tuple_sweep = [100, 200]
sweep_nodes = 40
repeats = 1
empirical_tuples = 30
empirical_max_nodes = 40
gw_max_nodes = 20

[twosample]
shifts = [0.0, 0.2]
group_sizes = [4]
trials = 4
permutations = 19
cloud = { samples = 15, noise = 0.05 }
kernel = { scales = [2, 3], tuples = 40, directions = 8 }

[hierarchy]
random_pairs = 2

[kernel_export]
dataset = "TOY"
kernel = { scales = [2, 3], tuples = 40, directions = 8 }
"#;

/// Writes a four-graph dataset `TOY` in the TU text layout: a path, a
/// triangle, a star and a square, labelled `a, b, a, b`.
pub fn write_toy_dataset(dir: &Path) {
    let graphs: [&[(usize, usize)]; 4] =
        [&[(1, 2), (2, 3), (3, 4)], &[(1, 2), (2, 3), (3, 1)], &[(1, 2), (1, 3), (1, 4), (1, 5)], &[(1, 2), (2, 3), (3, 4), (4, 1)]];
    let sizes = [4, 3, 5, 4];
    let (mut edges, mut indicator, mut offset) = (String::new(), String::new(), 0);
    for (g, (es, &n)) in graphs.iter().zip(&sizes).enumerate() {
        for &(u, v) in es.iter() {
            edges.push_str(&format!("{}, {}\n{}, {}\n", u + offset, v + offset, v + offset, u + offset));
        }
        for _ in 0..n {
            indicator.push_str(&format!("{}\n", g + 1));
        }
        offset += n;
    }
    fs::write(dir.join("TOY_A.txt"), edges).unwrap();
    fs::write(dir.join("TOY_graph_indicator.txt"), indicator).unwrap();
    fs::write(dir.join("TOY_graph_labels.txt"), "a\nb\na\nb\n").unwrap();
}
