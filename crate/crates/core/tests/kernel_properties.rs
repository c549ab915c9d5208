use dmw::base::{DirectionMode, RngSeed};
use dmw::estimators::ScaleWeights;
use dmw::kernels::{
    gram_from_dissimilarity, median_heuristic, mmd2_unbiased, msdmw_dissimilarity_matrix, permutation_test, read_gram, write_gram,
    KernelSketchConfig,
};
use dmw::spaces::{space_from_graph, space_from_sbm, GraphSpec, MetricMeasureSpace, SbmSpec};

fn config() -> KernelSketchConfig {
    KernelSketchConfig::new(ScaleWeights::uniform(vec![2, 3, 4]).unwrap(), 150, 24, DirectionMode::Euclidean)
}

fn graphs() -> Vec<MetricMeasureSpace> {
    let mut out: Vec<MetricMeasureSpace> =
        (3..8).flat_map(|n| [GraphSpec::path(n), GraphSpec::cycle(n)]).map(|g| space_from_graph(&g).unwrap()).collect();
    for s in 0..4 {
        let spec = SbmSpec { block_sizes: vec![8, 8], p_within: 0.5, p_between: 0.1, seed: RngSeed(s) };
        out.push(space_from_sbm(&spec).unwrap());
    }
    out
}

#[test]
fn graph_grams_are_positive_semidefinite() {
    let spaces = graphs();
    let d = msdmw_dissimilarity_matrix(&spaces, &config(), RngSeed(1)).unwrap();
    for lambda in [0.25, 1.0, 4.0, median_heuristic(&d)] {
        let g = gram_from_dissimilarity(&d, lambda).unwrap();
        assert!(g.min_eigenvalue() >= -1e-8 * spaces.len() as f64, "lambda {lambda}: {}", g.min_eigenvalue());
        assert!(g.is_psd());
    }
}

#[test]
fn pairwise_values_do_not_depend_on_the_rest_of_the_collection() {
    let spaces = graphs();
    let full = msdmw_dissimilarity_matrix(&spaces, &config(), RngSeed(2)).unwrap();
    let pick = [4usize, 11, 0];
    let subset: Vec<MetricMeasureSpace> = pick.iter().map(|&i| spaces[i].clone()).collect();
    let part = msdmw_dissimilarity_matrix(&subset, &config(), RngSeed(2)).unwrap();
    for (a, &i) in pick.iter().enumerate() {
        for (b, &j) in pick.iter().enumerate() {
            assert_eq!(part.get(a, b).to_bits(), full.get(i, j).to_bits());
        }
    }
}

#[test]
fn mmd_ignores_which_group_is_called_first() {
    let spaces = graphs();
    let d = msdmw_dissimilarity_matrix(&spaces, &config(), RngSeed(3)).unwrap();
    let gram = gram_from_dissimilarity(&d, median_heuristic(&d)).unwrap();
    let labels: Vec<bool> = (0..spaces.len()).map(|i| i % 3 == 0).collect();
    let flipped: Vec<bool> = labels.iter().map(|l| !l).collect();
    let (a, b) = (mmd2_unbiased(&gram, &labels).unwrap(), mmd2_unbiased(&gram, &flipped).unwrap());
    assert!((a - b).abs() < 1e-12);

    let test = permutation_test(&gram, &labels, 99, 0.05, RngSeed(4)).unwrap();
    assert!(test.p_value > 0.0 && test.p_value <= 1.0);
    assert!(test.p_value >= 1.0 / 100.0);
    assert_eq!(test.null.len(), 99);
    assert_eq!(test.reject, test.p_value <= 0.05);
    let again = permutation_test(&gram, &labels, 99, 0.05, RngSeed(4)).unwrap();
    assert_eq!(test.p_value, again.p_value);
}

#[test]
fn gram_file_round_trips_exactly() {
    let spaces = graphs();
    let d = msdmw_dissimilarity_matrix(&spaces, &config(), RngSeed(5)).unwrap();
    let gram = gram_from_dissimilarity(&d, 1.0).unwrap();
    let labels: Vec<String> = (0..spaces.len()).map(|i| format!("g{i}")).collect();
    let mut buf = Vec::new();
    write_gram(&mut buf, &gram, &labels, &[("kernel".into(), config().describe())]).unwrap();
    let back = read_gram(buf.as_slice()).unwrap();
    assert_eq!(back.size, spaces.len());
    assert_eq!(back.labels, labels);
    assert_eq!(back.get("kernel"), Some(config().describe().as_str()));
    for (u, v) in back.values.iter().zip(gram.values()) {
        assert_eq!(u.to_bits(), v.to_bits());
    }
}
