//! Exponential kernels built from sliced multi-scale DMW with `p = 1`, Gram
//! matrices with a PSD check, and the MMD permutation two-sample test.

mod dissimilarity;
mod export;
mod gram;
mod mmd;

pub use dissimilarity::{msdmw_dissimilarity_matrix, space_tuple_seed, Dissimilarity, KernelSketchConfig};
pub use export::{read_gram, write_gram, GramFile};
pub use gram::{gram_from_dissimilarity, median_heuristic, GramMatrix, PSD_TOLERANCE};
pub use mmd::{mmd2_unbiased, permutation_test, TwoSampleResult};
