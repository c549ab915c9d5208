//! Foundational types shared by every estimator: pair indexing, distance
//! vectors with the pair-averaged ℓp norm, slicing directions and seeds.

mod direction;
mod norm;
mod pairs;
mod seed;

pub(crate) use direction::dot;
pub use direction::{DirectionMode, DirectionSet, SlicingDirection};
pub use norm::{avg_norm, avg_norm_pow, check_exponent, holder_conjugate, DistanceVector};
pub(crate) use pairs::offset_unchecked;
pub use pairs::{num_pairs, pair_from_offset, pair_offset, PairIndex};
pub use seed::RngSeed;
