//! Gromov–Wasserstein baselines: an exhaustive permutation upper bound for
//! tiny uniform spaces and entropic GW by mirror descent.

mod entropic;
mod permutation;

pub use entropic::{gw_entropic, EntropicGwConfig, ENTROPIC_SIZE_LIMIT};
pub use permutation::{gw_objective_for_permutation, gw_permutation_min, PERMUTATION_SIZE_LIMIT};

/// How a GW value was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GwMode {
    PermutationMin,
    Entropic { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwEstimate {
    /// `(Σ |d_X − d_Y|^p π ⊗ π)^{1/p}` at the returned coupling.
    pub value: f64,
    pub p: f64,
    pub mode: GwMode,
    /// Outer iterations used (entropic mode).
    pub iterations: usize,
    pub converged: bool,
    /// The deadline passed before convergence.
    pub timed_out: bool,
    /// Row-major coupling; for permutation mode, `1/m` on the matched cells.
    pub coupling: Vec<f64>,
}
