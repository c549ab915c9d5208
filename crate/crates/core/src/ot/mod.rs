//! Discrete optimal transport: closed-form 1D transport by sorting, an exact
//! transportation simplex, a Hungarian fast path for uniform square problems,
//! and log-domain Sinkhorn.

mod assignment;
mod one_d;
mod simplex;
mod sinkhorn;

pub use assignment::assignment_ot;
pub use one_d::{sorted_uniform_cost, w1d_pth_power, DiscreteMeasure1D};
pub use simplex::{exact_ot, exact_ot_with_rule, PivotRule};
pub use sinkhorn::{sinkhorn, SinkhornConfig, SinkhornReport};

use crate::error::{dim, param, Result};

/// Tolerance on marginal feasibility of input weight vectors.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A dense `rows × cols` matrix of nonnegative transport costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    exponent: Option<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim(format!("{rows}×{cols} cost matrix needs {} entries, got {}", rows * cols, data.len())));
        }
        if let Some(bad) = data.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(param(format!("cost entries must be finite and nonnegative, got {bad}")));
        }
        Ok(Self { rows, cols, data, exponent: None })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    /// `|x_i − y_j|^p` between two sets of reals.
    pub fn abs_power(x: &[f64], y: &[f64], p: f64) -> Result<Self> {
        crate::base::check_exponent(p)?;
        Ok(Self::from_fn(x.len(), y.len(), |i, j| (x[i] - y[j]).abs().powf(p))?.with_exponent(p))
    }

    /// Records the exponent `p` the costs were raised to.
    pub fn with_exponent(mut self, p: f64) -> Self {
        self.exponent = Some(p);
        self
    }

    pub fn exponent(&self) -> Option<f64> {
        self.exponent
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

/// Dual certificate of an exact solve: potentials with `u_i + v_j ≤ c_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPotentials {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `Σ a_i u_i + Σ b_j v_j`.
    pub objective: f64,
}

/// A coupling with its cost and marginal residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    rows: usize,
    cols: usize,
    coupling: Vec<f64>,
    cost: f64,
    row_residual: Vec<f64>,
    col_residual: Vec<f64>,
    duals: Option<DualPotentials>,
}

impl TransportPlan {
    pub(crate) fn new(cost: &CostMatrix, coupling: Vec<f64>, a: &[f64], b: &[f64]) -> Self {
        let (rows, cols) = (cost.rows, cost.cols);
        let mut row_sum = vec![0.0; rows];
        let mut col_sum = vec![0.0; cols];
        let mut total = 0.0;
        for i in 0..rows {
            for j in 0..cols {
                let g = coupling[i * cols + j];
                row_sum[i] += g;
                col_sum[j] += g;
                total += g * cost.get(i, j);
            }
        }
        Self {
            rows,
            cols,
            coupling,
            cost: total,
            row_residual: row_sum.iter().zip(a).map(|(s, w)| s - w).collect(),
            col_residual: col_sum.iter().zip(b).map(|(s, w)| s - w).collect(),
            duals: None,
        }
    }

    pub(crate) fn with_duals(mut self, duals: DualPotentials) -> Self {
        self.duals = Some(duals);
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major coupling matrix.
    pub fn coupling(&self) -> &[f64] {
        &self.coupling
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coupling[i * self.cols + j]
    }

    /// `Σ_ij γ_ij c_ij`.
    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn row_residual(&self) -> &[f64] {
        &self.row_residual
    }

    pub fn col_residual(&self) -> &[f64] {
        &self.col_residual
    }

    /// Largest absolute marginal violation over rows and columns.
    pub fn max_residual(&self) -> f64 {
        self.row_residual.iter().chain(&self.col_residual).fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn duals(&self) -> Option<&DualPotentials> {
        self.duals.as_ref()
    }
}

/// Checks that `a` and `b` are probability vectors matching the cost shape.
pub(crate) fn check_marginals(cost: &CostMatrix, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != cost.rows || b.len() != cost.cols {
        return Err(dim(format!("marginals of lengths {} and {} for a {}×{} cost matrix", a.len(), b.len(), cost.rows, cost.cols)));
    }
    if a.is_empty() || b.is_empty() {
        return Err(param("transport between empty measures"));
    }
    for w in a.iter().chain(b) {
        if !w.is_finite() || *w < 0.0 {
            return Err(param(format!("marginal weights must be finite and nonnegative, got {w}")));
        }
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if (sa - sb).abs() > MASS_TOLERANCE || (sa - 1.0).abs() > MASS_TOLERANCE {
        return Err(param(format!("infeasible marginals: masses {sa} and {sb}")));
    }
    Ok(())
}
