use crate::base::{avg_norm_pow, check_exponent};
use crate::error::{dim, param, Result};
use crate::ot::{assignment_ot, exact_ot, sinkhorn, CostMatrix, SinkhornConfig};
use crate::spaces::MetricMeasureSpace;

use super::law::{enumerate_matrix_law, LawKind, MatrixLaw};
use super::{pth_root, DmwEstimate, EstimateMode};

/// OT solver used between matrix laws.
#[derive(Debug, Clone, PartialEq)]
pub enum OtSolver {
    Exact,
    Sinkhorn(SinkhornConfig),
}

fn law_cost(x: &MatrixLaw, y: &MatrixLaw, p: f64) -> Result<CostMatrix> {
    if x.order() != y.order() {
        return Err(dim(format!("cannot compare laws of orders {} and {}", x.order(), y.order())));
    }
    CostMatrix::from_fn(x.len(), y.len(), |i, j| avg_norm_pow(x.atom(i), y.atom(j), p)).map(|c| c.with_exponent(p))
}

/// Largest uniform law sent to the assignment solver without merging.
const ASSIGNMENT_LIMIT: usize = 4096;

fn transport_pth_power(x: &MatrixLaw, y: &MatrixLaw, p: f64, solver: &OtSolver) -> Result<(f64, Option<bool>)> {
    let (cx, cy) = (x.compressed(), y.compressed());
    // Merging duplicates can break uniformity; equal-size uniform laws then
    // still go through the assignment solver, which beats the simplex there.
    let assignable = |a: &MatrixLaw, b: &MatrixLaw| a.is_uniform() && b.is_uniform() && a.len() == b.len();
    if matches!(solver, OtSolver::Exact) && !assignable(&cx, &cy) && assignable(x, y) && x.len() <= ASSIGNMENT_LIMIT {
        return Ok((assignment_ot(&law_cost(x, y, p)?)?.cost(), None));
    }
    let (x, y) = (cx, cy);
    let cost = law_cost(&x, &y, p)?;
    match solver {
        OtSolver::Exact if assignable(&x, &y) => Ok((assignment_ot(&cost)?.cost(), None)),
        OtSolver::Exact => Ok((exact_ot(&cost, x.weights(), y.weights())?.cost(), None)),
        OtSolver::Sinkhorn(cfg) => {
            let (plan, report) = sinkhorn(&cost, x.weights(), y.weights(), cfg)?;
            Ok((plan.cost(), Some(report.converged)))
        }
    }
}

/// Exact `W_p` between two matrix laws under the pair-averaged ℓp cost.
pub fn law_distance(x: &MatrixLaw, y: &MatrixLaw, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(pth_root(transport_pth_power(x, y, p, &OtSolver::Exact)?.0, p))
}

/// DMW between two matrix laws: OT under the cost `avg_norm(a, b, p)^p`, then
/// the `p`-th root. Duplicate atoms are merged before solving.
pub fn empirical_dmw(x: &MatrixLaw, y: &MatrixLaw, p: f64, solver: &OtSolver) -> Result<DmwEstimate> {
    check_exponent(p)?;
    let (cost, converged) = transport_pth_power(x, y, p, solver)?;
    let enumerated = x.kind() == LawKind::Enumerated && y.kind() == LawKind::Enumerated;
    let mode = match (solver, converged) {
        (OtSolver::Sinkhorn(cfg), Some(converged)) => EstimateMode::EmpiricalSinkhorn { epsilon: cfg.epsilon, converged },
        _ if enumerated => EstimateMode::ExactEnumerated,
        _ => EstimateMode::EmpiricalExactOt,
    };
    let (tuples, seed) = match x.kind() {
        LawKind::Sampled { tuples, seed } => (Some(tuples), Some(seed)),
        _ => (None, None),
    };
    Ok(DmwEstimate { value: pth_root(cost, p), p, order: x.order(), tuples, directions: None, mode, seed })
}

/// Exact order-`n` DMW of two small spaces, by enumerating both laws.
pub fn exact_dmw(x: &MetricMeasureSpace, y: &MetricMeasureSpace, order: usize, p: f64) -> Result<DmwEstimate> {
    check_exponent(p)?;
    let lx = enumerate_matrix_law(x, order)?;
    let ly = enumerate_matrix_law(y, order)?;
    empirical_dmw(&lx, &ly, p, &OtSolver::Exact)
}

/// Exact DMW at a list of orders, and whether the sequence is non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyReport {
    pub orders: Vec<usize>,
    pub values: Vec<f64>,
    pub p: f64,
    pub slack: f64,
    pub monotone: bool,
    /// Largest decrease between consecutive orders (0 when monotone).
    pub worst_drop: f64,
}

/// Default slack for the monotonicity check.
pub const HIERARCHY_SLACK: f64 = 1e-9;

/// Computes exact DMW at each order (sorted ascending) and checks that the
/// values never decrease by more than [`HIERARCHY_SLACK`].
pub fn hierarchy_check(x: &MetricMeasureSpace, y: &MetricMeasureSpace, orders: &[usize], p: f64) -> Result<HierarchyReport> {
    if orders.is_empty() {
        return Err(param("hierarchy check needs at least one order"));
    }
    let mut orders = orders.to_vec();
    orders.sort_unstable();
    orders.dedup();
    let values = orders.iter().map(|&n| exact_dmw(x, y, n, p).map(|e| e.value)).collect::<Result<Vec<_>>>()?;
    let worst_drop = values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    Ok(HierarchyReport { orders, values, p, slack: HIERARCHY_SLACK, monotone: worst_drop <= HIERARCHY_SLACK, worst_drop })
}
