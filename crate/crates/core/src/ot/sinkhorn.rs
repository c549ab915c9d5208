use crate::error::{param, DmwError, Result};

use super::{check_marginals, CostMatrix, TransportPlan};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    /// Stop once the max-norm marginal residual drops below this.
    pub tol: f64,
}

impl SinkhornConfig {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon, max_iters: 100_000, tol: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornReport {
    pub converged: bool,
    pub iterations: usize,
    /// Max-norm marginal residual of the returned plan.
    pub residual: f64,
    pub epsilon: f64,
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Entropic optimal transport by alternating log-domain scaling updates of
/// the dual potentials `f`, `g`:
///
/// `f_i ← ε log a_i − ε LSE_j((g_j − C_ij)/ε)`, then the same for `g`.
///
/// The returned plan is `exp((f_i + g_j − C_ij)/ε)` and its `cost()` is the
/// unregularized transport cost `⟨π, C⟩`. Zero-weight atoms receive no mass.
/// Small epsilons are reached through a short sequence of larger ones, each
/// warm-starting the next; `max_iters` bounds the final stage.
pub fn sinkhorn(cost: &CostMatrix, a: &[f64], b: &[f64], config: &SinkhornConfig) -> Result<(TransportPlan, SinkhornReport)> {
    let eps = config.epsilon;
    if !eps.is_finite() || eps <= 0.0 {
        return Err(param(format!("Sinkhorn epsilon must be positive, got {eps}")));
    }
    check_marginals(cost, a, b)?;
    let rows: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0.0).collect();
    let cols: Vec<usize> = (0..b.len()).filter(|&j| b[j] > 0.0).collect();
    let log_a: Vec<f64> = rows.iter().map(|&i| a[i].ln()).collect();
    let log_b: Vec<f64> = cols.iter().map(|&j| b[j].ln()).collect();
    let mut f = vec![0.0; rows.len()];
    let mut g = vec![0.0; cols.len()];

    let plan_of = |f: &[f64], g: &[f64]| -> Vec<f64> {
        let mut coupling = vec![0.0; cost.rows() * cost.cols()];
        for (x, &i) in rows.iter().enumerate() {
            for (y, &j) in cols.iter().enumerate() {
                coupling[i * cost.cols() + j] = ((f[x] + g[y] - cost.get(i, j)) / eps).exp();
            }
        }
        coupling
    };

    let mut iterations = 0;
    let mut converged = false;
    if config.max_iters > 0 {
        // Warm start through a geometric sequence of larger epsilons; each
        // stage starts from the previous stage's potentials.
        let mut stage_eps = cost.max() / 2.0;
        while stage_eps > 4.0 * eps {
            scale_loop(cost, &rows, &cols, a, &log_a, &log_b, &mut f, &mut g, stage_eps, WARM_STAGE_ITERS, config.tol)?;
            stage_eps /= 4.0;
        }
        let (iters, ok) = scale_loop(cost, &rows, &cols, a, &log_a, &log_b, &mut f, &mut g, eps, config.max_iters, config.tol)?;
        iterations = iters;
        converged = ok;
    }

    let coupling = plan_of(&f, &g);
    if coupling.iter().any(|x| !x.is_finite()) {
        return Err(DmwError::Numerical(format!("Sinkhorn plan is non-finite (epsilon {eps})")));
    }
    let plan = TransportPlan::new(cost, coupling, a, b);
    let residual = plan.max_residual();
    Ok((plan, SinkhornReport { converged, iterations, residual, epsilon: eps }))
}

const WARM_STAGE_ITERS: usize = 200;

/// Runs scaling updates at one epsilon; returns iterations used and whether
/// the row residual fell below `tol`.
#[allow(clippy::too_many_arguments)]
fn scale_loop(
    cost: &CostMatrix,
    rows: &[usize],
    cols: &[usize],
    a: &[f64],
    log_a: &[f64],
    log_b: &[f64],
    f: &mut [f64],
    g: &mut [f64],
    eps: f64,
    max_iters: usize,
    tol: f64,
) -> Result<(usize, bool)> {
    for iteration in 1..=max_iters {
        for (x, &i) in rows.iter().enumerate() {
            let row = cost.row(i);
            f[x] = eps * log_a[x] - eps * log_sum_exp(cols.iter().zip(g.iter()).map(|(&j, gj)| (gj - row[j]) / eps));
        }
        for (y, &j) in cols.iter().enumerate() {
            g[y] = eps * log_b[y] - eps * log_sum_exp(rows.iter().zip(f.iter()).map(|(&i, fi)| (fi - cost.get(i, j)) / eps));
        }
        if f.iter().chain(g.iter()).any(|x| !x.is_finite()) {
            return Err(DmwError::Numerical(format!("Sinkhorn potentials became non-finite at iteration {iteration} (epsilon {eps})")));
        }
        // columns are exact after the g-update; only rows can be off
        let row_residual = rows
            .iter()
            .enumerate()
            .map(|(x, &i)| {
                let row = cost.row(i);
                let mass: f64 = cols.iter().zip(g.iter()).map(|(&j, gj)| ((f[x] + gj - row[j]) / eps).exp()).sum();
                (mass - a[i]).abs()
            })
            .fold(0.0, f64::max);
        if row_residual < tol {
            return Ok((iteration, true));
        }
    }
    Ok((max_iters, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::RngSeed;
    use crate::ot::exact_ot;
    use rand::Rng;

    #[test]
    fn matching_point_masses() {
        let cost = CostMatrix::abs_power(&[0.3], &[0.3], 1.0).unwrap();
        let (plan, report) = sinkhorn(&cost, &[1.0], &[1.0], &SinkhornConfig::new(0.1)).unwrap();
        assert!(report.converged);
        assert!((plan.get(0, 0) - 1.0).abs() < 1e-9);
        assert!(plan.cost().abs() < 1e-12);
    }

    #[test]
    fn epsilon_sweep_approaches_exact_cost() {
        let mut rng = RngSeed(21).rng();
        let k = 8;
        let cost = CostMatrix::from_fn(k, k, |_, _| rng.random::<f64>()).unwrap();
        let w = vec![1.0 / k as f64; k];
        let exact = exact_ot(&cost, &w, &w).unwrap().cost();
        let mut previous = f64::INFINITY;
        for eps in [0.1, 0.01, 0.001] {
            let (plan, report) = sinkhorn(&cost, &w, &w, &SinkhornConfig::new(eps)).unwrap();
            assert!(report.converged, "eps {eps}: {report:?}");
            let gap = plan.cost() - exact;
            assert!(gap >= -1e-6, "eps {eps}: Sinkhorn below exact by {gap}");
            assert!(gap <= 2.0 * eps * (k as f64).ln(), "eps {eps}: gap {gap}");
            assert!(plan.cost() <= previous + 1e-9);
            previous = plan.cost();
        }
    }

    #[test]
    fn zero_budget_returns_initial_scaling() {
        let cost = CostMatrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let (plan, report) = sinkhorn(&cost, &[0.5, 0.5], &[0.5, 0.5], &SinkhornConfig { epsilon: 1.0, max_iters: 0, tol: 1e-9 }).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 0);
        assert_eq!(plan.get(0, 1), (-1.0f64).exp());
        assert_eq!(plan.get(0, 0), 1.0);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let cost = CostMatrix::new(1, 1, vec![0.0]).unwrap();
        assert!(sinkhorn(&cost, &[1.0], &[1.0], &SinkhornConfig::new(0.0)).is_err());
        assert!(sinkhorn(&cost, &[1.0], &[1.0], &SinkhornConfig::new(-1.0)).is_err());
    }
}
