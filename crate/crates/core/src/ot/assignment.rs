use crate::error::{param, Result};

use super::{CostMatrix, TransportPlan};

/// Optimal transport between two uniform `K`-atom measures on a square cost
/// matrix, solved as a linear assignment problem (Hungarian method with
/// potentials, `O(K³)`). The plan puts mass `1/K` on each matched pair.
pub fn assignment_ot(cost: &CostMatrix) -> Result<TransportPlan> {
    let k = cost.rows();
    if k != cost.cols() {
        return Err(param(format!("assignment needs a square cost matrix, got {}×{}", k, cost.cols())));
    }
    if k == 0 {
        return Err(param("assignment on an empty cost matrix"));
    }
    let matched = hungarian(cost);
    let w = 1.0 / k as f64;
    let mut coupling = vec![0.0; k * k];
    for (i, &j) in matched.iter().enumerate() {
        coupling[i * k + j] = w;
    }
    let marg = vec![w; k];
    Ok(TransportPlan::new(cost, coupling, &marg, &marg))
}

/// Column assigned to each row.
fn hungarian(cost: &CostMatrix) -> Vec<usize> {
    let k = cost.rows();
    // 1-based arrays; index 0 is the virtual source column
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut matched = vec![0; k];
    for j in 1..=k {
        matched[owner[j] - 1] = j - 1;
    }
    matched
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::RngSeed;
    use crate::ot::exact_ot;
    use rand::Rng;

    #[test]
    fn identity_favoring_cost() {
        let cost = CostMatrix::from_fn(5, 5, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let plan = assignment_ot(&cost).unwrap();
        assert_eq!(plan.cost(), 0.0);
        for i in 0..5 {
            assert_eq!(plan.get(i, i), 0.2);
        }
    }

    #[test]
    fn agrees_with_simplex() {
        let mut rng = RngSeed(4).rng();
        for _ in 0..200 {
            let k = rng.random_range(1..10);
            let cost = CostMatrix::from_fn(k, k, |_, _| rng.random::<f64>()).unwrap();
            let w = vec![1.0 / k as f64; k];
            let fast = assignment_ot(&cost).unwrap();
            let exact = exact_ot(&cost, &w, &w).unwrap();
            assert!((fast.cost() - exact.cost()).abs() < 1e-9);
            assert!(fast.max_residual() < 1e-12);
        }
    }

    #[test]
    fn trivial_and_invalid() {
        let plan = assignment_ot(&CostMatrix::new(1, 1, vec![2.0]).unwrap()).unwrap();
        assert_eq!(plan.coupling(), &[1.0]);
        assert_eq!(plan.cost(), 2.0);
        assert!(assignment_ot(&CostMatrix::new(1, 2, vec![0.0, 1.0]).unwrap()).is_err());
    }
}
