use dmw::base::RngSeed;
use dmw::ot::{exact_ot, exact_ot_with_rule, sinkhorn, w1d_pth_power, CostMatrix, DiscreteMeasure1D, PivotRule, SinkhornConfig};
use proptest::prelude::*;
use rand::Rng;

fn simplex_weights(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn instance() -> impl Strategy<Value = (CostMatrix, Vec<f64>, Vec<f64>)> {
    (1usize..=9, 1usize..=9).prop_flat_map(|(m, n)| {
        (prop::collection::vec(0.0f64..1.0, m * n), prop::collection::vec(0.05f64..1.0, m), prop::collection::vec(0.05f64..1.0, n))
            .prop_map(move |(c, a, b)| (CostMatrix::new(m, n, c).unwrap(), simplex_weights(&a), simplex_weights(&b)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_is_feasible_and_certified((cost, a, b) in instance()) {
        let plan = exact_ot(&cost, &a, &b).unwrap();
        prop_assert!(plan.max_residual() < 1e-9);
        prop_assert!(plan.coupling().iter().all(|&x| x >= 0.0));
        let direct: f64 = plan.coupling().iter().zip(cost.data()).map(|(x, c)| x * c).sum();
        prop_assert!((direct - plan.cost()).abs() < 1e-9);
        let duals = plan.duals().unwrap();
        prop_assert!(duals.objective <= plan.cost() + 1e-9);
        prop_assert!((duals.objective - plan.cost()).abs() < 1e-9);
        for i in 0..cost.rows() {
            for j in 0..cost.cols() {
                prop_assert!(cost.get(i, j) - duals.u[i] - duals.v[j] >= -1e-9);
            }
        }
    }

    #[test]
    fn pivot_rules_agree((cost, a, b) in instance()) {
        let bland = exact_ot_with_rule(&cost, &a, &b, PivotRule::Bland).unwrap().cost();
        let hybrid = exact_ot_with_rule(&cost, &a, &b, PivotRule::DantzigThenBland).unwrap().cost();
        prop_assert!((bland - hybrid).abs() < 1e-9);
    }

    #[test]
    fn converged_sinkhorn_meets_its_tolerance((cost, a, b) in instance()) {
        let cfg = SinkhornConfig::new(0.05);
        let (plan, report) = sinkhorn(&cost, &a, &b, &cfg).unwrap();
        if report.converged {
            prop_assert!(report.residual < cfg.tol);
            prop_assert!(plan.max_residual() < cfg.tol);
        }
        prop_assert!(plan.cost() >= exact_ot(&cost, &a, &b).unwrap().cost() - 1e-6);
    }
}

#[test]
fn one_dimensional_wasserstein_is_a_metric() {
    let mut rng = RngSeed(11).rng();
    let measure = |rng: &mut rand_chacha::ChaCha8Rng| {
        let k = rng.random_range(1..=10);
        let values = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let weights = simplex_weights(&(0..k).map(|_| rng.random_range(0.1..1.0)).collect::<Vec<_>>());
        DiscreteMeasure1D::new(values, weights).unwrap()
    };
    for t in 0..300 {
        let p = [1.0, 2.0, 3.0][t % 3];
        let (x, y, z) = (measure(&mut rng), measure(&mut rng), measure(&mut rng));
        let w = |a: &DiscreteMeasure1D, b: &DiscreteMeasure1D| w1d_pth_power(a, b, p).unwrap().powf(1.0 / p);
        assert!(w(&x, &x) < 1e-12);
        assert!((w(&x, &y) - w(&y, &x)).abs() < 1e-12);
        assert!(w(&x, &z) <= w(&x, &y) + w(&y, &z) + 1e-12, "triangle inequality fails at trial {t}");
    }
}
