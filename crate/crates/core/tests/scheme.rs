use fracpade::scheme::{
    scalar_mu, scalar_mu_error, scalar_mu_product, scheme_constant, scheme_error_bound, theorem_error_bound, TimeGrid,
};
use fracpade::solver::fractional_apply;
use fracpade::{AssembledOperator, CsrMatrix, PadeApproximant, ProblemMode, SolverConfig};
use proptest::prelude::*;

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi / lo).ln() * k as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn grid_one_to_sixteen() {
    let g = TimeGrid::new(1.0f64, 16.0).unwrap();
    let expected = [0.0, 1.0 / 15.0, 3.0 / 15.0, 7.0 / 15.0, 1.0];
    assert_eq!(g.nodes().len(), expected.len());
    for (a, b) in g.nodes().iter().zip(expected) {
        assert!((a - b).abs() < 1e-15);
    }
    assert_eq!(g.num_steps(), 4);
    for k in 0..3 {
        assert!((g.theta(k, 16.0) - 1.0).abs() < 1e-14);
    }
    assert!(g.theta(3, 16.0) <= 1.0);
}

#[test]
fn grid_with_immediate_clip() {
    let g = TimeGrid::new(4.0f64, 8.0).unwrap();
    assert_eq!(g.nodes(), &[0.0, 1.0]);
    assert_eq!(g.num_steps(), 1);
}

#[test]
fn degenerate_grids_are_rejected() {
    assert!(TimeGrid::new(2.0f64, 2.0).is_err());
    assert!(TimeGrid::new(2.0f64, 1.0).is_err());
    assert!(TimeGrid::new(0.0f64, 1.0).is_err());
    assert!(TimeGrid::new(f64::NAN, 1.0).is_err());
}

#[test]
fn fifty_steps_for_two_to_the_fifty() {
    assert_eq!(TimeGrid::new(1.0f64, 2f64.powi(50)).unwrap().num_steps(), 50);
}

#[test]
fn shift_is_reproduced_exactly() {
    let g = TimeGrid::new(3.0f64, 1e6).unwrap();
    for m in [1, 4, 10] {
        let p = PadeApproximant::new(m, 0.3f64).unwrap();
        let mu = scalar_mu(&p, &g, 3.0).value;
        assert!((mu / 3f64.powf(-0.3) - 1.0).abs() < 1e-13);
        assert_eq!(scalar_mu_error(&p, &g, 3.0).unwrap(), 0.0);
    }
}

#[test]
fn constant_at_one_half() {
    assert!((scheme_constant(0.5f64) - 2.5 * 2f64.powf(-0.5) / 0.5).abs() < 1e-14);
    assert!((scheme_constant(0.5f64) - 3.5355339).abs() < 1e-6);
}

#[test]
fn corollary_bound_reduces_to_per_order_factor() {
    for (lh, lm) in [(1.0, 2f64.powi(50)), (4.0, 3.3e13), (0.01, 7.5e10)] {
        for m in 1..=6 {
            let b = scheme_error_bound(m, 0.4f64, lh, lm).unwrap();
            let expect = scheme_constant(0.4) * lh.powf(-0.4) * 32f64.powi(-(m as i32));
            assert!((b / expect - 1.0).abs() < 1e-12);
            // the theorem form with ν = 2 is the same number
            assert!((theorem_error_bound(m, 0.4, 2.0, lh) / expect - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn bound_holds_over_the_invariant_sweep() {
    for &alpha in &[0.1f64, 0.3, 0.5, 0.7, 0.9] {
        for &lh in &[1.0, 4.0] {
            for &lm in &[2f64.powi(10), 2f64.powi(30), 2f64.powi(50)] {
                let grid = TimeGrid::new(lh, lm).unwrap();
                for m in 1..=10 {
                    let p = PadeApproximant::new(m, alpha).unwrap();
                    let bound = scheme_error_bound(m, alpha, lh, lm).unwrap();
                    for l in log_grid(lh, lm, 200) {
                        let e = scalar_mu_error(&p, &grid, l).unwrap().abs();
                        assert!(
                            e <= 1.5 * bound,
                            "alpha={alpha} lh={lh} lm={lm:e} m={m} l={l:e}: {e:e} > {bound:e}"
                        );
                        // one rounding per step may push μ(λ̂) a few ulps past λ̂^{-α}
                        let slack = 1.0 + 8.0 * grid.num_steps() as f64 * f64::EPSILON;
                        let mu = scalar_mu(&p, &grid, l).value;
                        assert!(mu > 0.0 && mu <= lh.powf(-alpha) * slack, "{mu:e}");
                    }
                }
            }
        }
    }
}

#[test]
fn error_drops_four_to_six_bits_per_order() {
    let grid = TimeGrid::new(1.0f64, 2f64.powi(30)).unwrap();
    for &alpha in &[0.1f64, 0.5, 0.9] {
        let max_err = |m| {
            let p = PadeApproximant::new(m, alpha).unwrap();
            log_grid(1.0, 2f64.powi(30), 200)
                .into_iter()
                .map(|l| scalar_mu_error(&p, &grid, l).unwrap().abs())
                .fold(0.0, f64::max)
        };
        let errs: Vec<f64> = (1..=9).map(max_err).collect();
        // least-squares slope of -log2(err) against m
        let n = errs.len() as f64;
        let xm = (n + 1.0) / 2.0;
        let ym = errs.iter().map(|e| -e.log2()).sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (k, e) in errs.iter().enumerate() {
            let x = (k + 1) as f64 - xm;
            sxy += x * (-e.log2() - ym);
            sxx += x * x;
        }
        let slope = sxy / sxx;
        assert!((4.0..=6.0).contains(&slope), "alpha={alpha}: slope {slope:.2}");
        // past the first order every single step is in range too
        for m in 1..errs.len() - 1 {
            let bits = (errs[m] / errs[m + 1]).log2();
            assert!((4.0..=6.0).contains(&bits), "alpha={alpha} m={}: {bits:.2} bits", m + 1);
        }
    }
}

#[test]
fn one_by_one_operator_is_the_scalar_shadow() {
    for &lambda in &[1.0f64, 7.5, 300.0] {
        let op = AssembledOperator::from_matrices(
            CsrMatrix::from_triplets(1, vec![(0, 0, 1.0)]),
            CsrMatrix::from_triplets(1, vec![(0, 0, lambda)]),
            ProblemMode::PositiveReaction,
        )
        .unwrap();
        let cfg = SolverConfig::new(0.5, 4).with_lambda_max(1000.0);
        let u = fractional_apply(&op, &[1.0], 0.6, &cfg).unwrap().solution[0];
        let p = PadeApproximant::new(4, 0.6f64).unwrap();
        let mu = scalar_mu(&p, &TimeGrid::new(0.5, 1000.0).unwrap(), lambda).value;
        assert!((u - mu).abs() <= 1e-14 * mu, "{u} vs {mu}");
    }
}

#[test]
fn beyond_the_bound_is_flagged() {
    let g = TimeGrid::new(1.0f64, 100.0).unwrap();
    let p = PadeApproximant::new(3, 0.5f64).unwrap();
    assert!(!scalar_mu(&p, &g, 50.0).beyond_bound);
    assert!(scalar_mu(&p, &g, 500.0).beyond_bound);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_invariants(lh in 1e-3f64..10.0, ratio in 1.001f64..1e12) {
        let lm = lh * ratio;
        let g = TimeGrid::new(lh, lm).unwrap();
        let t = g.nodes();
        prop_assert_eq!(t[0], 0.0);
        prop_assert_eq!(*t.last().unwrap(), 1.0);
        prop_assert!(t.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(g.num_steps(), ratio.log2().ceil() as usize);
        for k in 0..g.num_steps() {
            prop_assert!(g.theta(k, lm) <= 1.0 + 1e-12);
        }
        let tau = g.steps();
        for k in 0..tau.len().saturating_sub(1) {
            prop_assert!(tau[k + 1] <= 2.0 * tau[k] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn closed_form_nodes(lh in 1e-2f64..10.0, ratio in 2.0f64..1e9) {
        let lm = lh * ratio;
        let g = TimeGrid::new(lh, lm).unwrap();
        let t1 = lh / (lm - lh);
        for (n, &t) in g.nodes().iter().enumerate().take(g.num_steps()) {
            let expect = (2f64.powi(n as i32) - 1.0) * t1;
            prop_assert!((t - expect).abs() <= 1e-12 * expect.max(1e-300));
        }
    }

    #[test]
    fn recurrence_forms_agree(m in 1usize..=10, alpha in 0.01f64..0.99, x in 0.0f64..1.0) {
        let g = TimeGrid::new(1.0f64, 2f64.powi(40)).unwrap();
        let l = 2f64.powf(40.0 * x);
        let p = PadeApproximant::new(m, alpha).unwrap();
        let a = scalar_mu(&p, &g, l).value;
        let b = scalar_mu_product(&p, &g, l);
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn stable_error_matches_direct_difference(m in 1usize..=3, alpha in 0.05f64..0.95, x in 0.05f64..1.0) {
        let g = TimeGrid::new(1.0f64, 2f64.powi(20)).unwrap();
        let l = 2f64.powf(20.0 * x);
        let p = PadeApproximant::new(m, alpha).unwrap();
        let direct = scalar_mu(&p, &g, l).value - l.powf(-alpha);
        let stable = scalar_mu_error(&p, &g, l).unwrap();
        if direct.abs() > 1e-9 {
            prop_assert!((direct - stable).abs() <= 1e-5 * direct.abs(), "{} vs {}", direct, stable);
        }
    }
}
