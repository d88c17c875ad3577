mod common;

use proptest::prelude::*;
use wavesteer::{compare_solvers, prepare, Method, StateSpec};

#[test]
fn interval_blocks_are_positive_semidefinite() {
    for (n, m) in [(2, 2), (4, 4), (5, 3)] {
        let pr = common::paper(n, m, 33);
        let (lo, hi) = pr.qp.spectrum_bounds();
        assert!(pr.qp.is_symmetric());
        assert!(lo >= -1e-12 * hi, "N={n} M={m}: {lo:e}");
    }
}

#[test]
fn solvers_agree_on_the_paper_example() {
    let pr = common::paper(4, 4, 65);
    let qp = pr.solve(Method::Qp).unwrap();
    let el = pr.solve(Method::EulerLagrange).unwrap();
    let cmp = compare_solvers(&qp, &el).unwrap();
    assert!(qp.bc_residual <= 1e-9 && el.bc_residual <= 1e-9);
    assert!(cmp.qp_not_worse);
    assert!(qp.objective <= el.objective + 1e-8);
    assert!(el.conjugate_variation() <= 1e-8);
    assert!(qp.c1_spread <= 1e-10);
}

#[test]
fn rerun_is_bit_identical() {
    let a = common::paper(3, 3, 33).solve(Method::Qp).unwrap();
    let b = common::paper(3, 3, 33).solve(Method::Qp).unwrap();
    assert_eq!(a.y, b.y);
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
}

#[test]
fn zero_data_give_zero_energy() {
    let pr = prepare(4, 3, &StateSpec::zero(4, 33).unwrap()).unwrap();
    for method in [Method::Qp, Method::EulerLagrange] {
        let s = pr.solve(method).unwrap();
        assert!(s.objective.abs() <= 1e-12);
        assert!(s.y.amax() <= 1e-12);
    }
}

#[test]
fn solution_is_linear_in_the_data() {
    let (n, m, p) = (3, 3, 33);
    let a = common::mixed_state(n, p);
    let b = StateSpec::trig(n, p, 0.7, 2.0).unwrap();
    let solve = |s: &StateSpec| prepare(n, m, s).unwrap().solve(Method::Qp).unwrap();
    let (sa, sb, sab) = (solve(&a), solve(&b), solve(&a.add(&b).unwrap()));
    assert!((&sab.y - &sa.y - &sb.y).amax() < 1e-10);
    assert!((sab.c1 - sa.c1 - sb.c1).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_scales_quadratically(s in -3.0f64..3.0) {
        let (n, m, p) = (4, 2, 17);
        let base = common::mixed_state(n, p);
        let e0 = prepare(n, m, &base).unwrap().solve(Method::Qp).unwrap().objective;
        let e1 = prepare(n, m, &base.scale(s)).unwrap().solve(Method::Qp).unwrap().objective;
        prop_assert!((e1 - s * s * e0).abs() <= 1e-10 * (1.0 + e0 * s * s));
    }

    #[test]
    fn qp_optimum_beats_feasible_perturbations(seed in any::<u64>(), eps in 1e-3f64..1.0) {
        let pr = common::paper(4, 3, 17);
        let sol = pr.solve(Method::Qp).unwrap();
        let mut rng = common::rng(seed);
        let delta = common::random_bubble(&mut rng, sol.y.nrows(), 17);
        let y = &sol.y + &delta * eps;
        let last = y.ncols() - 1;
        let bc = pr.bc.relative_residual(&y.column(0).into_owned(), &y.column(last).into_owned(), &sol.offsets);
        prop_assert!(bc <= 1e-9);
        prop_assert!(pr.qp.objective(&y) >= sol.objective - 1e-12);
    }

    #[test]
    fn euler_lagrange_path_is_stationary(seed in any::<u64>()) {
        let pr = common::paper(4, 4, 33);
        let sol = pr.solve(Method::EulerLagrange).unwrap();
        let mut rng = common::rng(seed);
        let delta = common::random_bubble(&mut rng, sol.y.nrows(), 33);
        let eps = 1e-3;
        let plus = pr.qp.objective(&(&sol.y + &delta * eps));
        let minus = pr.qp.objective(&(&sol.y - &delta * eps));
        let slope = (plus - minus) / (2.0 * eps);
        let curvature = (plus + minus - 2.0 * sol.objective) / (eps * eps);
        prop_assert!(slope.abs() <= 1e-7 * (1.0 + curvature.abs()), "slope {:e}", slope);
    }
}
