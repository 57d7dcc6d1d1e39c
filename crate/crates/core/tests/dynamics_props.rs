mod common;

use std::sync::Arc;

use bivirus_core::dynamics::{integrate_flow, IntegratorConfig, Record};
use bivirus_core::graph::Graph;
use bivirus_core::rates::{RateModel, RateSpec};
use bivirus_core::sampling::rng;
use bivirus_core::{single_virus_fixed_point, SingleVirus, StateD};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

use common::{all_cases, c6_wheel6, fd_jacobian, linear, random_connected, system};

#[test]
fn bivirus_jacobian_matches_finite_differences() {
    let (a, b) = c6_wheel6();
    let mut r = rng(17);
    for (r1, r2) in all_cases() {
        let sys = system(&a, &b, r1, r2);
        for _ in 0..20 {
            let s = StateD::random_interior(&mut r, 6);
            let analytic = sys.jacobian(&s).unwrap();
            let fd = fd_jacobian(
                |p| {
                    let (dx, dy) = sys.field(&StateD::from_concat(p)).unwrap();
                    dx.iter().chain(dy.iter()).copied().collect()
                },
                &s.to_vec(),
                1e-6,
            );
            assert!((analytic - fd).amax() < 1e-5, "{r1} / {r2}");
        }
    }
}

#[test]
fn trajectories_stay_in_d() {
    let (a, b) = c6_wheel6();
    let mut r = rng(23);
    let mut runs = 0;
    for (r1, r2) in all_cases() {
        let sys = system(&a, &b, r1, r2);
        for _ in 0..34 {
            let s0 = StateD::random_interior(&mut r, 6);
            let traj = sys.integrate(&s0, 50.0, 1e-10).unwrap();
            assert!(traj.states.iter().all(|s| s.is_in_d(1e-9)));
            assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
            runs += 1;
        }
    }
    assert!(runs >= 100);
}

#[test]
fn trajectory_from_saturated_corner_stays_in_d() {
    let (a, b) = c6_wheel6();
    let sys = system(&a, &b, RateSpec::Case2 { alpha: 5.0, delta: 0.2 }, RateSpec::Case3 { alpha: 5.0, k: 2.0 });
    let s0 = StateD::from_slices(&[1.0, 0.0, 0.5, 0.5, 0.0, 1.0], &[0.0, 1.0, 0.5, 0.5, 0.0, 0.0]).unwrap();
    let traj = sys.integrate(&s0, 20.0, 1e-10).unwrap();
    assert!(traj.states.iter().all(|s| s.is_in_d(1e-9)));
}

#[test]
fn flow_property() {
    let (a, b) = c6_wheel6();
    let mut r = rng(5);
    for (r1, r2) in all_cases() {
        let sys = system(&a, &b, r1, r2);
        let s0 = StateD::random_interior(&mut r, 6);
        let cfg = |t| IntegratorConfig { t_max: t, conv_tol: 0.0, ..Default::default() };
        let direct = sys.integrate_with(&s0, &cfg(5.0)).unwrap();
        let mid = sys.integrate_with(&s0, &cfg(2.0)).unwrap();
        let two_step = sys.integrate_with(mid.final_state(), &cfg(3.0)).unwrap();
        assert_eq!(direct.final_time(), 5.0);
        assert!(direct.final_state().max_abs_diff(two_step.final_state()) < 1e-6);
    }
}

#[test]
fn single_virus_limit_is_unique() {
    for (g, spec) in [
        (Graph::wheel(7).unwrap(), RateSpec::Case2 { alpha: 2.0, delta: 1.0 }),
        (Graph::star(6).unwrap(), RateSpec::Case3 { alpha: 3.0, k: 2.0 }),
        (random_connected(9, 0.3, 4), RateSpec::Linear { beta: 0.7, delta: 1.0 }),
    ] {
        let (f, q) = spec.build(Arc::new(g)).unwrap();
        let sv = SingleVirus::new(Arc::new(f), Arc::new(q)).unwrap();
        let eq = sv.fixed_point(1e-12).unwrap();
        assert!(eq.threshold > 0.0 && eq.newton_converged);
        let mut r = rng(9);
        let cfg = IntegratorConfig { rtol: 1e-11, atol: 1e-14, t_max: 1e5, conv_tol: 1e-11, record: Record::Endpoints, ..Default::default() };
        for _ in 0..10 {
            let x0: Vec<f64> = (0..sv.dim()).map(|_| 0.001 + 0.999 * r.random::<f64>()).collect();
            let sol = integrate_flow(&sv, &x0, &cfg).unwrap();
            let end = DVector::from_column_slice(sol.final_state());
            assert!((end - &eq.x).amax() < 1e-6, "{spec}");
        }
        assert!(sv.field(&eq.x).unwrap().amax() < 1e-12);
    }
}

#[test]
fn regular_graph_closed_form() {
    // β d (1 - x) x = δ x has the uniform root 1 - δ / (β d).
    let c6 = Arc::new(Graph::cycle(6).unwrap());
    let f = RateModel::linear_infection(c6.clone(), 1.0).unwrap();
    let q = RateModel::linear_recovery(6, 1.0).unwrap();
    let eq = single_virus_fixed_point(&f, &q, 1e-12).unwrap();
    assert!(eq.x.iter().all(|&v| (v - 0.5).abs() < 1e-10));

    let f = RateModel::linear_infection(c6, 1.0).unwrap();
    let q = RateModel::linear_recovery(6, 3.0).unwrap();
    assert!(single_virus_fixed_point(&f, &q, 1e-12).unwrap().is_zero());
}

#[test]
fn block_triangular_at_single_virus_equilibrium() {
    let (a, b) = c6_wheel6();
    for (r1, r2) in all_cases() {
        let sys = system(&a, &b, r1, r2);
        let xs = sys.virus1().fixed_point(1e-12).unwrap();
        let s = StateD::new(xs.x.clone(), DVector::zeros(6)).unwrap();
        let j = sys.jacobian(&s).unwrap();
        assert!(j.view((6, 0), (6, 6)).iter().all(|&v| v == 0.0));
        let ones = DVector::from_element(6, 1.0);
        let zero = [0.0; 6];
        let mut expected = sys.virus2().infection.jacobian_at(&zero);
        for i in 0..6 {
            expected.row_mut(i).scale_mut(ones[i] - xs.x[i]);
        }
        expected -= sys.virus2().recovery.jacobian_at(&zero);
        assert!((j.view((6, 6), (6, 6)) - expected).amax() < 1e-15);
    }
}

#[test]
fn below_threshold_decays_at_two_tolerances() {
    let c6 = Graph::cycle(6).unwrap();
    let sys = linear(&c6, &c6, 0.4, 0.4);
    let s0 = StateD::random_interior(&mut rng(1), 6);
    for rtol in [1e-9, 1e-11] {
        let cfg = IntegratorConfig { rtol, atol: rtol * 1e-3, t_max: 1e4, conv_tol: 1e-12, ..Default::default() };
        let traj = sys.integrate_with(&s0, &cfg).unwrap();
        assert!(traj.terminal_reason.is_converged());
        let end = traj.final_state();
        assert!(end.x.amax() < 1e-10 && end.y.amax() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn y_zero_reduces_exactly(n in 2usize..=10, seed in any::<u64>(), case in 0usize..3) {
        let g = random_connected(n, 0.3, seed);
        let h = random_connected(n, 0.3, seed ^ 1);
        let (r1, r2) = all_cases()[case];
        let sys = system(&g, &h, r1, r2);
        let s = StateD::random_interior(&mut rng(seed), n);
        let (dx, _) = sys.field(&StateD::new(s.x.clone(), DVector::zeros(n)).unwrap()).unwrap();
        prop_assert_eq!(dx, sys.virus1().field(&s.x).unwrap());
        let (_, dy) = sys.field(&StateD::new(DVector::zeros(n), s.y.clone()).unwrap()).unwrap();
        prop_assert_eq!(dy, sys.virus2().field(&s.y).unwrap());
    }

    #[test]
    fn regular_closed_form(n in 3usize..=12, tau_d in 1.05f64..6.0) {
        let g = Graph::cycle(n).unwrap();
        let f = RateModel::linear_infection(Arc::new(g), tau_d / 2.0).unwrap();
        let q = RateModel::linear_recovery(n, 1.0).unwrap();
        let eq = single_virus_fixed_point(&f, &q, 1e-12).unwrap();
        let expected = 1.0 - 1.0 / tau_d;
        prop_assert!(eq.x.iter().all(|&v| (v - expected).abs() < 1e-9));
    }
}
