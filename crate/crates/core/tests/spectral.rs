mod common;

use bivirus_core::graph::{is_irreducible, pf_eigen, pf_eigen_default, Graph};
use nalgebra::DMatrix;
use proptest::prelude::*;

use common::random_connected;

fn dense_radius(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.max()
}

#[test]
fn star_radius_matches_dense_eigensolve() {
    for n in [4, 7, 10] {
        let a = Graph::star(n).unwrap().adjacency();
        let pf = pf_eigen_default(&a).unwrap();
        assert!((pf.value - ((n - 1) as f64).sqrt()).abs() < 1e-9);
        assert!((pf.value - dense_radius(&a)).abs() < 1e-9);
    }
}

#[test]
fn wheel_radius_matches_dense_eigensolve() {
    for n in [4, 6, 11] {
        let a = Graph::wheel(n).unwrap().adjacency();
        let expected = 1.0 + ((n - 1) as f64 + 1.0).sqrt();
        assert!((pf_eigen_default(&a).unwrap().value - expected).abs() < 1e-9, "n = {n}");
        assert!((expected - dense_radius(&a)).abs() < 1e-9);
    }
}

fn random_metzler(n: usize, seed: u64) -> DMatrix<f64> {
    use rand::Rng;
    let mut r = bivirus_core::sampling::rng(seed);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, (i + 1) % n)] = 0.1 + r.random::<f64>();
        for j in 0..n {
            if i == j {
                m[(i, i)] = 4.0 * r.random::<f64>() - 2.0;
            } else if r.random::<f64>() < 0.3 {
                m[(i, j)] = r.random::<f64>();
            }
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_radius_within_degree_bounds(n in 2usize..=50, p in 0.0f64..0.3, seed in any::<u64>()) {
        let g = random_connected(n, p, seed);
        let pf = pf_eigen_default(&g.adjacency()).unwrap();
        let (dmin, dmax) = g.degrees();
        prop_assert!(pf.value >= dmin as f64 - 1e-9 && pf.value <= dmax as f64 + 1e-9);
        prop_assert!(pf.vector.iter().all(|&v| v > 0.0));
        prop_assert!(pf.residual <= 1e-10);
        prop_assert!((pf.value - dense_radius(&g.adjacency())).abs() < 1e-8);
    }

    #[test]
    fn shift_equivariance(n in 1usize..=20, s in -5.0f64..5.0, seed in any::<u64>()) {
        let m = random_metzler(n, seed);
        prop_assume!(is_irreducible(&m));
        let tol = 1e-12;
        let base = pf_eigen(&m, tol, 1_000_000).unwrap();
        let shifted = pf_eigen(&(&m + DMatrix::identity(n, n) * s), tol, 1_000_000).unwrap();
        prop_assert!((shifted.value - base.value - s).abs() <= 2.0 * tol,
            "{} vs {}", shifted.value - s, base.value);
        prop_assert!(base.vector.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn metzler_radius_matches_schur(n in 2usize..=12, seed in any::<u64>()) {
        let m = random_metzler(n, seed);
        let pf = pf_eigen_default(&m).unwrap();
        let oracle = m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((pf.value - oracle).abs() < 1e-8, "{} vs {oracle}", pf.value);
    }
}
