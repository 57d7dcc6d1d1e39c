#![allow(dead_code)]

use std::sync::Arc;

use bivirus_core::graph::Graph;
use bivirus_core::rates::RateSpec;
use bivirus_core::sampling::rng;
use bivirus_core::BiVirusSystem;
use nalgebra::DMatrix;
use rand::Rng;

/// Random spanning tree plus each remaining pair with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((r.random_range(0..i), i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Central finite-difference Jacobian of `f` at `x`.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> DMatrix<f64> {
    let n = x.len();
    let m = f(x).len();
    let mut j = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    for c in 0..n {
        xp[c] = x[c] + h;
        xm[c] = x[c] - h;
        let (fp, fm) = (f(&xp), f(&xm));
        for r in 0..m {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
        xp[c] = x[c];
        xm[c] = x[c];
    }
    j
}

pub fn linear(a: &Graph, b: &Graph, tau1: f64, tau2: f64) -> BiVirusSystem {
    BiVirusSystem::from_specs(
        Arc::new(a.clone()),
        Arc::new(b.clone()),
        &RateSpec::Linear { beta: tau1, delta: 1.0 },
        &RateSpec::Linear { beta: tau2, delta: 1.0 },
    )
    .unwrap()
}

pub fn system(a: &Graph, b: &Graph, r1: RateSpec, r2: RateSpec) -> BiVirusSystem {
    BiVirusSystem::from_specs(Arc::new(a.clone()), Arc::new(b.clone()), &r1, &r2).unwrap()
}

/// One rate pair per built-in case.
pub fn all_cases() -> [(RateSpec, RateSpec); 3] {
    [
        (RateSpec::Linear { beta: 0.9, delta: 1.0 }, RateSpec::Linear { beta: 0.6, delta: 0.8 }),
        (RateSpec::Case2 { alpha: 2.0, delta: 1.0 }, RateSpec::Case2 { alpha: 3.0, delta: 1.5 }),
        (RateSpec::Case3 { alpha: 4.0, k: 2.0 }, RateSpec::Case3 { alpha: 3.0, k: 2.0 }),
    ]
}

/// A cycle and a wheel on 6 nodes.
pub fn c6_wheel6() -> (Graph, Graph) {
    (Graph::cycle(6).unwrap(), Graph::wheel(6).unwrap())
}

/// First R6 cell of a zoomed sweep on the cycle/wheel pair.
pub fn r6_point() -> (f64, f64) {
    let (a, b) = c6_wheel6();
    let grid = bivirus_core::sweep_linear(&a, &b, (1.25, 1.45), (0.75, 0.85), (9, 3), 1e-8).unwrap();
    let cell = grid.cells.iter().find(|c| c.region == bivirus_core::Region::R6).expect("an R6 cell");
    (cell.tau1, cell.tau2)
}
