mod common;

use bivirus_core::analysis::{
    agreement_config, bracket_coexistence, check_agreement, classify_unchecked, Outcome, DEFAULT_EPS, DEFAULT_RADIUS,
};
use bivirus_core::graph::Graph;
use bivirus_core::io::write_regions;
use bivirus_core::sampling::rng;
use bivirus_core::sweep::{default_range, linspace, sweep_linear, threshold_curves, Region};
use rand::seq::IndexedRandom;

use common::{c6_wheel6, linear, random_connected};

fn rank(r: Region) -> usize {
    match r {
        Region::R3 => 0,
        Region::R4 => 1,
        Region::R6 => 2,
        Region::R5 => 3,
        other => panic!("unexpected {other} above the virus-2 threshold"),
    }
}

#[test]
fn rows_cross_regions_in_order() {
    let (a, b) = c6_wheel6();
    let lb = b.spectral_radius().unwrap();
    let grid = sweep_linear(&a, &b, default_range(&a).unwrap(), default_range(&b).unwrap(), (40, 12), DEFAULT_EPS).unwrap();
    for (i2, &tau2) in grid.tau2_axis.iter().enumerate() {
        let labels: Vec<Region> = grid.row(i2).filter(|&r| r != Region::Boundary).collect();
        if tau2 * lb > 1.0 {
            let ranks: Vec<usize> = labels.iter().map(|&r| rank(r)).collect();
            assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "row {tau2}: {labels:?}");
        } else {
            assert!(labels.iter().all(|r| matches!(r, Region::R1 | Region::R2)));
        }
    }
}

#[test]
fn virus_free_cells_are_below_both_thresholds() {
    let (a, b) = c6_wheel6();
    let (la, lb) = (a.spectral_radius().unwrap(), b.spectral_radius().unwrap());
    let grid = sweep_linear(&a, &b, default_range(&a).unwrap(), default_range(&b).unwrap(), (15, 15), DEFAULT_EPS).unwrap();
    assert!(grid.count(Region::R1) > 0);
    for c in grid.cells.iter().filter(|c| c.region == Region::R1) {
        assert!(c.tau1 * la <= 1.0 && c.tau2 * lb <= 1.0);
    }
}

#[test]
fn identical_graphs_never_coexist() {
    for g in [Graph::cycle(8).unwrap(), Graph::wheel(7).unwrap(), random_connected(9, 0.3, 12)] {
        let range = default_range(&g).unwrap();
        let grid = sweep_linear(&g, &g, range, range, (13, 11), DEFAULT_EPS).unwrap();
        assert_eq!(grid.count(Region::R6), 0);
    }
}

#[test]
fn blue_curve_is_monotone_and_left_of_red() {
    for (a, b) in [c6_wheel6(), (random_connected(10, 0.3, 1), random_connected(10, 0.2, 2))] {
        let lb = b.spectral_radius().unwrap();
        let axis = linspace(0.5 / lb, 4.0 / lb, 15).unwrap();
        let curves = threshold_curves(&a, &b, &axis).unwrap();
        assert!(curves.windows(2).all(|w| w[1].tau1_blue >= w[0].tau1_blue - 1e-12));
        for p in curves.iter().filter(|p| !p.tau1_red.is_nan()) {
            assert!(p.tau1_blue <= p.tau1_red + 1e-7, "{p:?}");
        }
        let past_meeting = curves.iter().filter(|p| p.tau2 * lb > 1.0).count();
        assert!(past_meeting > 0);
    }
}

#[test]
fn blue_curve_moves_right_of_solo_threshold() {
    let (a, b) = c6_wheel6();
    let lb = b.spectral_radius().unwrap();
    let c = threshold_curves(&a, &b, &[1.0 / lb, 1.01 / lb]).unwrap();
    assert!((c[0].tau1_blue - 0.5).abs() < 1e-9);
    assert!(c[1].tau1_blue > 0.5);
}

#[test]
fn region_csv_is_identical_across_runs_and_thread_counts() {
    let (a, b) = c6_wheel6();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let grid = sweep_linear(&a, &b, (0.3, 2.0), (0.2, 1.2), (9, 7), DEFAULT_EPS).unwrap();
            let mut buf = Vec::new();
            write_regions(&mut buf, &grid).unwrap();
            buf
        })
    };
    let first = run(1);
    assert_eq!(first, run(1));
    assert_eq!(first, run(4));
}

#[test]
fn sampled_cells_match_simulation() {
    let (a, b) = c6_wheel6();
    let grid = sweep_linear(&a, &b, (0.3, 2.0), (0.2, 1.2), (18, 14), DEFAULT_EPS).unwrap();
    let candidates: Vec<_> = grid.cells.iter().filter(|c| c.region != Region::Boundary).collect();
    let mut r = rng(31);
    for cell in candidates.choose_multiple(&mut r, 10) {
        let sys = linear(&a, &b, cell.tau1, cell.tau2);
        let v = classify_unchecked(&sys, DEFAULT_EPS).unwrap();
        assert_eq!(Region::from_verdict(&v), cell.region);
        let bracket = match v.outcome {
            Outcome::Coexistence => Some(bracket_coexistence(&sys, DEFAULT_RADIUS, &v).unwrap()),
            _ => None,
        };
        let report = check_agreement(&sys, &v, bracket.as_ref(), 3, 5, &agreement_config()).unwrap();
        assert!(report.all_agree(), "{cell:?}: {report:?}");
    }
}
