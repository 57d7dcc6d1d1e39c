//! Region map of the `(τ1, τ2)` plane for linear rates with `δ = 1`.
//!
//! With `β = τ` and `δ = 1` each cell is classified and labelled:
//!
//! ```text
//! R1  virus-free
//! R2  virus 1 wins, virus 2 below its own threshold
//! R3  virus 2 wins, virus 1 below its own threshold
//! R4  virus 2 wins, both above their own thresholds
//! R5  virus 1 wins, both above their own thresholds
//! R6  coexistence
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::analysis::{classify_with_fixed_points, Outcome, TrichotomyVerdict};
use crate::dynamics::{single_virus_fixed_point, BiVirusSystem, SingleVirusEquilibrium, FIXED_POINT_TOL};
use crate::error::{Error, Result};
use crate::graph::{pf_eigen_default, Graph};
use crate::rates::{RateModel, RateSpec};

/// Tolerance on `τ1` when inverting the virus-2 threshold relation.
pub const BISECTION_TOL: f64 = 1e-8;

const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    Boundary,
}

impl Region {
    pub const ALL: [Region; 7] =
        [Region::R1, Region::R2, Region::R3, Region::R4, Region::R5, Region::R6, Region::Boundary];

    pub fn name(&self) -> &'static str {
        match self {
            Region::R1 => "R1",
            Region::R2 => "R2",
            Region::R3 => "R3",
            Region::R4 => "R4",
            Region::R5 => "R5",
            Region::R6 => "R6",
            Region::Boundary => "Boundary",
        }
    }

    pub fn from_verdict(v: &TrichotomyVerdict) -> Region {
        match v.outcome {
            Outcome::VirusFree => Region::R1,
            Outcome::Virus1Wins if v.lambda_h0 <= 0.0 => Region::R2,
            Outcome::Virus1Wins => Region::R5,
            Outcome::Virus2Wins if v.lambda_g0 <= 0.0 => Region::R3,
            Outcome::Virus2Wins => Region::R4,
            Outcome::Coexistence => Region::R6,
            Outcome::Boundary => Region::Boundary,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Region::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown region {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionCell {
    pub tau1: f64,
    pub tau2: f64,
    pub region: Region,
    pub lambda_g0: f64,
    pub lambda_h0: f64,
    pub lambda_u: f64,
    pub lambda_v: f64,
}

/// Labelled grid; `cells` is row-major with `τ2` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub tau1_axis: Vec<f64>,
    pub tau2_axis: Vec<f64>,
    pub cells: Vec<RegionCell>,
}

impl RegionGrid {
    pub fn cell(&self, i1: usize, i2: usize) -> &RegionCell {
        &self.cells[i2 * self.tau1_axis.len() + i1]
    }

    /// Labels along the row with `τ2 = tau2_axis[i2]`.
    pub fn row(&self, i2: usize) -> impl Iterator<Item = Region> + '_ {
        let w = self.tau1_axis.len();
        self.cells[i2 * w..(i2 + 1) * w].iter().map(|c| c.region)
    }

    pub fn count(&self, region: Region) -> usize {
        self.cells.iter().filter(|c| c.region == region).count()
    }
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {points}")));
    }
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("range must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|i| if i == points - 1 { hi } else { lo + step * i as f64 }).collect())
}

/// Default axis `[0.5/λ, 4/λ]` for a graph with spectral radius `λ`.
pub fn default_range(graph: &Graph) -> Result<(f64, f64)> {
    let lambda = graph.spectral_radius()?;
    Ok((0.5 / lambda, 4.0 / lambda))
}

/// Single-virus fixed point for linear rates `β = τ`, `δ = 1`.
pub fn linear_fixed_point(graph: &Arc<Graph>, tau: f64) -> Result<SingleVirusEquilibrium> {
    let f = RateModel::linear_infection(graph.clone(), tau)?;
    let q = RateModel::linear_recovery(graph.node_count(), 1.0)?;
    single_virus_fixed_point(&f, &q, FIXED_POINT_TOL)
}

fn fixed_points(graph: &Arc<Graph>, axis: &[f64]) -> Result<Vec<SingleVirusEquilibrium>> {
    axis.par_iter().map(|&t| linear_fixed_point(graph, t)).collect()
}

fn linear_system(a: &Arc<Graph>, b: &Arc<Graph>, tau1: f64, tau2: f64) -> Result<BiVirusSystem> {
    BiVirusSystem::from_specs(
        a.clone(),
        b.clone(),
        &RateSpec::Linear { beta: tau1, delta: 1.0 },
        &RateSpec::Linear { beta: tau2, delta: 1.0 },
    )
}

/// Classifies every cell of the `grid.0 x grid.1` grid over the two ranges.
/// Fixed points are computed once per axis value; cells run in parallel and
/// are stored in grid order.
pub fn sweep_linear(
    graph_a: &Graph,
    graph_b: &Graph,
    tau1_range: (f64, f64),
    tau2_range: (f64, f64),
    grid: (usize, usize),
    eps: f64,
) -> Result<RegionGrid> {
    if graph_a.node_count() != graph_b.node_count() {
        return Err(Error::DimensionMismatch { expected: graph_a.node_count(), got: graph_b.node_count() });
    }
    let tau1_axis = linspace(tau1_range.0, tau1_range.1, grid.0)?;
    let tau2_axis = linspace(tau2_range.0, tau2_range.1, grid.1)?;
    let a = Arc::new(graph_a.clone());
    let b = Arc::new(graph_b.clone());
    let xs = fixed_points(&a, &tau1_axis)?;
    let ys = fixed_points(&b, &tau2_axis)?;

    let w = tau1_axis.len();
    let cells = (0..w * tau2_axis.len())
        .into_par_iter()
        .map(|k| {
            let (i1, i2) = (k % w, k / w);
            let (tau1, tau2) = (tau1_axis[i1], tau2_axis[i2]);
            let sys = linear_system(&a, &b, tau1, tau2)?;
            let v = classify_with_fixed_points(&sys, &xs[i1], &ys[i2], eps)?;
            Ok(RegionCell {
                tau1,
                tau2,
                region: Region::from_verdict(&v),
                lambda_g0: v.lambda_g0,
                lambda_h0: v.lambda_h0,
                lambda_u: v.lambda_u,
                lambda_v: v.lambda_v,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionGrid { tau1_axis, tau2_axis, cells })
}

/// Threshold curves at one `τ2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub tau2: f64,
    /// `1 / λ(diag(1 - y*(τ2)) A)`: virus 1 survives to the right of it.
    pub tau1_blue: f64,
    /// Root of `τ2 λ(diag(1 - x*(τ1)) B) = 1`: virus 2 survives to the left
    /// of it. NaN when `τ2 λ(B) < 1`.
    pub tau1_red: f64,
}

fn survival_radius(graph: &Graph, other: &DVector<f64>) -> Result<f64> {
    let mut m = graph.adjacency();
    for (i, v) in other.iter().enumerate() {
        m.row_mut(i).scale_mut(1.0 - v);
    }
    Ok(pf_eigen_default(&m)?.value)
}

fn red_threshold(a: &Arc<Graph>, b: &Graph, lambda_a: f64, lambda_b: f64, tau2: f64) -> Result<f64> {
    let phi = |tau1: f64| -> Result<f64> {
        let xs = linear_fixed_point(a, tau1)?;
        Ok(tau2 * survival_radius(b, &xs.x)? - 1.0)
    };
    let lo = 1.0 / lambda_a;
    if tau2 * lambda_b < 1.0 {
        return Ok(f64::NAN);
    }
    if phi(lo)? <= 0.0 {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo;
    let mut doublings = 0;
    while phi(hi)? > 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::Bracket { lo, hi, detail: format!("no sign change for tau2 = {tau2}") });
        }
    }
    let mut lo = lo;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if phi(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Both threshold curves sampled at each `τ2` of `tau2_axis`.
pub fn threshold_curves(graph_a: &Graph, graph_b: &Graph, tau2_axis: &[f64]) -> Result<Vec<CurvePoint>> {
    if graph_a.node_count() != graph_b.node_count() {
        return Err(Error::DimensionMismatch { expected: graph_a.node_count(), got: graph_b.node_count() });
    }
    if tau2_axis.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidParameter("tau2 values must be positive".into()));
    }
    let a = Arc::new(graph_a.clone());
    let b = Arc::new(graph_b.clone());
    let lambda_a = graph_a.spectral_radius()?;
    let lambda_b = graph_b.spectral_radius()?;
    tau2_axis
        .par_iter()
        .map(|&tau2| {
            let ys = linear_fixed_point(&b, tau2)?;
            let tau1_blue = 1.0 / survival_radius(graph_a, &ys.x)?;
            let tau1_red = red_threshold(&a, graph_b, lambda_a, lambda_b, tau2)?;
            Ok(CurvePoint { tau2, tau1_blue, tau1_red })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.1, 0.7, 4).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[3], 0.7);
        assert!((v[1] - 0.3).abs() < 1e-15);
        assert!(linspace(0.1, 0.7, 1).is_err());
        assert!(linspace(0.0, 0.7, 3).is_err());
    }

    #[test]
    fn low_corner_is_virus_free() {
        let c6 = Graph::cycle(6).unwrap();
        let g = sweep_linear(&c6, &c6, (0.1, 0.2), (0.1, 0.2), (3, 3), 1e-8).unwrap();
        assert_eq!(g.count(Region::R1), 9);
    }

    #[test]
    fn curves_meet_at_solo_thresholds() {
        let a = Graph::cycle(6).unwrap();
        let b = Graph::wheel(6).unwrap();
        let lb = b.spectral_radius().unwrap();
        let c = threshold_curves(&a, &b, &[1.0 / lb, 0.5 / lb]).unwrap();
        assert!((c[0].tau1_blue - 0.5).abs() < 1e-9);
        assert!((c[0].tau1_red - 0.5).abs() < 1e-6);
        assert!((c[1].tau1_blue - 0.5).abs() < 1e-12);
        assert!(c[1].tau1_red.is_nan());
    }

    #[test]
    fn region_names_round_trip() {
        for r in Region::ALL {
            assert_eq!(r.to_string().parse::<Region>().unwrap(), r);
        }
    }
}
