use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{BiVirusSystem, SingleVirusEquilibrium, FIXED_POINT_TOL};
use crate::error::{Error, Result};
use crate::graph::pf_eigen_default;

/// Default tolerance on eigenvalue signs.
pub const DEFAULT_EPS: f64 = 1e-8;

/// Sample count used by [`classify`] when checking the rate assumptions.
pub const ASSUMPTION_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    VirusFree,
    Virus1Wins,
    Virus2Wins,
    Coexistence,
    Boundary,
}

impl Outcome {
    pub const ALL: [Outcome; 5] =
        [Outcome::VirusFree, Outcome::Virus1Wins, Outcome::Virus2Wins, Outcome::Coexistence, Outcome::Boundary];

    pub fn name(&self) -> &'static str {
        match self {
            Outcome::VirusFree => "VirusFree",
            Outcome::Virus1Wins => "Virus1Wins",
            Outcome::Virus2Wins => "Virus2Wins",
            Outcome::Coexistence => "Coexistence",
            Outcome::Boundary => "Boundary",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown outcome {s:?}")))
    }
}

/// Global outcome with the eigenvalues that decide it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrichotomyVerdict {
    pub outcome: Outcome,
    /// `λ(J_G(0) - J_R(0))`.
    pub lambda_g0: f64,
    /// `λ(J_H(0) - J_S(0))`.
    pub lambda_h0: f64,
    /// `λ(diag(1 - y*) J_G(0) - J_R(0))`.
    pub lambda_u: f64,
    /// `λ(diag(1 - x*) J_H(0) - J_S(0))`.
    pub lambda_v: f64,
    pub x_star: DVector<f64>,
    pub y_star: DVector<f64>,
    pub eps: f64,
}

impl TrichotomyVerdict {
    pub fn avg_x_star(&self) -> f64 {
        self.x_star.mean()
    }

    pub fn avg_y_star(&self) -> f64 {
        self.y_star.mean()
    }
}

/// Maps the four eigenvalues to an outcome.
///
/// Any eigenvalue within `±eps` of zero gives [`Outcome::Boundary`].
pub fn outcome_from_eigenvalues(lambda_g0: f64, lambda_h0: f64, lambda_u: f64, lambda_v: f64, eps: f64) -> Result<Outcome> {
    let lambdas = [lambda_g0, lambda_h0, lambda_u, lambda_v];
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite eigenvalue in {lambdas:?}")));
    }
    if lambdas.iter().any(|l| l.abs() <= eps) {
        return Ok(Outcome::Boundary);
    }
    if lambda_g0 < 0.0 && lambda_h0 < 0.0 {
        return Ok(Outcome::VirusFree);
    }
    Ok(match (lambda_u > 0.0, lambda_v > 0.0) {
        (true, false) => Outcome::Virus1Wins,
        (false, true) => Outcome::Virus2Wins,
        (true, true) => Outcome::Coexistence,
        (false, false) => {
            return Err(Error::Precondition(format!(
                "both single-virus equilibria are stable (lambda_u = {lambda_u:e}, lambda_v = {lambda_v:e})"
            )))
        }
    })
}

fn at_zero(m: &DMatrix<f64>, scale: &DVector<f64>, recovery: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (i, s) in scale.iter().enumerate() {
        out.row_mut(i).scale_mut(*s);
    }
    out - recovery
}

/// Classifies the long-run behaviour after checking the rate assumptions.
pub fn classify(sys: &BiVirusSystem, eps: f64) -> Result<TrichotomyVerdict> {
    let (r1, r2) = sys.check_assumptions(ASSUMPTION_SAMPLES, 0)?;
    for report in [r1, r2] {
        if !report.all_passed() {
            return Err(Error::AssumptionsFailed(Box::new(report)));
        }
    }
    classify_unchecked(sys, eps)
}

/// [`classify`] without the assumption check.
pub fn classify_unchecked(sys: &BiVirusSystem, eps: f64) -> Result<TrichotomyVerdict> {
    let (xs, ys) = rayon::join(|| sys.virus1().fixed_point(FIXED_POINT_TOL), || sys.virus2().fixed_point(FIXED_POINT_TOL));
    classify_with_fixed_points(sys, &xs?, &ys?, eps)
}

/// Classification from precomputed single-virus fixed points.
pub fn classify_with_fixed_points(
    sys: &BiVirusSystem,
    xs: &SingleVirusEquilibrium,
    ys: &SingleVirusEquilibrium,
    eps: f64,
) -> Result<TrichotomyVerdict> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    let n = sys.n();
    if xs.x.len() != n || ys.x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xs.x.len().min(ys.x.len()) });
    }
    let zero = vec![0.0; n];
    let jg = sys.virus1().infection.jacobian_at(&zero);
    let jr = sys.virus1().recovery.jacobian_at(&zero);
    let jh = sys.virus2().infection.jacobian_at(&zero);
    let js = sys.virus2().recovery.jacobian_at(&zero);
    let ones = DVector::from_element(n, 1.0);

    let lambda_g0 = xs.threshold;
    let lambda_h0 = ys.threshold;
    let lambda_u = pf_eigen_default(&at_zero(&jg, &ones.zip_map(&ys.x, |a, b| a - b), &jr))?.value;
    let lambda_v = pf_eigen_default(&at_zero(&jh, &ones.zip_map(&xs.x, |a, b| a - b), &js))?.value;
    let outcome = outcome_from_eigenvalues(lambda_g0, lambda_h0, lambda_u, lambda_v, eps)?;
    Ok(TrichotomyVerdict {
        outcome,
        lambda_g0,
        lambda_h0,
        lambda_u,
        lambda_v,
        x_star: xs.x.clone(),
        y_star: ys.x.clone(),
        eps,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::Graph;
    use crate::rates::RateSpec;

    fn linear(a: Graph, b: Graph, tau1: f64, tau2: f64) -> BiVirusSystem {
        BiVirusSystem::from_specs(
            Arc::new(a),
            Arc::new(b),
            &RateSpec::Linear { beta: tau1, delta: 1.0 },
            &RateSpec::Linear { beta: tau2, delta: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn below_both_thresholds_is_virus_free() {
        let c6 = Graph::cycle(6).unwrap();
        let v = classify(&linear(c6.clone(), c6, 0.4, 0.4), DEFAULT_EPS).unwrap();
        assert_eq!(v.outcome, Outcome::VirusFree);
        assert!((v.lambda_g0 + 0.2).abs() < 1e-9);
        assert!(v.x_star.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn shared_cycle_winner_takes_all() {
        let c6 = Graph::cycle(6).unwrap();
        let v = classify(&linear(c6.clone(), c6, 1.0, 0.75), DEFAULT_EPS).unwrap();
        assert_eq!(v.outcome, Outcome::Virus1Wins);
        // x* = 1/2, y* = 1/3 on the 2-regular cycle.
        assert!((v.lambda_u - (2.0 * (2.0 / 3.0) - 1.0)).abs() < 1e-9);
        assert!((v.lambda_v - (0.75 * 2.0 * 0.5 - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn equal_strengths_on_shared_graph_are_boundary() {
        let w = Graph::wheel(6).unwrap();
        let v = classify(&linear(w.clone(), w, 1.0, 1.0), DEFAULT_EPS).unwrap();
        assert_eq!(v.outcome, Outcome::Boundary);
    }

    #[test]
    fn eigenvalue_table() {
        let e = 1e-8;
        assert_eq!(outcome_from_eigenvalues(-1.0, -1.0, -1.0, -1.0, e).unwrap(), Outcome::VirusFree);
        assert_eq!(outcome_from_eigenvalues(1.0, -1.0, 1.0, -1.0, e).unwrap(), Outcome::Virus1Wins);
        assert_eq!(outcome_from_eigenvalues(-1.0, 1.0, -1.0, 1.0, e).unwrap(), Outcome::Virus2Wins);
        assert_eq!(outcome_from_eigenvalues(1.0, 1.0, 0.5, 0.5, e).unwrap(), Outcome::Coexistence);
        assert_eq!(outcome_from_eigenvalues(1.0, 1.0, 0.5, 1e-9, e).unwrap(), Outcome::Boundary);
        assert!(outcome_from_eigenvalues(1.0, 1.0, -0.5, -0.5, e).is_err());
    }

    #[test]
    fn outcome_names_round_trip() {
        for o in Outcome::ALL {
            assert_eq!(o.to_string().parse::<Outcome>().unwrap(), o);
        }
    }
}
