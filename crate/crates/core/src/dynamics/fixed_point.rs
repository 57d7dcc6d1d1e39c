use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::pf_eigen_default;
use crate::rates::RateFunction;

use super::integrator::{integrate_flow, Flow, IntegratorConfig, Record};
use super::{check_pair, Pair};

/// Default field residual for fixed points.
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// Thresholds at or below this value are treated as non-positive.
pub const ZERO_THRESHOLD_SLACK: f64 = 1e-12;

const START: f64 = 0.99;
const COARSE_TOL: f64 = 1e-8;
const T_MAX: f64 = 1e4;
const NEWTON_MAX_ITER: usize = 200;

/// Fixed point of `dx/dt = diag(1 - x) F(x) - Q(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleVirusEquilibrium {
    pub x: DVector<f64>,
    /// `λ(J_F(0) - J_Q(0))`.
    pub threshold: f64,
    /// Max-norm of the field at `x`.
    pub residual: f64,
    /// `false` when Newton polishing failed and `x` is the integration endpoint.
    pub newton_converged: bool,
}

impl SingleVirusEquilibrium {
    pub fn is_zero(&self) -> bool {
        self.x.iter().all(|&v| v == 0.0)
    }
}

fn residual(pair: &Pair<'_>, x: &[f64], out: &mut [f64]) -> f64 {
    pair.field(x, out);
    out.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Integrates from `0.99 * 1` and polishes the endpoint with damped Newton
/// until the field max-norm is below `tol`. Returns exactly zero when the
/// threshold eigenvalue is not positive.
pub fn single_virus_fixed_point(
    infection: &dyn RateFunction,
    recovery: &dyn RateFunction,
    tol: f64,
) -> Result<SingleVirusEquilibrium> {
    check_pair(infection, recovery)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("fixed-point tolerance must be positive, got {tol}")));
    }
    let pair = Pair { f: infection, q: recovery };
    let n = pair.dim();
    let threshold = pf_eigen_default(&pair.linearization_at_zero())?.value;
    if threshold <= ZERO_THRESHOLD_SLACK {
        return Ok(SingleVirusEquilibrium { x: DVector::zeros(n), threshold, residual: 0.0, newton_converged: true });
    }

    let cfg = IntegratorConfig { t_max: T_MAX, conv_tol: tol.max(COARSE_TOL), record: Record::Endpoints, ..Default::default() };
    let sol = integrate_flow(&pair, &vec![START; n], &cfg)?;
    let mut x = sol.final_state().to_vec();
    let mut f = vec![0.0; n];
    let mut res = residual(&pair, &x, &mut f);
    let start = (x.clone(), res);

    let mut trial = vec![0.0; n];
    let mut f_trial = vec![0.0; n];
    let mut converged = res < tol;
    for _ in 0..NEWTON_MAX_ITER {
        if converged {
            break;
        }
        let rhs = -DVector::from_column_slice(&f);
        let Some(dx) = pair.jacobian(&x).lu().solve(&rhs) else { break };
        let mut step = 1.0;
        let mut accepted = false;
        while step > 1e-10 {
            for i in 0..n {
                trial[i] = x[i] + step * dx[i];
            }
            if trial.iter().all(|&v| v > 0.0 && v < 1.0) {
                let r = residual(&pair, &trial, &mut f_trial);
                if r < res {
                    x.copy_from_slice(&trial);
                    f.copy_from_slice(&f_trial);
                    res = r;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        converged = res < tol;
    }

    if !converged {
        let (x0, r0) = start;
        return Ok(SingleVirusEquilibrium { x: DVector::from_vec(x0), threshold, residual: r0, newton_converged: false });
    }
    Ok(SingleVirusEquilibrium { x: DVector::from_vec(x), threshold, residual: res, newton_converged: true })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::Graph;
    use crate::rates::{RateModel, RateSpec};

    fn solve(graph: Graph, spec: RateSpec) -> SingleVirusEquilibrium {
        let (f, q) = spec.build(Arc::new(graph)).unwrap();
        single_virus_fixed_point(&f, &q, FIXED_POINT_TOL).unwrap()
    }

    #[test]
    fn regular_graph_closed_form() {
        for (n, tau) in [(6, 1.0), (6, 2.5), (9, 0.8)] {
            let eq = solve(Graph::cycle(n).unwrap(), RateSpec::Linear { beta: tau, delta: 1.0 });
            let expected = 1.0 - 1.0 / (2.0 * tau);
            assert!(eq.newton_converged);
            assert!(eq.x.iter().all(|&v| (v - expected).abs() < 1e-10), "{:?}", eq.x);
        }
        let eq = solve(Graph::complete(5).unwrap(), RateSpec::Linear { beta: 0.6, delta: 1.2 });
        assert!(eq.x.iter().all(|&v| (v - (1.0 - 1.2 / (0.6 * 4.0))).abs() < 1e-10));
    }

    #[test]
    fn below_threshold_is_exact_zero() {
        let eq = solve(Graph::cycle(6).unwrap(), RateSpec::Linear { beta: 1.0, delta: 3.0 });
        assert!(eq.is_zero());
        assert!((eq.threshold - (2.0 - 3.0)).abs() < 1e-9);
    }

    #[test]
    fn nonlinear_fixed_point_is_interior_root() {
        let graph = Arc::new(Graph::wheel(7).unwrap());
        let f = RateModel::log_infection(graph, 2.0).unwrap();
        let q = RateModel::poly_recovery(7, 2.0).unwrap();
        let eq = single_virus_fixed_point(&f, &q, FIXED_POINT_TOL).unwrap();
        assert!(eq.threshold > 0.0);
        assert!(eq.newton_converged);
        assert!(eq.residual < FIXED_POINT_TOL);
        assert!(eq.x.iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn rejects_swapped_roles() {
        let graph = Arc::new(Graph::cycle(4).unwrap());
        let f = RateModel::linear_infection(graph, 1.0).unwrap();
        let q = RateModel::linear_recovery(4, 1.0).unwrap();
        assert!(single_virus_fixed_point(&q, &f, 1e-12).is_err());
        assert!(single_virus_fixed_point(&f, &q, 0.0).is_err());
    }
}
