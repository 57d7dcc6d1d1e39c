//! Infection and recovery rate functions.
//!
//! A rate function maps the infection vector of one virus to a per-node rate.
//! Infection rates carry a graph (their Jacobian must follow its adjacency
//! pattern); recovery rates act on the local state.

mod assumptions;
mod spec;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub use assumptions::{
    check_assumptions, check_dfr, Assumption, AssumptionReport, DfrReport, Witness,
    DFR_TOLERANCE, SIGN_TOLERANCE,
};
pub use spec::RateSpec;

/// Slack allowed when validating that a state lies in `[0, 1]^n`.
pub const DOMAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Infection,
    Recovery,
}

/// A vector field `[0,1]^n -> R^n` with an analytic Jacobian.
///
/// Implementors provide the unchecked kernels; [`RateFunction::evaluate`] and
/// [`RateFunction::jacobian`] validate the state first.
pub trait RateFunction: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn role(&self) -> Role;

    /// Graph whose adjacency pattern the Jacobian follows (infection rates).
    fn graph(&self) -> Option<&Graph> {
        None
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]);

    fn jacobian_at(&self, x: &[f64]) -> DMatrix<f64>;

    fn evaluate(&self, state: &DVector<f64>) -> Result<DVector<f64>> {
        check_unit_box(state.as_slice(), self.dim())?;
        let mut out = DVector::zeros(self.dim());
        self.eval_into(state.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    fn jacobian(&self, state: &DVector<f64>) -> Result<DMatrix<f64>> {
        check_unit_box(state.as_slice(), self.dim())?;
        Ok(self.jacobian_at(state.as_slice()))
    }
}

pub(crate) fn check_unit_box(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    for (index, &value) in x.iter().enumerate() {
        if !(value >= -DOMAIN_SLACK && value <= 1.0 + DOMAIN_SLACK) {
            return Err(Error::OutOfDomain { index, value });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateKind {
    /// `beta * A x`
    LinearInfection { beta: f64 },
    /// `sum_j a_ij ln(1 + alpha x_j)`
    LogInfection { alpha: f64 },
    /// `delta * x_i`
    LinearRecovery { delta: f64 },
    /// `(1 + x_i)^k - 1`
    PolyRecovery { k: f64 },
}

impl RateKind {
    pub fn role(&self) -> Role {
        match self {
            RateKind::LinearInfection { .. } | RateKind::LogInfection { .. } => Role::Infection,
            RateKind::LinearRecovery { .. } | RateKind::PolyRecovery { .. } => Role::Recovery,
        }
    }
}

/// One of the built-in rate functions.
#[derive(Debug, Clone)]
pub struct RateModel {
    kind: RateKind,
    n: usize,
    graph: Option<Arc<Graph>>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RateModel {
    pub fn linear_infection(graph: Arc<Graph>, beta: f64) -> Result<Self> {
        let beta = positive("beta", beta)?;
        Ok(Self { kind: RateKind::LinearInfection { beta }, n: graph.node_count(), graph: Some(graph) })
    }

    pub fn log_infection(graph: Arc<Graph>, alpha: f64) -> Result<Self> {
        let alpha = positive("alpha", alpha)?;
        Ok(Self { kind: RateKind::LogInfection { alpha }, n: graph.node_count(), graph: Some(graph) })
    }

    pub fn linear_recovery(n: usize, delta: f64) -> Result<Self> {
        let delta = positive("delta", delta)?;
        Ok(Self { kind: RateKind::LinearRecovery { delta }, n, graph: None })
    }

    pub fn poly_recovery(n: usize, k: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 1.0) {
            return Err(Error::InvalidParameter(format!("k must be >= 1, got {k}")));
        }
        Ok(Self { kind: RateKind::PolyRecovery { k }, n, graph: None })
    }

    pub fn kind(&self) -> RateKind {
        self.kind
    }
}

impl RateFunction for RateModel {
    fn dim(&self) -> usize {
        self.n
    }

    fn role(&self) -> Role {
        self.kind.role()
    }

    fn graph(&self) -> Option<&Graph> {
        self.graph.as_deref()
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match (self.kind, self.graph.as_deref()) {
            (RateKind::LinearInfection { beta }, Some(g)) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = beta * g.neighbors(i).iter().map(|&j| x[j]).sum::<f64>();
                }
            }
            (RateKind::LogInfection { alpha }, Some(g)) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = g.neighbors(i).iter().map(|&j| (alpha * x[j]).ln_1p()).sum::<f64>();
                }
            }
            (RateKind::LinearRecovery { delta }, _) => {
                for (o, &xi) in out.iter_mut().zip(x) {
                    *o = delta * xi;
                }
            }
            (RateKind::PolyRecovery { k }, _) => {
                for (o, &xi) in out.iter_mut().zip(x) {
                    *o = (1.0 + xi).powf(k) - 1.0;
                }
            }
            _ => unreachable!("infection kinds are always constructed with a graph"),
        }
    }

    fn jacobian_at(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut j = DMatrix::zeros(n, n);
        match (self.kind, self.graph.as_deref()) {
            (RateKind::LinearInfection { beta }, Some(g)) => {
                for &(u, v) in g.edges() {
                    j[(u, v)] = beta;
                    j[(v, u)] = beta;
                }
            }
            (RateKind::LogInfection { alpha }, Some(g)) => {
                for &(u, v) in g.edges() {
                    j[(u, v)] = alpha / (1.0 + alpha * x[v]);
                    j[(v, u)] = alpha / (1.0 + alpha * x[u]);
                }
            }
            (RateKind::LinearRecovery { delta }, _) => j.fill_diagonal(delta),
            (RateKind::PolyRecovery { k }, _) => {
                for i in 0..n {
                    j[(i, i)] = k * (1.0 + x[i]).powf(k - 1.0);
                }
            }
            _ => unreachable!("infection kinds are always constructed with a graph"),
        }
        j
    }
}
