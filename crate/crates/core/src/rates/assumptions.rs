//! Sampled verification of the standing assumptions on rate pairs and the
//! decreasing-failure-rate margin of local recovery rates.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sampling::QuasiRandom;

use super::{RateFunction, Role};

/// Tolerance on every sign test.
pub const SIGN_TOLERANCE: f64 = 1e-7;
/// Step for central differences of the Jacobian (second derivatives).
pub const SECOND_DIFF_STEP: f64 = 1e-4;
/// Slack on the DFR margin.
pub const DFR_TOLERANCE: f64 = 1e-12;

const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assumption {
    /// Both rates vanish at the origin.
    A1,
    /// Infection Jacobian is positive exactly on the graph's edges.
    A2,
    /// Recovery Jacobian: positive diagonal, nonpositive off-diagonal, diagonally dominant.
    A3,
    /// Infection rates are concave.
    A4,
    /// Recovery rates are convex locally and concave in neighbours.
    A5,
    /// `J_F(u) >= J_F(w)` and `J_Fbar(u) >= J_Fbar(w)` for `u <= w`.
    MonotoneJacobian,
}

impl Assumption {
    pub const ALL: [Assumption; 6] = [
        Assumption::A1,
        Assumption::A2,
        Assumption::A3,
        Assumption::A4,
        Assumption::A5,
        Assumption::MonotoneJacobian,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Assumption::A1 => "A1",
            Assumption::A2 => "A2",
            Assumption::A3 => "A3",
            Assumption::A4 => "A4",
            Assumption::A5 => "A5",
            Assumption::MonotoneJacobian => "C2C3",
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub assumption: Assumption,
    pub point: Vec<f64>,
    /// Offending entry: `[i]`, `[i, j]` or `[i, j, k]` depending on the test.
    pub indices: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssumptionReport {
    pub witnesses: Vec<Witness>,
    pub samples: usize,
    pub notes: Vec<String>,
}

impl AssumptionReport {
    pub fn passed(&self, a: Assumption) -> bool {
        !self.witnesses.iter().any(|w| w.assumption == a)
    }

    pub fn all_passed(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn failed(&self) -> Vec<Assumption> {
        Assumption::ALL.into_iter().filter(|&a| !self.passed(a)).collect()
    }

    pub fn summary(&self) -> String {
        let failed = self.failed();
        if failed.is_empty() {
            return "all assumptions hold".into();
        }
        let ids: Vec<_> = failed.iter().map(Assumption::id).collect();
        format!("failed {}", ids.join(", "))
    }

    fn record(&mut self, assumption: Assumption, point: &[f64], indices: Vec<usize>, value: f64) {
        let count = self.witnesses.iter().filter(|w| w.assumption == assumption).count();
        if count < MAX_WITNESSES {
            self.witnesses.push(Witness { assumption, point: point.to_vec(), indices, value });
        }
    }
}

/// Central differences of the Jacobian along each coordinate:
/// `d[k][(i, j)] ~ d^2 f_i / dx_j dx_k`.
fn jacobian_derivatives(f: &dyn RateFunction, x: &[f64]) -> Vec<DMatrix<f64>> {
    let h = SECOND_DIFF_STEP;
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            probe[k] = x[k] + h;
            let plus = f.jacobian_at(&probe);
            probe[k] = x[k] - h;
            let minus = f.jacobian_at(&probe);
            probe[k] = x[k];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

fn single_virus_jacobian(f: &dyn RateFunction, q: &dyn RateFunction, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut fx = vec![0.0; n];
    f.eval_into(x, &mut fx);
    let mut j = f.jacobian_at(x);
    for i in 0..n {
        for c in 0..n {
            j[(i, c)] *= 1.0 - x[i];
        }
        j[(i, i)] -= fx[i];
    }
    j - q.jacobian_at(x)
}

/// Samples the standing assumptions for an (infection, recovery) pair.
///
/// Violations are collected as witnesses rather than raised. The only errors
/// are precondition failures (wrong roles, mismatched dimensions, infection
/// without a graph).
pub fn check_assumptions(
    infection: &dyn RateFunction,
    recovery: &dyn RateFunction,
    samples: usize,
    seed: u64,
) -> Result<AssumptionReport> {
    if infection.role() != Role::Infection || recovery.role() != Role::Recovery {
        return Err(Error::Precondition("expected an (infection, recovery) pair".into()));
    }
    let n = infection.dim();
    if recovery.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: recovery.dim() });
    }
    let graph = infection
        .graph()
        .ok_or_else(|| Error::Precondition("infection rate has no graph".into()))?;
    let tol = SIGN_TOLERANCE;
    let mut report = AssumptionReport {
        samples,
        notes: vec![
            "A3 dominance tested as sum_{j!=i} |J_Q[i,j]| < J_Q[i,i]".into(),
            "A4/A5 second derivatives from central differences of the analytic Jacobian".into(),
        ],
        ..Default::default()
    };

    let zero = vec![0.0; n];
    let mut out = vec![0.0; n];
    infection.eval_into(&zero, &mut out);
    for (i, &v) in out.iter().enumerate() {
        if v != 0.0 {
            report.record(Assumption::A1, &zero, vec![i], v);
        }
    }
    recovery.eval_into(&zero, &mut out);
    for (i, &v) in out.iter().enumerate() {
        if v != 0.0 {
            report.record(Assumption::A1, &zero, vec![i], v);
        }
    }

    let margin = 2.0 * SECOND_DIFF_STEP;
    let mut seq = QuasiRandom::new(n, seed);
    for _ in 0..samples {
        let x = seq.next_in(margin, 1.0 - margin);

        let jf = infection.jacobian_at(&x);
        for i in 0..n {
            for j in 0..n {
                let v = jf[(i, j)];
                let bad = if i != j && graph.has_edge(i, j) { v <= tol } else { v.abs() > tol };
                if bad {
                    report.record(Assumption::A2, &x, vec![i, j], v);
                }
            }
        }

        let jq = recovery.jacobian_at(&x);
        for i in 0..n {
            let diag = jq[(i, i)];
            if diag <= tol {
                report.record(Assumption::A3, &x, vec![i, i], diag);
            }
            let mut off = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                let v = jq[(i, j)];
                if v > tol {
                    report.record(Assumption::A3, &x, vec![i, j], v);
                }
                off += v.abs();
            }
            if diag - off <= tol {
                report.record(Assumption::A3, &x, vec![i], diag - off);
            }
        }

        let df = jacobian_derivatives(infection, &x);
        for (k, dk) in df.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    if dk[(i, j)] > tol {
                        report.record(Assumption::A4, &x, vec![i, j, k], dk[(i, j)]);
                    }
                }
            }
        }

        let dq = jacobian_derivatives(recovery, &x);
        for i in 0..n {
            let local = dq[i][(i, i)];
            if local < -tol {
                report.record(Assumption::A5, &x, vec![i, i, i], local);
            }
            for k in (0..n).filter(|&k| k != i) {
                for j in (0..n).filter(|&j| j != i) {
                    let v = dq[k][(i, j)];
                    if v > tol {
                        report.record(Assumption::A5, &x, vec![i, j, k], v);
                    }
                }
            }
        }

        // u = x * c <= w = x componentwise
        let c = seq.next_in(0.0, 1.0);
        let u: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a * b).collect();
        let ju = infection.jacobian_at(&u);
        let jbar_u = single_virus_jacobian(infection, recovery, &u);
        let jbar_w = single_virus_jacobian(infection, recovery, &x);
        for i in 0..n {
            for j in 0..n {
                let d = ju[(i, j)] - jf[(i, j)];
                if d < -tol {
                    report.record(Assumption::MonotoneJacobian, &u, vec![i, j], d);
                }
                let d = jbar_u[(i, j)] - jbar_w[(i, j)];
                if d < -tol {
                    report.record(Assumption::MonotoneJacobian, &u, vec![i, j], d);
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfrReport {
    pub satisfied: bool,
    /// Minimum of `x q_i'(x) - q_i(x)` over the grid and nodes.
    pub min_margin: f64,
    /// Grid value of `x` where the minimum occurs.
    pub argmin: f64,
    pub argmin_node: usize,
}

/// Decreasing-failure-rate margin `x q'(x) - q(x)` on the grid `k / samples`,
/// `k = 1..=samples`, for a recovery rate that depends on local state only.
pub fn check_dfr(recovery: &dyn RateFunction, samples: usize) -> Result<DfrReport> {
    if recovery.role() != Role::Recovery {
        return Err(Error::Precondition("DFR margin applies to recovery rates".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let n = recovery.dim();
    let mut best = DfrReport { satisfied: true, min_margin: f64::INFINITY, argmin: 0.0, argmin_node: 0 };
    let mut q = vec![0.0; n];
    for k in 1..=samples {
        let x = k as f64 / samples as f64;
        let state = DVector::from_element(n, x);
        let j = recovery.jacobian_at(state.as_slice());
        for r in 0..n {
            for c in (0..n).filter(|&c| c != r) {
                if j[(r, c)] != 0.0 {
                    return Err(Error::NonLocalRecovery { row: r, col: c, value: j[(r, c)] });
                }
            }
        }
        recovery.eval_into(state.as_slice(), &mut q);
        for i in 0..n {
            let margin = x * j[(i, i)] - q[i];
            if margin < best.min_margin {
                best = DfrReport { satisfied: true, min_margin: margin, argmin: x, argmin_node: i };
            }
        }
    }
    best.satisfied = best.min_margin >= -DFR_TOLERANCE;
    Ok(best)
}
