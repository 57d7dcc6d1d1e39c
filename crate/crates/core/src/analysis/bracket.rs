use nalgebra::{DMatrix, DVector};

use crate::dynamics::{BiVirusSystem, IntegratorConfig, SingleVirus, StateD};
use crate::error::{Error, Result};
use crate::graph::pf_eigen_default;

use super::{ConeOrder, Outcome, TrichotomyVerdict};

/// Default perturbation radius along the unstable eigenvector.
pub const DEFAULT_RADIUS: f64 = 1e-4;

/// Required field max-norm at the bracket endpoints.
pub const ENDPOINT_RESIDUAL: f64 = 1e-8;

/// Slack on the ordering tests.
pub const BRACKET_SLACK: f64 = 1e-9;

/// Order interval `[lower, upper]` in the southeast order containing the
/// coexistence equilibria reached from the interior.
#[derive(Debug, Clone)]
pub struct CoexistenceBracket {
    /// Limit of the flow from `(0, y*) + r (u, v)`.
    pub lower: StateD,
    /// Limit of the flow from `(x*, 0) + r (w, v')`.
    pub upper: StateD,
    /// Unstable eigenvector at `(0, y*)`: `u >> 0`.
    pub eigvec_u: DVector<f64>,
    /// `v = M^-1 L u << 0`.
    pub eigvec_v: DVector<f64>,
    /// Unstable eigenvector at `(x*, 0)`: `v' >> 0`.
    pub upper_eigvec_v: DVector<f64>,
    /// `w = M'^-1 K v' << 0`.
    pub upper_eigvec_w: DVector<f64>,
    pub lower_residual: f64,
    pub upper_residual: f64,
}

impl CoexistenceBracket {
    /// `lower <=_K s <=_K upper` within `slack`.
    pub fn contains(&self, s: &StateD, slack: f64) -> bool {
        ConeOrder::le(&self.lower, s, slack) && ConeOrder::le(s, &self.upper, slack)
    }
}

/// Settings for the bracket trajectories.
pub fn bracket_config() -> IntegratorConfig {
    IntegratorConfig { rtol: 1e-11, atol: 1e-14, t_max: 1e6, conv_tol: 1e-11, ..Default::default() }
}

/// Unstable direction of a single-virus equilibrium under invasion.
///
/// `resident` sits at `e`; the invader's linearization is `j_inv` with PF
/// pair `(λ, p)`. Returns `(p, q)` with `q = (λ I - J_res(e))^-1 (-diag(F_res(e)) p)`.
fn invasion_eigvec(j_inv: DMatrix<f64>, resident: &SingleVirus, e: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
    let pf = pf_eigen_default(&j_inv)?;
    let n = e.len();
    let m = DMatrix::identity(n, n) * pf.value - resident.jacobian(e)?;
    let mut f_e = DVector::zeros(n);
    resident.infection.eval_into(e.as_slice(), f_e.as_mut_slice());
    let rhs = -f_e.component_mul(&pf.vector);
    let q = m.lu().solve(&rhs).ok_or_else(|| {
        Error::Singular(format!(
            "lambda = {} is an eigenvalue of the resident Jacobian; tighten the classification tolerance",
            pf.value
        ))
    })?;
    Ok((pf.vector, q))
}

fn scaled_rows(m: DMatrix<f64>, scale: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m;
    for (i, s) in scale.iter().enumerate() {
        out.row_mut(i).scale_mut(*s);
    }
    out
}

/// Integrates from `s0` and checks that every accepted state moves in the
/// direction `sign` (`+1` increasing, `-1` decreasing) of the southeast order.
fn monotone_limit(sys: &BiVirusSystem, s0: &StateD, sign: f64) -> Result<(StateD, f64)> {
    let traj = sys.integrate_with(s0, &bracket_config())?;
    for (k, pair) in traj.states.windows(2).enumerate() {
        let (a, b) = if sign > 0.0 { (&pair[0], &pair[1]) } else { (&pair[1], &pair[0]) };
        if !ConeOrder::le(a, b, BRACKET_SLACK) {
            return Err(Error::NotMonotone {
                time: traj.times[k + 1],
                detail: format!("ordering gap {:e}", ConeOrder::gap(a, b)),
            });
        }
    }
    let end = traj.final_state().clone();
    let (dx, dy) = sys.field(&end)?;
    let residual = dx.amax().max(dy.amax());
    if residual >= ENDPOINT_RESIDUAL {
        return Err(Error::Integration(format!(
            "bracket trajectory stopped ({}) with field residual {residual:e}",
            traj.terminal_reason
        )));
    }
    Ok((end, residual))
}

fn clamp_into_d(x: DVector<f64>, y: DVector<f64>) -> StateD {
    let mut s = StateD { x: x.map(|v| v.max(0.0)), y: y.map(|v| v.max(0.0)) };
    for i in 0..s.n() {
        let total = s.x[i] + s.y[i];
        if total > 1.0 {
            s.x[i] /= total;
            s.y[i] /= total;
        }
    }
    s
}

/// Builds the coexistence bracket from the unstable eigenvectors at the two
/// single-virus equilibria.
pub fn bracket_coexistence(sys: &BiVirusSystem, r: f64, verdict: &TrichotomyVerdict) -> Result<CoexistenceBracket> {
    if verdict.outcome != Outcome::Coexistence {
        return Err(Error::Precondition(format!("bracket needs a Coexistence verdict, got {}", verdict.outcome)));
    }
    if !(r > 0.0 && r <= 1e-3) {
        return Err(Error::InvalidParameter(format!("radius must lie in (0, 1e-3], got {r}")));
    }
    let n = sys.n();
    let (xs, ys) = (&verdict.x_star, &verdict.y_star);
    let zero = vec![0.0; n];
    let ones = DVector::from_element(n, 1.0);

    let v1 = sys.virus1();
    let j_x = scaled_rows(v1.infection.jacobian_at(&zero), &(&ones - ys)) - v1.recovery.jacobian_at(&zero);
    let (u, v) = invasion_eigvec(j_x, sys.virus2(), ys)?;
    let v2 = sys.virus2();
    let j_y = scaled_rows(v2.infection.jacobian_at(&zero), &(&ones - xs)) - v2.recovery.jacobian_at(&zero);
    let (vp, w) = invasion_eigvec(j_y, sys.virus1(), xs)?;

    if u.iter().any(|&c| c <= 0.0) || v.iter().any(|&c| c >= 0.0) {
        return Err(Error::Precondition("eigenvector at (0, y*) is not strictly ordered".into()));
    }
    if vp.iter().any(|&c| c <= 0.0) || w.iter().any(|&c| c >= 0.0) {
        return Err(Error::Precondition("eigenvector at (x*, 0) is not strictly ordered".into()));
    }

    let lower_start = clamp_into_d(&u * r, ys + &v * r);
    let upper_start = clamp_into_d(xs + &w * r, &vp * r);
    let (lower, lower_residual) = monotone_limit(sys, &lower_start, 1.0)?;
    let (upper, upper_residual) = monotone_limit(sys, &upper_start, -1.0)?;

    let virus2_only = StateD { x: DVector::zeros(n), y: ys.clone() };
    let virus1_only = StateD { x: xs.clone(), y: DVector::zeros(n) };
    if !ConeOrder::ll(&virus2_only, &lower) {
        return Err(Error::Precondition("lower endpoint is not strictly above (0, y*)".into()));
    }
    if !ConeOrder::le(&lower, &upper, BRACKET_SLACK) {
        return Err(Error::Precondition(format!(
            "lower endpoint exceeds upper endpoint by {:e}",
            ConeOrder::gap(&lower, &upper)
        )));
    }
    if !ConeOrder::ll(&upper, &virus1_only) {
        return Err(Error::Precondition("upper endpoint is not strictly below (x*, 0)".into()));
    }
    Ok(CoexistenceBracket {
        lower,
        upper,
        eigvec_u: u,
        eigvec_v: v,
        upper_eigvec_v: vp,
        upper_eigvec_w: w,
        lower_residual,
        upper_residual,
    })
}
