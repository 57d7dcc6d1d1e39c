//! Single- and bi-virus vector fields, their Jacobians, and integration
//! inside the invariant state space.
//!
//! The bi-virus system on overlaid graphs is
//!
//! ```text
//! dx/dt = diag(1 - x - y) G(x) - R(x)
//! dy/dt = diag(1 - x - y) H(y) - S(y)
//! ```
//!
//! on `D = {(x, y) in [0,1]^2n : x + y <= 1}`. Setting `y = 0` (or `x = 0`)
//! gives the single-virus system `dx/dt = diag(1 - x) F(x) - Q(x)`.

mod fixed_point;
mod integrator;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rates::{check_assumptions, AssumptionReport, RateFunction, RateSpec, Role};

pub use fixed_point::{single_virus_fixed_point, SingleVirusEquilibrium, FIXED_POINT_TOL, ZERO_THRESHOLD_SLACK};
pub use integrator::{integrate_flow, Flow, IntegratorConfig, OdeSolution, Record, TerminalReason};

/// Slack allowed on the constraints of `D` when validating states.
pub const STATE_SLACK: f64 = 1e-9;

/// A point `(x, y)` of the bi-virus state space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateD {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

impl StateD {
    /// Validated constructor: `x, y >= 0` and `x + y <= 1` within [`STATE_SLACK`].
    pub fn new(x: DVector<f64>, y: DVector<f64>) -> Result<Self> {
        let s = Self::new_unchecked(x, y)?;
        s.validate(STATE_SLACK)?;
        Ok(s)
    }

    fn new_unchecked(x: DVector<f64>, y: DVector<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        Ok(Self { x, y })
    }

    pub fn zeros(n: usize) -> Self {
        Self { x: DVector::zeros(n), y: DVector::zeros(n) }
    }

    pub fn from_slices(x: &[f64], y: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(x), DVector::from_column_slice(y))
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn validate(&self, slack: f64) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            let (x, y) = (self.x[i], self.y[i]);
            if !(x >= -slack) || !x.is_finite() {
                return Err(Error::OutOfDomain { index: i, value: x });
            }
            if !(y >= -slack) || !y.is_finite() {
                return Err(Error::OutOfDomain { index: n + i, value: y });
            }
            if x + y > 1.0 + slack {
                return Err(Error::OutOfDomain { index: i, value: x + y });
            }
        }
        Ok(())
    }

    pub fn is_in_d(&self, slack: f64) -> bool {
        self.validate(slack).is_ok()
    }

    /// Concatenation `[x; y]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.x.iter().chain(self.y.iter()).copied().collect()
    }

    pub fn from_concat(s: &[f64]) -> Self {
        let n = s.len() / 2;
        Self { x: DVector::from_column_slice(&s[..n]), y: DVector::from_column_slice(&s[n..]) }
    }

    pub fn avg_x(&self) -> f64 {
        self.x.mean()
    }

    pub fn avg_y(&self) -> f64 {
        self.y.mean()
    }

    pub fn max_abs_diff(&self, other: &StateD) -> f64 {
        (&self.x - &other.x).amax().max((&self.y - &other.y).amax())
    }

    /// A random point with every coordinate of `x` and `y` positive and
    /// `x_i + y_i <= 0.99`, hence interior to `D` and in `B_x ∩ B_y`.
    pub fn random_interior<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let mut x = DVector::zeros(n);
        let mut y = DVector::zeros(n);
        for i in 0..n {
            let a = 0.01 + 0.98 * rng.random::<f64>();
            let b = 0.01 + 0.98 * rng.random::<f64>();
            let scale = if a + b > 0.99 { 0.99 / (a + b) } else { 1.0 };
            x[i] = a * scale;
            y[i] = b * scale;
        }
        Self { x, y }
    }
}

/// Single-virus system `dx/dt = diag(1 - x) F(x) - Q(x)` on `[0,1]^n`.
#[derive(Debug, Clone)]
pub struct SingleVirus {
    pub infection: Arc<dyn RateFunction>,
    pub recovery: Arc<dyn RateFunction>,
}

impl SingleVirus {
    pub fn new(infection: Arc<dyn RateFunction>, recovery: Arc<dyn RateFunction>) -> Result<Self> {
        check_pair(infection.as_ref(), recovery.as_ref())?;
        Ok(Self { infection, recovery })
    }

    pub(crate) fn pair(&self) -> Pair<'_> {
        Pair { f: self.infection.as_ref(), q: self.recovery.as_ref() }
    }

    pub fn dim(&self) -> usize {
        self.infection.dim()
    }

    pub fn field(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        crate::rates::check_unit_box(x.as_slice(), self.dim())?;
        let mut out = DVector::zeros(self.dim());
        self.pair().field(x.as_slice(), out.as_mut_slice());
        Ok(out)
    }

    /// `diag(1 - x) J_F(x) - diag(F(x)) - J_Q(x)`.
    pub fn jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        crate::rates::check_unit_box(x.as_slice(), self.dim())?;
        Ok(self.pair().jacobian(x.as_slice()))
    }

    /// `J_F(0) - J_Q(0)`, whose PF eigenvalue decides survival.
    pub fn linearization_at_zero(&self) -> DMatrix<f64> {
        self.pair().linearization_at_zero()
    }

    /// The unique globally attracting fixed point; see [`single_virus_fixed_point`].
    pub fn fixed_point(&self, tol: f64) -> Result<SingleVirusEquilibrium> {
        single_virus_fixed_point(self.infection.as_ref(), self.recovery.as_ref(), tol)
    }
}

impl Flow for SingleVirus {
    fn dim(&self) -> usize {
        self.infection.dim()
    }

    fn field(&self, x: &[f64], out: &mut [f64]) {
        self.pair().field(x, out)
    }

    fn excess(&self, x: &[f64]) -> f64 {
        self.pair().excess(x)
    }

    fn project(&self, x: &mut [f64]) {
        self.pair().project(x)
    }
}

/// Borrowed (infection, recovery) pair driving the single-virus field.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Pair<'a> {
    pub f: &'a dyn RateFunction,
    pub q: &'a dyn RateFunction,
}

impl Pair<'_> {
    pub(crate) fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let mut fx = vec![0.0; n];
        self.f.eval_into(x, &mut fx);
        let mut j = self.f.jacobian_at(x);
        for i in 0..n {
            j.row_mut(i).scale_mut(1.0 - x[i]);
            j[(i, i)] -= fx[i];
        }
        j - self.q.jacobian_at(x)
    }

    pub(crate) fn linearization_at_zero(&self) -> DMatrix<f64> {
        let zero = vec![0.0; self.f.dim()];
        self.f.jacobian_at(&zero) - self.q.jacobian_at(&zero)
    }
}

impl Flow for Pair<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn field(&self, x: &[f64], out: &mut [f64]) {
        let mut q = vec![0.0; x.len()];
        self.f.eval_into(x, out);
        self.q.eval_into(x, &mut q);
        for i in 0..x.len() {
            out[i] = (1.0 - x[i]) * out[i] - q[i];
        }
    }

    fn excess(&self, x: &[f64]) -> f64 {
        x.iter().fold(0.0, |m, &v| m.max(-v).max(v - 1.0))
    }

    fn project(&self, x: &mut [f64]) {
        for v in x {
            *v = v.clamp(0.0, 1.0);
        }
    }
}

fn check_pair(infection: &dyn RateFunction, recovery: &dyn RateFunction) -> Result<()> {
    if infection.role() != Role::Infection || recovery.role() != Role::Recovery {
        return Err(Error::Precondition("expected an (infection, recovery) pair".into()));
    }
    if infection.dim() != recovery.dim() {
        return Err(Error::DimensionMismatch { expected: infection.dim(), got: recovery.dim() });
    }
    if infection.graph().is_none() {
        return Err(Error::Precondition("infection rate has no graph".into()));
    }
    Ok(())
}

/// Two viruses with rate pairs `(G, R)` on graph A and `(H, S)` on graph B.
#[derive(Debug, Clone)]
pub struct BiVirusSystem {
    virus1: SingleVirus,
    virus2: SingleVirus,
}

impl BiVirusSystem {
    pub fn new(
        infection1: Arc<dyn RateFunction>,
        recovery1: Arc<dyn RateFunction>,
        infection2: Arc<dyn RateFunction>,
        recovery2: Arc<dyn RateFunction>,
    ) -> Result<Self> {
        let virus1 = SingleVirus::new(infection1, recovery1)?;
        let virus2 = SingleVirus::new(infection2, recovery2)?;
        if virus1.dim() != virus2.dim() {
            return Err(Error::DimensionMismatch { expected: virus1.dim(), got: virus2.dim() });
        }
        Ok(Self { virus1, virus2 })
    }

    pub fn from_specs(graph_a: Arc<Graph>, graph_b: Arc<Graph>, rates1: &RateSpec, rates2: &RateSpec) -> Result<Self> {
        let (g, r) = rates1.build(graph_a)?;
        let (h, s) = rates2.build(graph_b)?;
        Self::new(Arc::new(g), Arc::new(r), Arc::new(h), Arc::new(s))
    }

    pub fn n(&self) -> usize {
        self.virus1.dim()
    }

    pub fn graph_a(&self) -> &Graph {
        self.virus1.infection.graph().expect("checked at construction")
    }

    pub fn graph_b(&self) -> &Graph {
        self.virus2.infection.graph().expect("checked at construction")
    }

    /// The `(G, R)` system obtained with `y = 0`.
    pub fn virus1(&self) -> &SingleVirus {
        &self.virus1
    }

    /// The `(H, S)` system obtained with `x = 0`.
    pub fn virus2(&self) -> &SingleVirus {
        &self.virus2
    }

    /// Samples the standing assumptions for both rate pairs.
    pub fn check_assumptions(&self, samples: usize, seed: u64) -> Result<(AssumptionReport, AssumptionReport)> {
        let r1 = check_assumptions(self.virus1.infection.as_ref(), self.virus1.recovery.as_ref(), samples, seed)?;
        let r2 = check_assumptions(self.virus2.infection.as_ref(), self.virus2.recovery.as_ref(), samples, seed)?;
        Ok((r1, r2))
    }

    fn check_state(&self, s: &StateD) -> Result<()> {
        if s.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: s.n() });
        }
        s.validate(STATE_SLACK)
    }

    pub fn field(&self, s: &StateD) -> Result<(DVector<f64>, DVector<f64>)> {
        self.check_state(s)?;
        let mut out = vec![0.0; 2 * self.n()];
        Flow::field(self, &s.to_vec(), &mut out);
        let n = self.n();
        Ok((DVector::from_column_slice(&out[..n]), DVector::from_column_slice(&out[n..])))
    }

    /// Jacobian of the bi-virus field:
    ///
    /// ```text
    /// [ S J_G(x) - D_G(x) - J_R(x)    -D_G(x)                    ]
    /// [ -D_H(y)                       S J_H(y) - D_H(y) - J_S(y) ]
    /// ```
    /// with `S = diag(1 - x - y)`, `D_G(x) = diag(G(x))`.
    pub fn jacobian(&self, s: &StateD) -> Result<DMatrix<f64>> {
        self.check_state(s)?;
        Ok(self.jacobian_at(s.x.as_slice(), s.y.as_slice()))
    }

    pub(crate) fn jacobian_at(&self, x: &[f64], y: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let mut gx = vec![0.0; n];
        let mut hy = vec![0.0; n];
        self.virus1.infection.eval_into(x, &mut gx);
        self.virus2.infection.eval_into(y, &mut hy);
        let jg = self.virus1.infection.jacobian_at(x);
        let jr = self.virus1.recovery.jacobian_at(x);
        let jh = self.virus2.infection.jacobian_at(y);
        let js = self.virus2.recovery.jacobian_at(y);
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            let free = 1.0 - x[i] - y[i];
            for c in 0..n {
                j[(i, c)] = free * jg[(i, c)] - jr[(i, c)];
                j[(n + i, n + c)] = free * jh[(i, c)] - js[(i, c)];
            }
            j[(i, i)] -= gx[i];
            j[(n + i, n + i)] -= hy[i];
            j[(i, n + i)] = -gx[i];
            j[(n + i, i)] = -hy[i];
        }
        j
    }

    /// Integrates from `s0` with default tolerances, stopping at `t_max` or
    /// once the field max-norm drops below `conv_tol`.
    pub fn integrate(&self, s0: &StateD, t_max: f64, conv_tol: f64) -> Result<Trajectory> {
        let cfg = IntegratorConfig { t_max, conv_tol, ..Default::default() };
        self.integrate_with(s0, &cfg)
    }

    pub fn integrate_with(&self, s0: &StateD, cfg: &IntegratorConfig) -> Result<Trajectory> {
        self.check_state(s0)?;
        if !(cfg.t_max > 0.0) {
            return Err(Error::InvalidParameter(format!("t_max must be positive, got {}", cfg.t_max)));
        }
        if !(cfg.conv_tol > 0.0) && cfg.conv_tol != 0.0 {
            return Err(Error::InvalidParameter(format!("conv_tol must be >= 0, got {}", cfg.conv_tol)));
        }
        let sol = integrate_flow(self, &s0.to_vec(), cfg)?;
        Ok(Trajectory {
            times: sol.times,
            states: sol.states.iter().map(|s| StateD::from_concat(s)).collect(),
            terminal_reason: sol.reason,
        })
    }
}

/// Free-function form of [`BiVirusSystem::field`].
pub fn bivirus_field(sys: &BiVirusSystem, s: &StateD) -> Result<(DVector<f64>, DVector<f64>)> {
    sys.field(s)
}

/// Free-function form of [`BiVirusSystem::jacobian`].
pub fn bivirus_jacobian(sys: &BiVirusSystem, s: &StateD) -> Result<DMatrix<f64>> {
    sys.jacobian(s)
}

/// Free-function form of [`BiVirusSystem::integrate`].
pub fn integrate(sys: &BiVirusSystem, s0: &StateD, t_max: f64, conv_tol: f64) -> Result<Trajectory> {
    sys.integrate(s0, t_max, conv_tol)
}

impl Flow for BiVirusSystem {
    fn dim(&self) -> usize {
        2 * self.n()
    }

    fn field(&self, s: &[f64], out: &mut [f64]) {
        let n = self.n();
        let (x, y) = s.split_at(n);
        let (dx, dy) = out.split_at_mut(n);
        let mut rx = vec![0.0; n];
        let mut sy = vec![0.0; n];
        self.virus1.infection.eval_into(x, dx);
        self.virus1.recovery.eval_into(x, &mut rx);
        self.virus2.infection.eval_into(y, dy);
        self.virus2.recovery.eval_into(y, &mut sy);
        for i in 0..n {
            let free = 1.0 - x[i] - y[i];
            dx[i] = free * dx[i] - rx[i];
            dy[i] = free * dy[i] - sy[i];
        }
    }

    fn excess(&self, s: &[f64]) -> f64 {
        let n = self.n();
        let (x, y) = s.split_at(n);
        x.iter()
            .zip(y)
            .fold(0.0, |m, (&a, &b)| m.max(-a).max(-b).max(a + b - 1.0))
    }

    fn project(&self, s: &mut [f64]) {
        let n = self.n();
        let (x, y) = s.split_at_mut(n);
        for (a, b) in x.iter_mut().zip(y.iter_mut()) {
            *a = a.max(0.0);
            *b = b.max(0.0);
            let total = *a + *b;
            if total > 1.0 {
                *a /= total;
                *b /= total;
            }
        }
    }
}

/// Accepted states of an integration run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateD>,
    pub terminal_reason: TerminalReason,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateD {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds at least the initial time")
    }
}
