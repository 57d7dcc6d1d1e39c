//! Adaptive Runge-Kutta-Fehlberg 4(5) restricted to a closed state domain.

use std::fmt;

use crate::error::{Error, Result};

/// An autonomous vector field on a closed domain of `R^dim`.
pub trait Flow {
    fn dim(&self) -> usize;

    fn field(&self, s: &[f64], out: &mut [f64]);

    /// Largest violation of the domain constraints at `s` (0 inside).
    fn excess(&self, s: &[f64]) -> f64;

    /// Moves `s` onto the domain.
    fn project(&self, s: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerminalReason {
    /// Max-norm of the field dropped below the convergence tolerance.
    Converged { residual: f64 },
    MaxTimeReached,
    StepFailure,
}

impl TerminalReason {
    pub fn label(&self) -> &'static str {
        match self {
            TerminalReason::Converged { .. } => "converged",
            TerminalReason::MaxTimeReached => "max_time",
            TerminalReason::StepFailure => "step_failure",
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, TerminalReason::Converged { .. })
    }
}

impl fmt::Display for TerminalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Record {
    /// Every accepted step.
    Steps,
    /// Initial and final states only.
    Endpoints,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub t_max: f64,
    /// Stop once `max |field| < conv_tol`; `0.0` disables the test.
    pub conv_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    /// A step leaving the domain by more than this is retried at half size.
    pub domain_tol: f64,
    pub max_steps: usize,
    pub record: Record,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            t_max: 1e4,
            conv_tol: 1e-10,
            h_init: 1e-3,
            h_min: 1e-14,
            domain_tol: 1e-12,
            max_steps: 20_000_000,
            record: Record::Steps,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [("rtol", self.rtol), ("atol", self.atol), ("t_max", self.t_max), ("h_init", self.h_init)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.conv_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("conv_tol must be >= 0, got {}", self.conv_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub reason: TerminalReason,
    pub steps: usize,
    pub rejected: usize,
}

impl OdeSolution {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("solution holds at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("solution holds at least the initial time")
    }
}

// Fehlberg tableau; the field is autonomous so the nodes are not needed.
const A21: f64 = 1.0 / 4.0;
const A31: f64 = 3.0 / 32.0;
const A32: f64 = 9.0 / 32.0;
const A41: f64 = 1932.0 / 2197.0;
const A42: f64 = -7200.0 / 2197.0;
const A43: f64 = 7296.0 / 2197.0;
const A51: f64 = 439.0 / 216.0;
const A52: f64 = -8.0;
const A53: f64 = 3680.0 / 513.0;
const A54: f64 = -845.0 / 4104.0;
const A61: f64 = -8.0 / 27.0;
const A62: f64 = 2.0;
const A63: f64 = -3544.0 / 2565.0;
const A64: f64 = 1859.0 / 4104.0;
const A65: f64 = -11.0 / 40.0;
// fifth-order weights (propagated)
const B1: f64 = 16.0 / 135.0;
const B3: f64 = 6656.0 / 12825.0;
const B4: f64 = 28561.0 / 56430.0;
const B5: f64 = -9.0 / 50.0;
const B6: f64 = 2.0 / 55.0;
// fifth minus fourth order weights
const E1: f64 = 1.0 / 360.0;
const E3: f64 = -128.0 / 4275.0;
const E4: f64 = -2197.0 / 75240.0;
const E5: f64 = 1.0 / 50.0;
const E6: f64 = 2.0 / 55.0;

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

struct Stages {
    k: [Vec<f64>; 6],
    tmp: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n] }
    }

    /// Fills `k[1..6]` given `k[0] = f(y)`; writes the 5th-order state into
    /// `y_new` and returns the scaled error norm.
    fn step<F: Flow + ?Sized>(&mut self, flow: &F, y: &[f64], h: f64, y_new: &mut [f64], cfg: &IntegratorConfig) -> f64 {
        let n = y.len();
        let Stages { k, tmp } = self;
        let rows: [&[f64]; 5] = [&[A21], &[A31, A32], &[A41, A42, A43], &[A51, A52, A53, A54], &[A61, A62, A63, A64, A65]];
        for (stage, coeffs) in rows.iter().enumerate() {
            for i in 0..n {
                let mut acc = 0.0;
                for (c, kk) in coeffs.iter().zip(k.iter()) {
                    acc += c * kk[i];
                }
                tmp[i] = y[i] + h * acc;
            }
            let (_, rest) = k.split_at_mut(stage + 1);
            flow.field(tmp, &mut rest[0]);
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            let incr = B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i];
            y_new[i] = y[i] + h * incr;
            let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]);
            let scale = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max(e.abs() / scale);
        }
        err
    }
}

/// Integrates `flow` from `s0` at time 0.
///
/// Steps with scaled error above one are retried with a smaller step; steps
/// that leave the domain by more than `domain_tol` are retried at half size.
/// Accepted states are projected onto the domain.
pub fn integrate_flow<F: Flow + ?Sized>(flow: &F, s0: &[f64], cfg: &IntegratorConfig) -> Result<OdeSolution> {
    cfg.validate()?;
    let n = flow.dim();
    if s0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: s0.len() });
    }
    let mut y = s0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut stages = Stages::new(n);
    flow.field(&y, &mut stages.k[0]);

    let mut sol = OdeSolution {
        times: vec![0.0],
        states: vec![y.clone()],
        reason: TerminalReason::MaxTimeReached,
        steps: 0,
        rejected: 0,
    };
    let residual = max_norm(&stages.k[0]);
    if residual < cfg.conv_tol {
        sol.reason = TerminalReason::Converged { residual };
        return Ok(sol);
    }

    let mut t = 0.0;
    let mut h = cfg.h_init.min(cfg.t_max);
    loop {
        if sol.steps >= cfg.max_steps {
            sol.reason = TerminalReason::StepFailure;
            break;
        }
        let remaining = cfg.t_max - t;
        let last = h >= remaining;
        let h_try = if last { remaining } else { h };
        let err = stages.step(flow, &y, h_try, &mut y_new, cfg);
        if !err.is_finite() || err > 1.0 || flow.excess(&y_new) > cfg.domain_tol {
            sol.rejected += 1;
            h = if err.is_finite() && err > 1.0 && flow.excess(&y_new) <= cfg.domain_tol {
                h_try * (SAFETY * err.powf(-0.2)).max(MIN_SCALE)
            } else {
                h_try * 0.5
            };
            if h < cfg.h_min {
                sol.reason = TerminalReason::StepFailure;
                break;
            }
            continue;
        }

        flow.project(&mut y_new);
        t = if last { cfg.t_max } else { t + h_try };
        std::mem::swap(&mut y, &mut y_new);
        sol.steps += 1;
        flow.field(&y, &mut stages.k[0]);
        let residual = max_norm(&stages.k[0]);
        let converged = residual < cfg.conv_tol;
        if cfg.record == Record::Steps || converged || last {
            sol.times.push(t);
            sol.states.push(y.clone());
        }
        if converged {
            sol.reason = TerminalReason::Converged { residual };
            break;
        }
        if last {
            sol.reason = TerminalReason::MaxTimeReached;
            break;
        }
        let scale = if err == 0.0 { MAX_SCALE } else { (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE) };
        h = h_try * scale;
    }
    if sol.reason == TerminalReason::StepFailure && sol.times.last() != Some(&t) {
        sol.times.push(t);
        sol.states.push(y);
    }
    Ok(sol)
}
