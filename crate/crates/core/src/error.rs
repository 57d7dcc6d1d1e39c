use thiserror::Error;

use crate::rates::AssumptionReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge list is empty")]
    EmptyGraph,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on node {label:?}")]
    SelfLoop { line: usize, label: String },

    #[error("graph is disconnected: node {reached:?} cannot reach node {unreached:?}")]
    Disconnected { reached: String, unreached: String },

    #[error("node index {index} out of range for a graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("matrix nonzero pattern is reducible")]
    Reducible,

    #[error("state component {index} = {value} lies outside the admissible domain")]
    OutOfDomain { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("recovery Jacobian is not diagonal (entry ({row}, {col}) = {value:e}); DFR margin is undefined")]
    NonLocalRecovery { row: usize, col: usize, value: f64 },

    #[error("rate models violate the standing assumptions: {}", .0.summary())]
    AssumptionsFailed(Box<AssumptionReport>),

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("trajectory is not monotone in the southeast order at t = {time}: {detail}")]
    NotMonotone { time: f64, detail: String },

    #[error("bracketing failed on [{lo}, {hi}]: {detail}")]
    Bracket { lo: f64, hi: f64, detail: String },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
