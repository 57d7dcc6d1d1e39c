use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::RateModel;

/// Textual selection of an (infection, recovery) pair.
///
/// ```text
/// linear:beta=0.4,delta=1     beta * A x,              delta * x
/// case2:alpha=2,delta=1       sum a_ij ln(1+alpha x_j), delta * x
/// case3:alpha=2,k=2           sum a_ij ln(1+alpha x_j), (1+x)^k - 1
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateSpec {
    Linear { beta: f64, delta: f64 },
    Case2 { alpha: f64, delta: f64 },
    Case3 { alpha: f64, k: f64 },
}

impl RateSpec {
    pub fn build(&self, graph: Arc<Graph>) -> Result<(RateModel, RateModel)> {
        let n = graph.node_count();
        Ok(match *self {
            RateSpec::Linear { beta, delta } => (
                RateModel::linear_infection(graph, beta)?,
                RateModel::linear_recovery(n, delta)?,
            ),
            RateSpec::Case2 { alpha, delta } => (
                RateModel::log_infection(graph, alpha)?,
                RateModel::linear_recovery(n, delta)?,
            ),
            RateSpec::Case3 { alpha, k } => (
                RateModel::log_infection(graph, alpha)?,
                RateModel::poly_recovery(n, k)?,
            ),
        })
    }

    /// Effective strength `beta / delta` for linear rates.
    pub fn tau(&self) -> Option<f64> {
        match *self {
            RateSpec::Linear { beta, delta } => Some(beta / delta),
            _ => None,
        }
    }
}

impl FromStr for RateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(format!("rate spec {s:?}: {msg}"));
        let (case, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {item:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("{key} is not a number: {value:?}")))?;
            if params.insert(key.trim(), value).is_some() {
                return Err(bad(format!("{key} given twice")));
            }
        }
        let mut take = |key: &str, default: Option<f64>| {
            params.remove(key).or(default).ok_or_else(|| bad(format!("missing {key}")))
        };
        let spec = match case.trim().to_ascii_lowercase().as_str() {
            "linear" | "case1" => RateSpec::Linear { beta: take("beta", None)?, delta: take("delta", Some(1.0))? },
            "case2" => RateSpec::Case2 { alpha: take("alpha", None)?, delta: take("delta", Some(1.0))? },
            "case3" => RateSpec::Case3 { alpha: take("alpha", None)?, k: take("k", Some(2.0))? },
            other => return Err(bad(format!("unknown model {other:?}"))),
        };
        if let Some(key) = params.keys().next() {
            return Err(bad(format!("unexpected parameter {key}")));
        }
        Ok(spec)
    }
}

impl fmt::Display for RateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateSpec::Linear { beta, delta } => write!(f, "linear:beta={beta},delta={delta}"),
            RateSpec::Case2 { alpha, delta } => write!(f, "case2:alpha={alpha},delta={delta}"),
            RateSpec::Case3 { alpha, k } => write!(f, "case3:alpha={alpha},k={k}"),
        }
    }
}
