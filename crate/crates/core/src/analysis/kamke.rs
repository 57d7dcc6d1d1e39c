use crate::dynamics::{BiVirusSystem, StateD};
use crate::error::Result;
use crate::graph::is_irreducible;
use crate::sampling::rng;

/// Slack on the Jacobian sign tests.
pub const KAMKE_TOLERANCE: f64 = 1e-9;

const MAX_WITNESSES: usize = 16;

/// A Jacobian entry with the wrong sign for cooperativity in the southeast order.
#[derive(Debug, Clone)]
pub struct KamkeViolation {
    pub point: StateD,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct KamkeReport {
    pub samples: usize,
    /// Total number of offending entries over all samples.
    pub sign_violations: usize,
    /// The first few offending entries.
    pub witnesses: Vec<KamkeViolation>,
    /// Sample points whose Jacobian pattern is reducible.
    pub reducible_points: Vec<StateD>,
}

impl KamkeReport {
    pub fn passed(&self) -> bool {
        self.sign_violations == 0 && self.reducible_points.is_empty()
    }
}

/// Sign violations at one point: off-diagonal entries of the diagonal blocks
/// must be `>= -tol`, entries of the off-diagonal blocks `<= tol`.
pub fn kamke_violations(sys: &BiVirusSystem, s: &StateD, tol: f64) -> Result<Vec<KamkeViolation>> {
    let j = sys.jacobian(s)?;
    let n = sys.n();
    let mut out = Vec::new();
    for r in 0..2 * n {
        for c in 0..2 * n {
            if r == c {
                continue;
            }
            let v = j[(r, c)];
            let same_block = (r < n) == (c < n);
            let bad = if same_block { v < -tol } else { v > tol };
            if bad {
                out.push(KamkeViolation { point: s.clone(), row: r, col: c, value: v });
            }
        }
    }
    Ok(out)
}

/// Samples `samples` interior points of `D` and checks the Jacobian sign
/// pattern and its irreducibility.
pub fn check_kamke(sys: &BiVirusSystem, samples: usize, seed: u64) -> Result<KamkeReport> {
    let mut r = rng(seed);
    let points: Vec<StateD> = (0..samples).map(|_| StateD::random_interior(&mut r, sys.n())).collect();
    check_kamke_at(sys, &points)
}

/// [`check_kamke`] at caller-supplied points. Irreducibility is only required
/// at interior points.
pub fn check_kamke_at(sys: &BiVirusSystem, points: &[StateD]) -> Result<KamkeReport> {
    let mut report = KamkeReport { samples: points.len(), sign_violations: 0, witnesses: Vec::new(), reducible_points: Vec::new() };
    for s in points {
        let v = kamke_violations(sys, s, KAMKE_TOLERANCE)?;
        report.sign_violations += v.len();
        let room = MAX_WITNESSES.saturating_sub(report.witnesses.len());
        report.witnesses.extend(v.into_iter().take(room));
        let interior = (0..s.n()).all(|i| s.x[i] > 0.0 && s.y[i] > 0.0 && s.x[i] + s.y[i] < 1.0);
        if interior && !is_irreducible(&sys.jacobian(s)?) {
            report.reducible_points.push(s.clone());
        }
    }
    Ok(report)
}
