use rand::Rng;
use rayon::prelude::*;

use crate::dynamics::{BiVirusSystem, IntegratorConfig, Record, StateD};
use crate::error::{Error, Result};
use crate::sampling::rng;

use super::ConeOrder;

/// Slack on the ordering test at each checkpoint.
pub const ORDER_SLACK: f64 = 1e-9;

/// Integrator settings for ordering checks: tighter than the defaults and
/// without early exit.
pub fn tight_config() -> IntegratorConfig {
    IntegratorConfig { rtol: 1e-12, atol: 1e-14, conv_tol: 0.0, record: Record::Endpoints, ..Default::default() }
}

#[derive(Debug, Clone)]
pub struct MonotoneViolation {
    pub pair: usize,
    pub time: f64,
    pub lower: StateD,
    pub upper: StateD,
    /// Largest violation of `lower <=_K upper` at `time`.
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub pairs: usize,
    pub checkpoints: Vec<f64>,
    pub violations: Vec<MonotoneViolation>,
    /// Largest ordering gap seen over all pairs and checkpoints.
    pub max_gap: f64,
}

impl MonotoneReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A random pair `s <=_K s'` in `D`: `s'` interior, `x = x' * U` and
/// `y = y' + U2 * (1 - x - y')` with `U, U2` uniform on `[0, 1]`.
pub fn random_ordered_pair<R: Rng + ?Sized>(r: &mut R, n: usize) -> (StateD, StateD) {
    let upper = StateD::random_interior(r, n);
    let mut lower = upper.clone();
    for i in 0..n {
        lower.x[i] = upper.x[i] * r.random::<f64>();
        lower.y[i] = upper.y[i] + r.random::<f64>() * (1.0 - lower.x[i] - upper.y[i]);
    }
    (lower, upper)
}

/// Checks `φ_t(s) <=_K φ_t(s')` at each `t` in `t_checks` for `pairs`
/// seeded random ordered pairs.
pub fn check_monotone_flow(sys: &BiVirusSystem, pairs: usize, t_checks: &[f64], seed: u64) -> Result<MonotoneReport> {
    let mut r = rng(seed);
    let sampled: Vec<_> = (0..pairs).map(|_| random_ordered_pair(&mut r, sys.n())).collect();
    check_monotone_pairs(sys, &sampled, t_checks)
}

/// [`check_monotone_flow`] for caller-supplied pairs `(s, s')` with `s <=_K s'`.
pub fn check_monotone_pairs(sys: &BiVirusSystem, pairs: &[(StateD, StateD)], t_checks: &[f64]) -> Result<MonotoneReport> {
    let mut checkpoints = t_checks.to_vec();
    if checkpoints.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidParameter("checkpoints must be positive".into()));
    }
    checkpoints.sort_by(f64::total_cmp);
    checkpoints.dedup();
    for (i, (lo, hi)) in pairs.iter().enumerate() {
        if !ConeOrder::le(lo, hi, ORDER_SLACK) {
            return Err(Error::Precondition(format!("pair {i} is not ordered")));
        }
    }

    let per_pair: Vec<Result<(Vec<MonotoneViolation>, f64)>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (lo, hi))| {
            let cfg = tight_config();
            let mut a = lo.clone();
            let mut b = hi.clone();
            let mut t_prev = 0.0;
            let mut found = Vec::new();
            let mut max_gap = ConeOrder::gap(&a, &b);
            for &t in &checkpoints {
                let seg = IntegratorConfig { t_max: t - t_prev, ..cfg.clone() };
                a = sys.integrate_with(&a, &seg)?.final_state().clone();
                b = sys.integrate_with(&b, &seg)?.final_state().clone();
                t_prev = t;
                let gap = ConeOrder::gap(&a, &b);
                max_gap = max_gap.max(gap);
                if gap > ORDER_SLACK {
                    found.push(MonotoneViolation { pair: i, time: t, lower: a.clone(), upper: b.clone(), gap });
                }
            }
            Ok((found, max_gap))
        })
        .collect();

    let mut report = MonotoneReport { pairs: pairs.len(), checkpoints, violations: Vec::new(), max_gap: f64::NEG_INFINITY };
    for item in per_pair {
        let (v, g) = item?;
        report.violations.extend(v);
        report.max_gap = report.max_gap.max(g);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::Graph;
    use crate::rates::RateSpec;

    fn case3() -> BiVirusSystem {
        BiVirusSystem::from_specs(
            Arc::new(Graph::cycle(5).unwrap()),
            Arc::new(Graph::wheel(5).unwrap()),
            &RateSpec::Case3 { alpha: 4.0, k: 2.0 },
            &RateSpec::Case3 { alpha: 3.0, k: 2.0 },
        )
        .unwrap()
    }

    #[test]
    fn sampled_pairs_are_ordered_and_in_d() {
        let mut r = rng(5);
        for _ in 0..200 {
            let (lo, hi) = random_ordered_pair(&mut r, 6);
            assert!(ConeOrder::le(&lo, &hi, 0.0));
            assert!(lo.is_in_d(1e-15) && hi.is_in_d(1e-15));
        }
    }

    #[test]
    fn identical_pair_stays_ordered() {
        let sys = case3();
        let mut r = rng(2);
        let s = StateD::random_interior(&mut r, 5);
        let report = check_monotone_pairs(&sys, &[(s.clone(), s)], &[1.0, 3.0]).unwrap();
        assert!(report.passed());
        assert!(report.max_gap <= 0.0);
    }

    #[test]
    fn few_random_pairs() {
        let report = check_monotone_flow(&case3(), 8, &[1.0, 5.0], 3).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn unordered_pair_rejected() {
        let sys = case3();
        let lo = StateD::from_slices(&[0.5; 5], &[0.1; 5]).unwrap();
        let hi = StateD::from_slices(&[0.1; 5], &[0.1; 5]).unwrap();
        assert!(check_monotone_pairs(&sys, &[(lo, hi)], &[1.0]).is_err());
    }
}
