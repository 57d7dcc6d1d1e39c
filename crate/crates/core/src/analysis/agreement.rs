use rand::Rng;
use rayon::prelude::*;

use crate::dynamics::{BiVirusSystem, IntegratorConfig, StateD, TerminalReason};
use crate::error::{Error, Result};
use crate::sampling::rng;

use super::{CoexistenceBracket, Outcome, TrichotomyVerdict};

/// Average infection below which a virus counts as extinct.
pub const EXTINCT: f64 = 1e-5;
/// Tolerance on the survivor's average against the fixed point.
pub const SURVIVOR_TOL: f64 = 1e-5;
/// Average infection above which a virus counts as persistent.
pub const PERSISTENT: f64 = 1e-3;
/// Slack on bracket membership.
pub const BRACKET_MEMBERSHIP_SLACK: f64 = 1e-6;

/// Long-horizon settings for agreement runs.
pub fn agreement_config() -> IntegratorConfig {
    IntegratorConfig { rtol: 1e-11, atol: 1e-14, t_max: 1e5, conv_tol: 1e-11, ..Default::default() }
}

#[derive(Debug, Clone)]
pub struct StartResult {
    pub start: StateD,
    pub endpoint: StateD,
    pub t_final: f64,
    pub reason: TerminalReason,
    pub agrees: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct AgreementReport {
    pub outcome: Outcome,
    pub starts: Vec<StartResult>,
}

impl AgreementReport {
    pub fn all_agree(&self) -> bool {
        self.starts.iter().all(|s| s.agrees)
    }

    pub fn agreeing(&self) -> usize {
        self.starts.iter().filter(|s| s.agrees).count()
    }
}

/// Whether an endpoint is consistent with a verdict.
///
/// `VirusFree`: both averages below [`EXTINCT`]. `Virus1Wins`: `avg y` below
/// [`EXTINCT`] and `avg x` within [`SURVIVOR_TOL`] of `avg x*` (symmetric for
/// `Virus2Wins`). `Coexistence`: both averages above [`PERSISTENT`] and, when a
/// bracket is given, the endpoint inside it.
pub fn endpoint_agrees(
    verdict: &TrichotomyVerdict,
    bracket: Option<&CoexistenceBracket>,
    end: &StateD,
) -> Result<(bool, String)> {
    let (ax, ay) = (end.avg_x(), end.avg_y());
    let detail = format!("avgX={ax:.3e} avgY={ay:.3e}");
    let ok = match verdict.outcome {
        Outcome::VirusFree => ax < EXTINCT && ay < EXTINCT,
        Outcome::Virus1Wins => ay < EXTINCT && (ax - verdict.avg_x_star()).abs() < SURVIVOR_TOL,
        Outcome::Virus2Wins => ax < EXTINCT && (ay - verdict.avg_y_star()).abs() < SURVIVOR_TOL,
        Outcome::Coexistence => {
            ax > PERSISTENT && ay > PERSISTENT && bracket.is_none_or(|b| b.contains(end, BRACKET_MEMBERSHIP_SLACK))
        }
        Outcome::Boundary => {
            return Err(Error::Precondition("no agreement contract for a Boundary verdict".into()));
        }
    };
    Ok((ok, detail))
}

/// Random interior starts in `B_x ∩ B_y`.
pub fn interior_starts<R: Rng + ?Sized>(r: &mut R, n: usize, count: usize) -> Vec<StateD> {
    (0..count).map(|_| StateD::random_interior(r, n)).collect()
}

/// Integrates from `starts` seeded interior points and tests each endpoint
/// with [`endpoint_agrees`].
pub fn check_agreement(
    sys: &BiVirusSystem,
    verdict: &TrichotomyVerdict,
    bracket: Option<&CoexistenceBracket>,
    starts: usize,
    seed: u64,
    cfg: &IntegratorConfig,
) -> Result<AgreementReport> {
    let points = interior_starts(&mut rng(seed), sys.n(), starts);
    check_agreement_from(sys, verdict, bracket, &points, cfg)
}

/// [`check_agreement`] from caller-supplied starts.
pub fn check_agreement_from(
    sys: &BiVirusSystem,
    verdict: &TrichotomyVerdict,
    bracket: Option<&CoexistenceBracket>,
    points: &[StateD],
    cfg: &IntegratorConfig,
) -> Result<AgreementReport> {
    if verdict.outcome == Outcome::Boundary {
        return Err(Error::Precondition("no agreement contract for a Boundary verdict".into()));
    }
    let starts = points
        .par_iter()
        .map(|s0| {
            let traj = sys.integrate_with(s0, cfg)?;
            let end = traj.final_state().clone();
            let (agrees, detail) = endpoint_agrees(verdict, bracket, &end)?;
            Ok(StartResult {
                start: s0.clone(),
                t_final: traj.final_time(),
                reason: traj.terminal_reason,
                endpoint: end,
                agrees,
                detail,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AgreementReport { outcome: verdict.outcome, starts })
}
