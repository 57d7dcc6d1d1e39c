//! Threshold eigenvalues, outcome classification, numerical checks of
//! cooperativity, and bracketing of coexistence equilibria.

mod agreement;
mod bracket;
mod classify;
mod cone;
mod kamke;
mod monotone;

pub use agreement::{
    agreement_config, check_agreement, check_agreement_from, endpoint_agrees, interior_starts, AgreementReport,
    StartResult, BRACKET_MEMBERSHIP_SLACK, EXTINCT, PERSISTENT, SURVIVOR_TOL,
};
pub use bracket::{
    bracket_coexistence, bracket_config, CoexistenceBracket, BRACKET_SLACK, DEFAULT_RADIUS, ENDPOINT_RESIDUAL,
};
pub use classify::{
    classify, classify_unchecked, classify_with_fixed_points, outcome_from_eigenvalues, Outcome, TrichotomyVerdict,
    ASSUMPTION_SAMPLES, DEFAULT_EPS,
};
pub use cone::ConeOrder;
pub use kamke::{check_kamke, check_kamke_at, kamke_violations, KamkeReport, KamkeViolation, KAMKE_TOLERANCE};
pub use monotone::{
    check_monotone_flow, check_monotone_pairs, random_ordered_pair, tight_config, MonotoneReport, MonotoneViolation,
    ORDER_SLACK,
};
