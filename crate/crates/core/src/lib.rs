//! Single- and bi-virus SIS epidemics with non-linear rates on overlaid graphs.
//!
//! [`graph`] loads graphs and computes Perron-Frobenius pairs, [`rates`]
//! defines infection and recovery rates, [`dynamics`] integrates the vector
//! fields, [`analysis`] classifies the long-run outcome from threshold
//! eigenvalues, and [`sweep`] maps the `(τ1, τ2)` plane for linear rates.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod io;
pub mod rates;
pub mod sampling;
pub mod sweep;

pub use analysis::{
    bracket_coexistence, classify, check_kamke, check_monotone_flow, CoexistenceBracket, ConeOrder, Outcome,
    TrichotomyVerdict,
};
pub use dynamics::{
    bivirus_field, bivirus_jacobian, integrate, single_virus_fixed_point, BiVirusSystem, IntegratorConfig,
    SingleVirus, SingleVirusEquilibrium, StateD, TerminalReason, Trajectory,
};
pub use error::{Error, Result};
pub use graph::{load_edge_list, pf_eigen, Graph, SpectralResult};
pub use rates::{check_assumptions, check_dfr, AssumptionReport, DfrReport, RateFunction, RateModel, RateSpec};
pub use sweep::{sweep_linear, threshold_curves, CurvePoint, Region, RegionGrid};
