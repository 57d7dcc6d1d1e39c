use std::path::PathBuf;

use bivirus_core::analysis::{DEFAULT_EPS, DEFAULT_RADIUS};
use bivirus_core::RateSpec;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bivirus", version, about = "Single- and bi-virus SIS epidemics on overlaid graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral radius and degree range of each graph.
    Spectra(SpectraArgs),
    /// Sample the rate assumptions and the DFR condition.
    CheckAssumptions(ModelArgs),
    /// Classify the long-run outcome from the threshold eigenvalues.
    Classify(ClassifyArgs),
    /// Integrate trajectories and write them as CSV.
    Simulate(SimulateArgs),
    /// Label a grid of (tau1, tau2) for linear rates and trace the threshold curves.
    Sweep(SweepArgs),
    /// Bracket the coexistence equilibria.
    Bracket(BracketArgs),
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    #[arg(long, value_parser = existing_file)]
    pub graph_a: PathBuf,
    #[arg(long, value_parser = existing_file)]
    pub graph_b: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphPair {
    #[arg(long, value_parser = existing_file)]
    pub graph_a: PathBuf,
    /// Defaults to the first graph.
    #[arg(long, value_parser = existing_file)]
    pub graph_b: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub graphs: GraphPair,
    /// e.g. `linear:beta=0.4,delta=1`, `case2:alpha=2,delta=1`, `case3:alpha=2,k=2`.
    #[arg(long, value_parser = rate_spec)]
    pub rates1: RateSpec,
    #[arg(long, value_parser = rate_spec)]
    pub rates2: RateSpec,
    /// Sample points for the assumption checks.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub graphs: GraphPair,
    #[arg(long, value_parser = rate_spec)]
    pub rates1: RateSpec,
    #[arg(long, value_parser = rate_spec)]
    pub rates2: RateSpec,
    #[arg(long, default_value_t = DEFAULT_EPS, value_parser = nonnegative)]
    pub eps: f64,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub graphs: GraphPair,
    #[arg(long, value_parser = rate_spec)]
    pub rates1: RateSpec,
    #[arg(long, value_parser = rate_spec)]
    pub rates2: RateSpec,
    #[arg(long, default_value_t = 1e4, value_parser = positive)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    pub conv_tol: f64,
    /// Number of seeded random interior starts.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub starts: u64,
    /// Start from the all-zero state instead of random interior points.
    #[arg(long, conflicts_with = "starts")]
    pub zero: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub graphs: GraphPair,
    /// `lo,hi`; defaults to `[0.5, 4] / lambda(A)`.
    #[arg(long, value_parser = range)]
    pub tau1_range: Option<(f64, f64)>,
    /// `lo,hi`; defaults to `[0.5, 4] / lambda(B)`.
    #[arg(long, value_parser = range)]
    pub tau2_range: Option<(f64, f64)>,
    /// `N` or `N1xN2` points per axis.
    #[arg(long, default_value = "21", value_parser = grid)]
    pub grid: (usize, usize),
    #[arg(long, default_value_t = DEFAULT_EPS, value_parser = nonnegative)]
    pub eps: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BracketArgs {
    #[command(flatten)]
    pub graphs: GraphPair,
    #[arg(long, value_parser = rate_spec)]
    pub rates1: RateSpec,
    #[arg(long, value_parser = rate_spec)]
    pub rates2: RateSpec,
    /// Perturbation radius along the unstable eigenvectors, in (0, 1e-3].
    #[arg(long, default_value_t = DEFAULT_RADIUS, value_parser = radius)]
    pub radius: f64,
    #[arg(long, default_value_t = DEFAULT_EPS, value_parser = nonnegative)]
    pub eps: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn existing_file(s: &str) -> Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.is_file() {
        Ok(p)
    } else {
        Err(format!("no such file: {s}"))
    }
}

fn rate_spec(s: &str) -> Result<RateSpec, String> {
    s.parse().map_err(|e: bivirus_core::Error| e.to_string())
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be >= 0, got {v}"))
    }
}

fn radius(s: &str) -> Result<f64, String> {
    let v = positive(s)?;
    if v <= 1e-3 {
        Ok(v)
    } else {
        Err(format!("must lie in (0, 1e-3], got {v}"))
    }
}

pub fn range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
    let (lo, hi) = (positive(lo)?, positive(hi)?);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(format!("expected lo < hi, got {s:?}"))
    }
}

pub fn grid(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| -> Result<usize, String> {
        let v: usize = t.trim().parse().map_err(|_| format!("not a grid size: {t:?}"))?;
        if v >= 2 {
            Ok(v)
        } else {
            Err(format!("grid needs at least 2 points per axis, got {v}"))
        }
    };
    match s.split_once(['x', 'X', ',']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => parse(s).map(|v| (v, v)),
    }
}
