use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use bivirus_core::analysis::{bracket_coexistence, classify, interior_starts, TrichotomyVerdict};
use bivirus_core::io::{
    num, write_bracket, write_curves, write_regions, write_rows, write_summary, write_trajectory, write_verdicts,
    SummaryRow, VerdictRow,
};
use bivirus_core::rates::{check_assumptions, check_dfr, Assumption, AssumptionReport};
use bivirus_core::sampling::{rng, PRNG_ALGORITHM};
use bivirus_core::sweep::{default_range, sweep_linear, threshold_curves, Region};
use bivirus_core::{load_edge_list, BiVirusSystem, Error, Graph, RateSpec, Result, StateD};

use crate::args::{BracketArgs, ClassifyArgs, GraphPair, ModelArgs, SimulateArgs, SpectraArgs, SweepArgs};

fn load_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    load_edge_list(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        other => other,
    })
}

fn load_pair(g: &GraphPair) -> Result<(Arc<Graph>, Arc<Graph>)> {
    let a = Arc::new(load_graph(&g.graph_a)?);
    let b = match &g.graph_b {
        Some(p) => Arc::new(load_graph(p)?.aligned_to(&a)?),
        None => a.clone(),
    };
    Ok((a, b))
}

fn build_system(g: &GraphPair, r1: &RateSpec, r2: &RateSpec) -> Result<BiVirusSystem> {
    let (a, b) = load_pair(g)?;
    BiVirusSystem::from_specs(a, b, r1, r2)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_metadata(dir: &Path, entries: &[(&str, String)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let text: String = entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    fs::write(dir.join("run.txt"), text)?;
    Ok(())
}

fn show(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or_else(|| "-".into(), |p| p.display().to_string())
}

pub fn spectra(args: &SpectraArgs) -> Result<()> {
    let mut rows = Vec::new();
    let graphs = std::iter::once(("A", &args.graph_a)).chain(args.graph_b.as_ref().map(|p| ("B", p)));
    for (name, path) in graphs {
        let g = load_graph(path)?;
        let lambda = g.spectral_radius()?;
        let (dmin, dmax) = g.degrees();
        println!("n_{name}={}", g.node_count());
        println!("edges_{name}={}", g.edge_count());
        println!("lambda_{name}={lambda:.6}");
        println!("d_min_{name}={dmin}");
        println!("d_max_{name}={dmax}");
        rows.push(vec![
            name.to_string(),
            g.node_count().to_string(),
            g.edge_count().to_string(),
            num(lambda),
            dmin.to_string(),
            dmax.to_string(),
        ]);
    }
    if let Some(dir) = &args.out_dir {
        write_rows(create(dir, "spectra.csv")?, &["graph", "n", "edges", "lambda", "d_min", "d_max"], &rows)?;
    }
    Ok(())
}

fn assumption_rows(virus: &str, report: &AssumptionReport, rows: &mut Vec<Vec<String>>) {
    for a in Assumption::ALL {
        let witnesses: Vec<_> = report.witnesses.iter().filter(|w| w.assumption == a).collect();
        let detail = witnesses
            .first()
            .map(|w| format!("indices={:?} value={:e}", w.indices, w.value))
            .unwrap_or_default();
        let status = if witnesses.is_empty() { "pass" } else { "FAIL" };
        println!("{virus} {a} {status} {detail}");
        rows.push(vec![virus.into(), a.id().into(), witnesses.is_empty().to_string(), detail]);
    }
    for note in &report.notes {
        println!("{virus} note: {note}");
    }
}

pub fn check(args: &ModelArgs) -> Result<()> {
    let sys = build_system(&args.graphs, &args.rates1, &args.rates2)?;
    let samples = args.samples as usize;
    let mut rows = Vec::new();
    for (virus, v) in [("virus1", sys.virus1()), ("virus2", sys.virus2())] {
        let report = check_assumptions(v.infection.as_ref(), v.recovery.as_ref(), samples, args.seed)?;
        assumption_rows(virus, &report, &mut rows);
        match check_dfr(v.recovery.as_ref(), samples) {
            Ok(d) => {
                let detail = format!("min_margin={:e} argmin={} node={}", d.min_margin, d.argmin, d.argmin_node);
                let status = if d.satisfied { "pass" } else { "FAIL" };
                println!("{virus} DFR {status} {detail}");
                rows.push(vec![virus.into(), "DFR".into(), d.satisfied.to_string(), detail]);
            }
            Err(e @ Error::NonLocalRecovery { .. }) => {
                println!("{virus} DFR undefined {e}");
                rows.push(vec![virus.into(), "DFR".into(), "undefined".into(), e.to_string()]);
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(dir) = &args.out_dir {
        write_rows(create(dir, "assumptions.csv")?, &["virus", "check", "passed", "detail"], &rows)?;
    }
    Ok(())
}

fn print_verdict(v: &TrichotomyVerdict) {
    println!("outcome={}", v.outcome);
    println!("lambda_g0={}", num(v.lambda_g0));
    println!("lambda_h0={}", num(v.lambda_h0));
    println!("lambda_u={}", num(v.lambda_u));
    println!("lambda_v={}", num(v.lambda_v));
    println!("avg_xstar={}", num(v.avg_x_star()));
    println!("avg_ystar={}", num(v.avg_y_star()));
}

pub fn classify_cmd(args: &ClassifyArgs) -> Result<()> {
    let sys = build_system(&args.graphs, &args.rates1, &args.rates2)?;
    let v = classify(&sys, args.eps)?;
    print_verdict(&v);
    if let Some(dir) = &args.out_dir {
        write_verdicts(create(dir, "verdict.csv")?, &[VerdictRow::from(&v)])?;
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let sys = build_system(&args.graphs, &args.rates1, &args.rates2)?;
    let starts = if args.zero {
        vec![StateD::zeros(sys.n())]
    } else {
        interior_starts(&mut rng(args.seed), sys.n(), args.starts as usize)
    };
    let results: Vec<_> = {
        use rayon::prelude::*;
        starts.par_iter().map(|s0| sys.integrate(s0, args.t_max, args.conv_tol)).collect::<Result<Vec<_>>>()?
    };
    let mut summary = Vec::new();
    for (k, traj) in results.iter().enumerate() {
        write_trajectory(create(&args.out_dir, &format!("trajectory_{k:03}.csv"))?, traj)?;
        let row = SummaryRow::of(traj);
        println!(
            "start={k} t_final={} avgX={} avgY={} terminal_reason={}",
            num(row.t_final), num(row.avg_x), num(row.avg_y), row.terminal_reason
        );
        summary.push(row);
    }
    write_summary(create(&args.out_dir, "summary.csv")?, &summary)?;
    write_metadata(
        &args.out_dir,
        &[
            ("command", "simulate".into()),
            ("graph_a", args.graphs.graph_a.display().to_string()),
            ("graph_b", show(&args.graphs.graph_b)),
            ("rates1", args.rates1.to_string()),
            ("rates2", args.rates2.to_string()),
            ("t_max", num(args.t_max)),
            ("conv_tol", num(args.conv_tol)),
            ("starts", if args.zero { "zero".into() } else { args.starts.to_string() }),
            ("seed", args.seed.to_string()),
            ("prng", PRNG_ALGORITHM.into()),
        ],
    )
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let (a, b) = load_pair(&args.graphs)?;
    let r1 = args.tau1_range.map_or_else(|| default_range(&a), Ok)?;
    let r2 = args.tau2_range.map_or_else(|| default_range(&b), Ok)?;
    let grid = sweep_linear(&a, &b, r1, r2, args.grid, args.eps)?;
    let curves = threshold_curves(&a, &b, &grid.tau2_axis)?;
    write_regions(create(&args.out_dir, "regions.csv")?, &grid)?;
    write_curves(create(&args.out_dir, "curves.csv")?, &curves)?;
    for r in Region::ALL {
        println!("{r}={}", grid.count(r));
    }
    write_metadata(
        &args.out_dir,
        &[
            ("command", "sweep".into()),
            ("graph_a", args.graphs.graph_a.display().to_string()),
            ("graph_b", show(&args.graphs.graph_b)),
            ("tau1_range", format!("{},{}", num(r1.0), num(r1.1))),
            ("tau2_range", format!("{},{}", num(r2.0), num(r2.1))),
            ("grid", format!("{}x{}", args.grid.0, args.grid.1)),
            ("eps", num(args.eps)),
            ("delta", "1".into()),
        ],
    )
}

pub fn bracket(args: &BracketArgs) -> Result<()> {
    let sys = build_system(&args.graphs, &args.rates1, &args.rates2)?;
    let v = classify(&sys, args.eps)?;
    print_verdict(&v);
    let br = bracket_coexistence(&sys, args.radius, &v)?;
    println!("lower_avgX={} lower_avgY={} residual={:e}", num(br.lower.avg_x()), num(br.lower.avg_y()), br.lower_residual);
    println!("upper_avgX={} upper_avgY={} residual={:e}", num(br.upper.avg_x()), num(br.upper.avg_y()), br.upper_residual);
    write_verdicts(create(&args.out_dir, "verdict.csv")?, &[VerdictRow::from(&v)])?;
    write_bracket(create(&args.out_dir, "bracket.csv")?, &br)?;
    Ok(())
}
