//! CSV writers and readers. Every file is comma-separated UTF-8 with LF line
//! endings and a fixed header; floats use the shortest round-trip form.

use std::io::{Read, Write};

use csv::{ReaderBuilder, StringRecord, Terminator, WriterBuilder};
use nalgebra::DVector;

use crate::analysis::{CoexistenceBracket, Outcome, TrichotomyVerdict};
use crate::dynamics::{StateD, Trajectory};
use crate::error::{Error, Result};
use crate::sweep::{CurvePoint, Region, RegionCell, RegionGrid};

pub const SUMMARY_HEADER: [&str; 4] = ["t_final", "avgX", "avgY", "terminal_reason"];
pub const VERDICT_HEADER: [&str; 7] =
    ["outcome", "lambda_g0", "lambda_h0", "lambda_u", "lambda_v", "avg_xstar", "avg_ystar"];
pub const REGION_HEADER: [&str; 7] = ["tau1", "tau2", "region", "lambda_g0", "lambda_h0", "lambda_u", "lambda_v"];
pub const CURVE_HEADER: [&str; 3] = ["tau2", "tau1_blue", "tau1_red"];
pub const BRACKET_HEADER: [&str; 4] = ["endpoint", "node", "x", "y"];

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(w)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    ReaderBuilder::new().has_headers(true).from_reader(r)
}

fn check_header(found: &StringRecord, expected: &[String]) -> Result<()> {
    if found.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {:?}, found {:?}", expected.join(","), found.iter().collect::<Vec<_>>().join(",")),
        });
    }
    Ok(())
}

fn owned(header: &[&str]) -> Vec<String> {
    header.iter().map(|s| s.to_string()).collect()
}

fn line_of(rec: &StringRecord) -> usize {
    rec.position().map_or(0, |p| p.line() as usize)
}

fn field<T: std::str::FromStr>(rec: &StringRecord, i: usize, name: &str) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| Error::Parse { line: line_of(rec), message: format!("missing column {name}") })?;
    raw.parse()
        .map_err(|_| Error::Parse { line: line_of(rec), message: format!("column {name}: cannot parse {raw:?}") })
}

fn records<R: Read>(r: R, header: &[String]) -> Result<Vec<StringRecord>> {
    let mut rdr = reader(r);
    check_header(rdr.headers()?, header)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::Parse {
                line: line_of(&rec),
                message: format!("expected {} columns, found {}", header.len(), rec.len()),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

fn trajectory_header(n: usize) -> Vec<String> {
    std::iter::once("t".to_string())
        .chain((0..n).map(|i| format!("x_{i}")))
        .chain((0..n).map(|i| format!("y_{i}")))
        .collect()
}

/// Shortest round-trip text for `v`, in exponent form outside `[1e-5, 1e16)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Writes `header` and string `rows` with the common CSV settings.
pub fn write_rows<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(header)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::DimensionMismatch { expected: header.len(), got: r.len() });
        }
        wtr.write_record(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Header `t,x_0..x_{n-1},y_0..y_{n-1}`, one row per stored state.
pub fn write_trajectory<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let n = traj.states.first().map_or(0, StateD::n);
    let mut wtr = writer(w);
    wtr.write_record(trajectory_header(n))?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let row = std::iter::once(*t).chain(s.x.iter().copied()).chain(s.y.iter().copied());
        wtr.write_record(row.map(num))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Times and states of a trajectory CSV.
pub fn read_trajectory<R: Read>(r: R) -> Result<(Vec<f64>, Vec<StateD>)> {
    let mut rdr = reader(r);
    let header = rdr.headers()?.clone();
    if header.len() < 3 || header.len() % 2 == 0 {
        return Err(Error::Parse { line: 1, message: format!("bad trajectory header with {} columns", header.len()) });
    }
    let n = (header.len() - 1) / 2;
    check_header(&header, &trajectory_header(n))?;
    let mut times = Vec::new();
    let mut states = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let vals = (0..rec.len()).map(|i| field::<f64>(&rec, i, &header[i])).collect::<Result<Vec<_>>>()?;
        if vals.len() != 2 * n + 1 {
            return Err(Error::Parse { line: line_of(&rec), message: "wrong column count".into() });
        }
        times.push(vals[0]);
        states.push(StateD::from_concat(&vals[1..]));
    }
    Ok((times, states))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub t_final: f64,
    pub avg_x: f64,
    pub avg_y: f64,
    pub terminal_reason: String,
}

impl SummaryRow {
    pub fn of(traj: &Trajectory) -> Self {
        let end = traj.final_state();
        SummaryRow {
            t_final: traj.final_time(),
            avg_x: end.avg_x(),
            avg_y: end.avg_y(),
            terminal_reason: traj.terminal_reason.label().to_string(),
        }
    }
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(SUMMARY_HEADER)?;
    for r in rows {
        wtr.write_record([num(r.t_final), num(r.avg_x), num(r.avg_y), r.terminal_reason.clone()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(r: R) -> Result<Vec<SummaryRow>> {
    records(r, &owned(&SUMMARY_HEADER))?
        .iter()
        .map(|rec| {
            Ok(SummaryRow {
                t_final: field(rec, 0, "t_final")?,
                avg_x: field(rec, 1, "avgX")?,
                avg_y: field(rec, 2, "avgY")?,
                terminal_reason: field(rec, 3, "terminal_reason")?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictRow {
    pub outcome: Outcome,
    pub lambda_g0: f64,
    pub lambda_h0: f64,
    pub lambda_u: f64,
    pub lambda_v: f64,
    pub avg_xstar: f64,
    pub avg_ystar: f64,
}

impl From<&TrichotomyVerdict> for VerdictRow {
    fn from(v: &TrichotomyVerdict) -> Self {
        VerdictRow {
            outcome: v.outcome,
            lambda_g0: v.lambda_g0,
            lambda_h0: v.lambda_h0,
            lambda_u: v.lambda_u,
            lambda_v: v.lambda_v,
            avg_xstar: v.avg_x_star(),
            avg_ystar: v.avg_y_star(),
        }
    }
}

pub fn write_verdicts<W: Write>(w: W, rows: &[VerdictRow]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(VERDICT_HEADER)?;
    for r in rows {
        wtr.write_record([
            r.outcome.to_string(),
            num(r.lambda_g0),
            num(r.lambda_h0),
            num(r.lambda_u),
            num(r.lambda_v),
            num(r.avg_xstar),
            num(r.avg_ystar),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_verdicts<R: Read>(r: R) -> Result<Vec<VerdictRow>> {
    records(r, &owned(&VERDICT_HEADER))?
        .iter()
        .map(|rec| {
            Ok(VerdictRow {
                outcome: field(rec, 0, "outcome")?,
                lambda_g0: field(rec, 1, "lambda_g0")?,
                lambda_h0: field(rec, 2, "lambda_h0")?,
                lambda_u: field(rec, 3, "lambda_u")?,
                lambda_v: field(rec, 4, "lambda_v")?,
                avg_xstar: field(rec, 5, "avg_xstar")?,
                avg_ystar: field(rec, 6, "avg_ystar")?,
            })
        })
        .collect()
}

/// One row per cell in grid order.
pub fn write_regions<W: Write>(w: W, grid: &RegionGrid) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(REGION_HEADER)?;
    for c in &grid.cells {
        wtr.write_record([
            num(c.tau1),
            num(c.tau2),
            c.region.to_string(),
            num(c.lambda_g0),
            num(c.lambda_h0),
            num(c.lambda_u),
            num(c.lambda_v),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_regions<R: Read>(r: R) -> Result<Vec<RegionCell>> {
    records(r, &owned(&REGION_HEADER))?
        .iter()
        .map(|rec| {
            Ok(RegionCell {
                tau1: field(rec, 0, "tau1")?,
                tau2: field(rec, 1, "tau2")?,
                region: field::<Region>(rec, 2, "region")?,
                lambda_g0: field(rec, 3, "lambda_g0")?,
                lambda_h0: field(rec, 4, "lambda_h0")?,
                lambda_u: field(rec, 5, "lambda_u")?,
                lambda_v: field(rec, 6, "lambda_v")?,
            })
        })
        .collect()
}

/// Undefined red thresholds are written as `NaN`.
pub fn write_curves<W: Write>(w: W, points: &[CurvePoint]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(CURVE_HEADER)?;
    for p in points {
        wtr.write_record([num(p.tau2), num(p.tau1_blue), num(p.tau1_red)])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_curves<R: Read>(r: R) -> Result<Vec<CurvePoint>> {
    records(r, &owned(&CURVE_HEADER))?
        .iter()
        .map(|rec| {
            Ok(CurvePoint {
                tau2: field(rec, 0, "tau2")?,
                tau1_blue: field(rec, 1, "tau1_blue")?,
                tau1_red: field(rec, 2, "tau1_red")?,
            })
        })
        .collect()
}

/// Rows `lower,i,x_i,y_i` then `upper,i,x_i,y_i`.
pub fn write_bracket<W: Write>(w: W, bracket: &CoexistenceBracket) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(BRACKET_HEADER)?;
    for (name, s) in [("lower", &bracket.lower), ("upper", &bracket.upper)] {
        for i in 0..s.n() {
            wtr.write_record([name.to_string(), i.to_string(), num(s.x[i]), num(s.y[i])])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// The `(lower, upper)` endpoints of a bracket CSV.
pub fn read_bracket<R: Read>(r: R) -> Result<(StateD, StateD)> {
    let mut parts: [(Vec<f64>, Vec<f64>); 2] = Default::default();
    for rec in records(r, &owned(&BRACKET_HEADER))? {
        let slot = match rec.get(0) {
            Some("lower") => 0,
            Some("upper") => 1,
            other => {
                return Err(Error::Parse { line: line_of(&rec), message: format!("unknown endpoint {other:?}") });
            }
        };
        let node: usize = field(&rec, 1, "node")?;
        if node != parts[slot].0.len() {
            return Err(Error::Parse { line: line_of(&rec), message: format!("node {node} out of order") });
        }
        parts[slot].0.push(field(&rec, 2, "x")?);
        parts[slot].1.push(field(&rec, 3, "y")?);
    }
    let [(lx, ly), (ux, uy)] = parts;
    if lx.len() != ux.len() || lx.is_empty() {
        return Err(Error::Parse { line: 0, message: "lower and upper endpoints differ in size".into() });
    }
    Ok((
        StateD::new(DVector::from_vec(lx), DVector::from_vec(ly))?,
        StateD::new(DVector::from_vec(ux), DVector::from_vec(uy))?,
    ))
}
