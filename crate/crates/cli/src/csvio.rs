//! CSV matrices: a header row `t\x, x_0, …`, then one row `t_j, u(x_0, t_j), …`
//! per time level.

use heatutm::problem::{uniform_step, SolutionField};
use heatutm::sampled::Sampled;
use std::path::Path;

const CORNER: &str = "t\\x";

/// Shortest round-trip text, in exponent form away from unit scale.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e7).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn num(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))
}

pub fn write_field_csv(path: &Path, field: &SolutionField) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
    let mut header = vec![CORNER.to_string()];
    header.extend(field.x_grid.iter().map(|&x| fmt_num(x)));
    w.write_record(&header).map_err(|e| e.to_string())?;
    for (t, row) in field.t_grid.iter().zip(&field.values) {
        let mut rec = vec![fmt_num(*t)];
        rec.extend(row.iter().map(|&v| fmt_num(v)));
        w.write_record(&rec).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

/// Reads a matrix written by [`write_field_csv`]; traces are rebuilt from the
/// end columns.
pub fn read_field_csv(path: &Path, interval: bool) -> Result<SolutionField, String> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    let x_grid = header.iter().skip(1).map(num).collect::<Result<Vec<_>, _>>()?;
    let mut t_grid = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let mut it = rec.iter();
        t_grid.push(num(it.next().ok_or("empty row")?)?);
        let row = it.map(num).collect::<Result<Vec<_>, _>>()?;
        if row.len() != x_grid.len() {
            return Err(format!("row at t = {} has {} values, expected {}", t_grid.last().unwrap(), row.len(), x_grid.len()));
        }
        values.push(row);
    }
    if x_grid.is_empty() || t_grid.is_empty() {
        return Err("empty matrix".into());
    }
    let mut field = SolutionField::zeros(x_grid, t_grid, interval);
    field.values = values;
    field.sync_traces();
    Ok(field)
}

/// Two columns `(abscissa, value)` on a uniform grid, with an optional header.
pub fn read_profile_csv(path: &Path) -> Result<Sampled, String> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != 2 {
            return Err(format!("row {} has {} columns, expected 2", i + 1, rec.len()));
        }
        match (num(&rec[0]), num(&rec[1])) {
            (Ok(x), Ok(v)) => {
                xs.push(x);
                vs.push(v);
            }
            _ if i == 0 => continue,
            (Err(e), _) | (_, Err(e)) => return Err(format!("row {}: {e}", i + 1)),
        }
    }
    let step = uniform_step(&xs).ok_or("abscissae must be uniform with at least two samples")?;
    Sampled::new(xs[0], step, vs).map_err(|e| e.to_string())
}

/// Picard diagnostics, one row per iteration.
pub fn write_trace_csv(path: &Path, trace: &heatutm::nonlinear::PicardTrace) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
    w.write_record(["iteration", "iterate_norm", "difference_norm", "ratio"]).map_err(|e| e.to_string())?;
    for (n, norm) in trace.iterate_norms.iter().enumerate() {
        let diff = n.checked_sub(1).and_then(|k| trace.difference_norms.get(k));
        let ratio = n.checked_sub(2).and_then(|k| trace.ratios.get(k));
        let cell = |v: Option<&f64>| v.map(|&v| fmt_num(v)).unwrap_or_default();
        w.write_record([n.to_string(), fmt_num(*norm), cell(diff), cell(ratio)]).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}
