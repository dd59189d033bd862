use std::io::Write;

use super::{Optimum, Trace};
use crate::error::Result;

/// Matrix CSV: header row holds the column axis, first column the row axis.
/// Floats use shortest round-trip formatting so files are bit-reproducible.
pub fn write_matrix_csv<W: Write>(writer: W, rows: &[f64], cols: &[f64], m: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["polarization\\g_hz".to_string()];
    header.extend(cols.iter().map(f64::to_string));
    w.write_record(&header)?;
    for (r, row) in rows.iter().zip(m) {
        let mut rec = vec![r.to_string()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format time series, one block per trace.
pub fn write_traces_csv<W: Write>(writer: W, traces: &[Trace]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "concentration_percent",
        "g_hz",
        "t_seconds",
        "concurrence",
        "j_left_hz2",
        "j_right_hz2",
    ])?;
    for tr in traces {
        for k in 0..tr.times.len() {
            w.write_record([
                tr.optimum.concentration_percent.to_string(),
                tr.params.g.to_string(),
                tr.times[k].to_string(),
                tr.concurrence[k].to_string(),
                tr.j_left[k].to_string(),
                tr.j_right[k].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_optima_csv<W: Write>(writer: W, optima: &[Optimum]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "concentration_percent",
        "gamma_hz",
        "objective",
        "g_star_hz",
        "value",
        "warning",
    ])?;
    for o in optima {
        let objective = serde_json::to_value(o.objective)?;
        let warning = match o.warning {
            Some(wn) => serde_json::to_value(wn)?.as_str().unwrap_or_default().to_string(),
            None => String::new(),
        };
        w.write_record([
            o.concentration_percent.to_string(),
            o.gamma_hz.to_string(),
            objective.as_str().unwrap_or_default().to_string(),
            o.g_star_hz.to_string(),
            o.value.to_string(),
            warning,
        ])?;
    }
    w.flush()?;
    Ok(())
}
