//! CSV emission for traces and figure curves.

use std::io::Write;

use xpower::{IterationTrace, StepRecord};

/// Trace CSV header, in column order.
pub const TRACE_COLUMNS: [&str; 9] = [
    "full_step",
    "phase",
    "e_estimate",
    "s_estimate",
    "h_residual",
    "s_residual",
    "p2n",
    "matvecs",
    "solves",
];

/// 17 significant digits, enough to round-trip any f64.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt17(x: Option<f64>) -> String {
    x.map(float17).unwrap_or_default()
}

fn trace_row(r: &StepRecord) -> [String; 9] {
    [
        r.full_step.to_string(),
        r.phase.as_str().to_string(),
        float17(r.e_estimate),
        opt17(r.s_estimate),
        float17(r.h_residual),
        opt17(r.s_residual),
        float17(r.p2n),
        r.matvec_count.to_string(),
        r.solve_count.to_string(),
    ]
}

/// One row per record, the start record first.
pub fn write_trace_csv<W: Write>(trace: &IterationTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for r in trace.all_records() {
        w.write_record(trace_row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Column-aligned curves; shorter series leave trailing cells empty.
pub fn write_curves_csv<W: Write>(
    index_name: &str,
    curves: &[(&str, Vec<f64>)],
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![index_name.to_string()];
    header.extend(curves.iter().map(|(name, _)| name.to_string()));
    w.write_record(&header)?;
    let rows = curves.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    for i in 0..rows {
        let mut row = vec![i.to_string()];
        row.extend(
            curves
                .iter()
                .map(|(_, c)| c.get(i).map(|x| float17(*x)).unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Generic table of preformatted cells.
pub fn write_table_csv<W: Write>(header: &[&str], rows: &[Vec<String>], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
