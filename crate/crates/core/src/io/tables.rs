use std::io::Write;

use super::{fmt_opt, fmt_sig};
use crate::engine::SeriesRow;
use crate::error::Result;
use crate::evaluation::EvalReport;

pub const DECOMPOSITION_HEADER: [&str; 7] = ["date", "target", "individual", "direct", "indirect", "total_raw", "total"];

pub const EVAL_HEADER: [&str; 18] = [
    "model", "mu", "tau", "TP", "TN", "FP", "FN", "T1", "T2", "L", "U_a", "U_r", "AUC", "precision_c", "recall_c",
    "precision_t", "recall_t", "accuracy",
];

pub fn write_decompositions<W: Write>(rows: &[SeriesRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DECOMPOSITION_HEADER)?;
    for r in rows {
        let d = &r.decomposition;
        w.write_record([
            r.date.to_string(),
            d.target.clone(),
            fmt_sig(d.individual),
            fmt_sig(d.direct),
            fmt_sig(d.indirect),
            fmt_sig(d.total_raw),
            fmt_sig(d.total),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Long format for plotting: one `(date, target, component, value)` row per
/// decomposition component.
pub fn write_long_report<W: Write>(rows: &[SeriesRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["date", "target", "component", "value"])?;
    for r in rows {
        let d = &r.decomposition;
        let date = r.date.to_string();
        for (name, v) in [("individual", d.individual), ("direct", d.direct), ("indirect", d.indirect), ("total", d.total)] {
            w.write_record([date.as_str(), d.target.as_str(), name, fmt_sig(v).as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_eval_reports<W: Write>(reports: &[EvalReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EVAL_HEADER)?;
    for rep in reports {
        for row in &rep.rows {
            let m = &row.metrics;
            w.write_record([
                rep.model.clone(),
                fmt_sig(row.mu),
                fmt_sig(row.tau),
                row.matrix.tp.to_string(),
                row.matrix.tn.to_string(),
                row.matrix.fp.to_string(),
                row.matrix.fn_.to_string(),
                fmt_opt(row.t1),
                fmt_opt(row.t2),
                fmt_sig(row.loss),
                fmt_sig(row.absolute_usefulness),
                fmt_sig(row.relative_usefulness),
                fmt_sig(rep.auc),
                fmt_opt(m.precision_crisis),
                fmt_opt(m.recall_crisis),
                fmt_opt(m.precision_tranquil),
                fmt_opt(m.recall_tranquil),
                fmt_sig(m.accuracy),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
