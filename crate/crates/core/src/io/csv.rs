//! CSV output of run logs and event traces.
//!
//! Reals use Rust's shortest round-trip form (`{:?}`: `0.5`, `1.0`, `1e-300`);
//! metrics that are not defined for a snapshot are empty cells.

use std::fmt::Write as _;
use std::path::Path;

use crate::diagnostics::{RunLog, RunRecord};
use crate::dist::TraceEvent;
use crate::error::{Error, Result};

pub const RUN_HEADER: &str =
    "epoch,server_iter,virtual_time,epochs_equiv,duality_gap,suboptimality,potential_C,max_delay";

pub const TRACE_HEADER: &str = "event_type,virtual_time,worker_id,server_s,server_t,delay";

fn opt<T: std::fmt::Debug>(v: Option<T>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn render_run_log(log: &RunLog) -> String {
    let mut out = String::with_capacity(64 * (log.records.len() + 1));
    out.push_str(RUN_HEADER);
    out.push('\n');
    for r in &log.records {
        writeln!(
            out,
            "{},{},{:?},{:?},{},{},{},{}",
            r.epoch,
            r.server_iter,
            r.virtual_time,
            r.epochs_equiv,
            opt(r.duality_gap),
            opt(r.suboptimality),
            opt(r.potential_c),
            r.max_delay
        )
        .unwrap();
    }
    out
}

pub fn write_run_log(path: &Path, log: &RunLog) -> Result<()> {
    std::fs::write(path, render_run_log(log)).map_err(|e| Error::io(path, e))
}

pub fn render_trace(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for e in events {
        writeln!(
            out,
            "{},{:?},{},{},{},{}",
            e.kind.as_str(),
            e.time,
            opt(e.worker),
            e.stamp.epoch,
            e.stamp.iter,
            opt(e.delay)
        )
        .unwrap();
    }
    out
}

pub fn write_trace(path: &Path, events: &[TraceEvent]) -> Result<()> {
    std::fs::write(path, render_trace(events)).map_err(|e| Error::io(path, e))
}

/// Reads a run log written by [`render_run_log`]. Relation residuals and
/// boundary flags are not stored, so boundaries are inferred from
/// `server_iter == 0`.
pub fn parse_run_log(text: &str) -> Result<RunLog> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == RUN_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing run log header".into(),
            })
        }
    }
    let mut log = RunLog::default();
    for (k, raw) in lines {
        let line = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split(',').collect();
        if cells.len() != 8 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 8 fields, found {}", cells.len()),
            });
        }
        let err = |what: &str| Error::Parse {
            line,
            msg: format!("invalid {what}"),
        };
        let real = |s: &str, what: &str| s.parse::<f64>().map_err(|_| err(what));
        let opt_real = |s: &str, what: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                real(s, what).map(Some)
            }
        };
        let server_iter: usize = cells[1].parse().map_err(|_| err("server_iter"))?;
        log.push(RunRecord {
            epoch: cells[0].parse().map_err(|_| err("epoch"))?,
            server_iter,
            virtual_time: real(cells[2], "virtual_time")?,
            epochs_equiv: real(cells[3], "epochs_equiv")?,
            duality_gap: opt_real(cells[4], "duality_gap")?,
            suboptimality: opt_real(cells[5], "suboptimality")?,
            potential_c: opt_real(cells[6], "potential_C")?,
            max_delay: cells[7].parse().map_err(|_| err("max_delay"))?,
            relation_residual: None,
            epoch_boundary: server_iter == 0,
        });
    }
    Ok(log)
}
