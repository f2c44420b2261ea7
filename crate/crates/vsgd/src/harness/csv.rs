//! CSV trace emission and parse-back.
//!
//! One row per evaluated epoch (or step block, for the quadratic tasks):
//! `run_id,seed,epoch_or_step,train_loss,train_err,test_err,lr_min,lr_max,wall_ms`.
//! UTF-8, '.' decimal separator, '\n' line endings. Floats print in Rust's
//! shortest round-trip form, so a parse-back reproduces values exactly.

use super::{BenchError, GridOutcome, RunRecord};
use std::fmt::Write as _;
use std::path::Path;

pub const RECORD_HEADER: &str =
    "run_id,seed,epoch_or_step,train_loss,train_err,test_err,lr_min,lr_max,wall_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub run_id: usize,
    pub seed: u64,
    pub epoch_or_step: usize,
    pub train_loss: f64,
    pub train_err: f64,
    pub test_err: f64,
    pub lr_min: f64,
    pub lr_max: f64,
    pub wall_ms: u64,
}

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::new();
    out.push_str(RECORD_HEADER);
    out.push('\n');
    for record in records {
        for stat in &record.stats {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                record.run_id,
                record.seed,
                stat.index,
                stat.train_loss,
                stat.train_err,
                stat.test_err,
                stat.lr_min,
                stat.lr_max,
                stat.wall_ms
            );
        }
    }
    out
}

pub fn emit_csv(records: &[RunRecord], path: impl AsRef<Path>) -> Result<(), BenchError> {
    let path = path.as_ref();
    std::fs::write(path, records_to_csv(records)).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>, BenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv_str(&text)
}

pub fn parse_csv_str(text: &str) -> Result<Vec<CsvRow>, BenchError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RECORD_HEADER => {}
        other => {
            return Err(BenchError::Usage(format!(
                "not a run-record CSV (header {other:?})"
            )))
        }
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(BenchError::Usage(format!(
                "CSV line {}: expected 9 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let bad = |what: &str| BenchError::Usage(format!("CSV line {}: bad {what}", lineno + 2));
        rows.push(CsvRow {
            run_id: fields[0].parse().map_err(|_| bad("run_id"))?,
            seed: fields[1].parse().map_err(|_| bad("seed"))?,
            epoch_or_step: fields[2].parse().map_err(|_| bad("epoch_or_step"))?,
            train_loss: fields[3].parse().map_err(|_| bad("train_loss"))?,
            train_err: fields[4].parse().map_err(|_| bad("train_err"))?,
            test_err: fields[5].parse().map_err(|_| bad("test_err"))?,
            lr_min: fields[6].parse().map_err(|_| bad("lr_min"))?,
            lr_max: fields[7].parse().map_err(|_| bad("lr_max"))?,
            wall_ms: fields[8].parse().map_err(|_| bad("wall_ms"))?,
        });
    }
    Ok(rows)
}

/// Final test error per run: the row with the largest `epoch_or_step` of
/// each `run_id`, in run order.
pub fn final_test_errors(rows: &[CsvRow]) -> Vec<f64> {
    let mut finals: Vec<(usize, usize, f64)> = Vec::new();
    for row in rows {
        match finals.iter_mut().find(|(id, _, _)| *id == row.run_id) {
            Some(entry) if row.epoch_or_step >= entry.1 => {
                entry.1 = row.epoch_or_step;
                entry.2 = row.test_err;
            }
            Some(_) => {}
            None => finals.push((row.run_id, row.epoch_or_step, row.test_err)),
        }
    }
    finals.into_iter().map(|(_, _, e)| e).collect()
}

pub fn grid_to_csv(outcome: &GridOutcome) -> String {
    let mut out = String::from("setting,eta0,gamma,tau,mu,mean_train_err,mean_test_err,diverged\n");
    let fmt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for (i, row) in outcome.rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            i,
            fmt(row.hyper.eta0),
            fmt(row.hyper.gamma),
            fmt(row.hyper.tau),
            fmt(row.hyper.mu),
            row.mean_train_err,
            row.mean_test_err,
            row.diverged
        );
    }
    out
}

pub fn emit_grid_csv(outcome: &GridOutcome, path: impl AsRef<Path>) -> Result<(), BenchError> {
    let path = path.as_ref();
    std::fs::write(path, grid_to_csv(outcome)).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}
