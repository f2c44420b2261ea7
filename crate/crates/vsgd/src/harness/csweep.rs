//! Sensitivity sweep over the slow-start factor C.
//!
//! For each candidate C the configured vSGD experiment runs across all seeds;
//! the sweep reports the fraction of runs that became unstable (any
//! non-finite training loss) and test-error snapshots after 1, 3, and 6
//! epochs. The critical C is the largest value for which at least 10% of the
//! runs are unstable.

use super::{run_experiment, BenchError, ExperimentConfig, RunRecord};
use std::fmt::Write as _;
use std::path::Path;

pub const INSTABILITY_THRESHOLD: f64 = 0.10;

#[derive(Debug, Clone)]
pub struct CSweepRow {
    pub c: f64,
    /// Fraction of seeds that hit a non-finite loss.
    pub instability: f64,
    /// `(epoch, mean test error over stable runs)`; NaN when none survive.
    pub test_err_at: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct CSweepTable {
    pub rows: Vec<CSweepRow>,
}

impl CSweepTable {
    /// Largest C with at least 10% unstable runs, if any.
    pub fn critical_c(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.instability >= INSTABILITY_THRESHOLD)
            .map(|r| r.c)
            .fold(None, |acc, c| Some(acc.map_or(c, |a: f64| a.max(c))))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,instability");
        if let Some(row) = self.rows.first() {
            for (epoch, _) in &row.test_err_at {
                let _ = write!(out, ",test_err_epoch{epoch}");
            }
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{}", row.c, row.instability);
            for (_, err) in &row.test_err_at {
                let _ = write!(out, ",{err}");
            }
            out.push('\n');
        }
        out
    }

    pub fn emit_csv(&self, path: impl AsRef<Path>) -> Result<(), BenchError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|source| BenchError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

fn snapshot(records: &[RunRecord], epoch: usize) -> f64 {
    let stable: Vec<f64> = records
        .iter()
        .filter(|r| !r.diverged)
        .filter_map(|r| r.stats.iter().find(|s| s.index == epoch))
        .map(|s| s.test_err)
        .collect();
    if stable.is_empty() {
        f64::NAN
    } else {
        stable.iter().sum::<f64>() / stable.len() as f64
    }
}

pub fn c_sweep(cfg: &ExperimentConfig, c_values: &[f64]) -> Result<CSweepTable, BenchError> {
    if !cfg.optimizer.is_vsgd() {
        return Err(BenchError::Usage(
            "the C sweep only applies to the vSGD variants".into(),
        ));
    }
    if c_values.is_empty() {
        return Err(BenchError::Usage("no C values given".into()));
    }
    let probes: Vec<usize> = [1usize, 3, 6]
        .into_iter()
        .filter(|&e| e <= cfg.epochs)
        .collect();
    let mut rows = Vec::with_capacity(c_values.len());
    for &c in c_values {
        let mut run_cfg = cfg.clone();
        run_cfg.hyper.c = Some(c);
        let records = run_experiment(&run_cfg)?;
        let unstable = records.iter().filter(|r| r.diverged).count();
        let instability = unstable as f64 / records.len() as f64;
        let test_err_at = probes
            .iter()
            .map(|&e| (e, snapshot(&records, e)))
            .collect();
        rows.push(CSweepRow {
            c,
            instability,
            test_err_at,
        });
    }
    Ok(CSweepTable { rows })
}
