//! Softmax regression on MNIST (the M0 benchmark) with vSGD-l.
//!
//! Needs the four standard IDX files under `$VSGD_DATA_DIR` or the directory
//! given as the first argument; prints a note and exits cleanly when the
//! dataset is not available.

use vsgd::harness::{run_experiment, BenchError, ExperimentConfig, OptimizerKind, Task};

fn main() {
    let mut cfg = ExperimentConfig::for_task(Task::M0, OptimizerKind::VsgdL);
    if let Some(dir) = std::env::args().nth(1) {
        cfg.data_dir = Some(dir.into());
    }
    cfg.seeds = (0..10).collect();
    match run_experiment(&cfg) {
        Ok(records) => {
            let stable: Vec<f64> = records
                .iter()
                .filter(|r| !r.diverged)
                .filter_map(|r| r.final_test_err())
                .collect();
            for r in &records {
                println!(
                    "seed {}: final test error {:.4} ({} ms)",
                    r.seed,
                    r.final_test_err().unwrap_or(f64::NAN),
                    r.wall_ms
                );
            }
            println!(
                "mean test error over {} seeds: {:.4}",
                stable.len(),
                stable.iter().sum::<f64>() / stable.len() as f64
            );
        }
        Err(e @ (BenchError::MissingData(_) | BenchError::Data(_))) => {
            println!("MNIST not found ({e}); place the IDX files and re-run");
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
