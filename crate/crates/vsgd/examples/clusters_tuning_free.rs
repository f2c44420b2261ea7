//! Tuning-free vSGD-l against the best SGD found by an exhaustive rate grid
//! on a synthetic Gaussian-cluster classification task.

use vsgd::harness::{
    grid_search, run_experiment, ExperimentConfig, GridSpec, OptimizerKind, Task,
};

fn main() {
    // Best SGD over the published 17-point rate menu, 2 seeds per setting.
    let sgd_cfg = ExperimentConfig::for_task(Task::Clusters, OptimizerKind::Sgd);
    let grid = GridSpec {
        eta0: GridSpec::published().eta0,
        gamma: vec![0.0],
        tau: Vec::new(),
        mu: Vec::new(),
    };
    let outcome = grid_search(&grid, &sgd_cfg).expect("synthetic task runs anywhere");
    println!(
        "best SGD of {} settings: eta0 = {:?}, mean test error {:.4}",
        outcome.rows.len(),
        outcome.best.hyper.eta0,
        outcome.best.mean_test_err
    );

    // vSGD-l with nothing tuned, averaged over ten seeds.
    let vsgd_cfg = ExperimentConfig::for_task(Task::Clusters, OptimizerKind::VsgdL);
    let records = run_experiment(&vsgd_cfg).expect("synthetic task runs anywhere");
    let stable: Vec<f64> = records
        .iter()
        .filter(|r| !r.diverged)
        .filter_map(|r| r.final_test_err())
        .collect();
    let mean = stable.iter().sum::<f64>() / stable.len() as f64;
    println!(
        "vSGD-l (no tuning):  mean test error {:.4} over {} seeds",
        mean,
        stable.len()
    );
    println!(
        "gap to tuned SGD: {:+.4} (within one percentage point: {})",
        mean - outcome.best.mean_test_err,
        mean <= outcome.best.mean_test_err + 0.01
    );
}
