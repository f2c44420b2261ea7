//! Trains two optimizers on the same task, writes both trace CSVs, and runs
//! the Welch test on their final test errors.

use vsgd::harness::{
    compare, emit_csv, final_test_errors, parse_csv, run_experiment, CompareOutcome,
    ExperimentConfig, Hyper, OptimizerKind, Task,
};

fn main() {
    let vsgd_cfg = ExperimentConfig::for_task(Task::Clusters, OptimizerKind::VsgdL);
    let mut adagrad_cfg = ExperimentConfig::for_task(Task::Clusters, OptimizerKind::AdaGrad);
    adagrad_cfg.hyper = Hyper {
        eta0: Some(0.1),
        ..Hyper::default()
    };

    let a = run_experiment(&vsgd_cfg).expect("synthetic task runs anywhere");
    let b = run_experiment(&adagrad_cfg).expect("synthetic task runs anywhere");
    emit_csv(&a, "clusters_vsgd.csv").expect("writable cwd");
    emit_csv(&b, "clusters_adagrad.csv").expect("writable cwd");

    // Round-trip through the CSVs, exactly like the `compare` subcommand.
    let errs_a = final_test_errors(&parse_csv("clusters_vsgd.csv").unwrap());
    let errs_b = final_test_errors(&parse_csv("clusters_adagrad.csv").unwrap());
    let report = compare(&errs_a, &errs_b, 0.01).expect("ten runs per side");
    println!(
        "vSGD-l mean {:.4} vs AdaGrad mean {:.4}: t = {:.3}, p = {:.4}",
        report.mean_a, report.mean_b, report.t, report.p_value
    );
    match report.outcome {
        CompareOutcome::ABetter => println!("verdict: vSGD-l better at alpha = 0.01"),
        CompareOutcome::BBetter => println!("verdict: AdaGrad better at alpha = 0.01"),
        CompareOutcome::Equivalent => println!("verdict: statistically equivalent"),
    }
}
