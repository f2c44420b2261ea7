//! A tanh MLP on jittered XOR data, trained per-sample with vSGD-l.
//! XOR is not linearly separable, so the hidden layer has to do real work.

use vsgd::harness::{emit_csv, run_experiment, ExperimentConfig, OptimizerKind, Task};

fn main() {
    let mut cfg = ExperimentConfig::for_task(Task::Xor, OptimizerKind::VsgdL);
    cfg.seeds = (0..5).collect();
    let records = run_experiment(&cfg).expect("synthetic task runs anywhere");
    println!("XOR MLP [2, 10, 2], vSGD-l, {} epochs:", cfg.epochs);
    for r in &records {
        if r.diverged {
            println!("  seed {}: diverged", r.seed);
            continue;
        }
        let first = &r.stats[0];
        let last = r.stats.last().unwrap();
        println!(
            "  seed {}: train_err {:.3} -> {:.3}, test_err {:.3} -> {:.3}, lr range [{:.1e}, {:.1e}]",
            r.seed, first.train_err, last.train_err, first.test_err, last.test_err,
            last.lr_min, last.lr_max
        );
    }
    emit_csv(&records, "xor_vsgd.csv").expect("writable cwd");
    println!("traces written to xor_vsgd.csv");
}
