//! Median loss and learning-rate traces on the d=1 noisy quadratic:
//! fixed rates, cooling schedules, vSGD, and the oracle over 1000 runs.

use vsgd::harness::{quad_demo, QuadDemoData, QuadDemoKind};

fn main() {
    let out = "quad_median1000.csv";
    let data = quad_demo(QuadDemoKind::Median1000, out).expect("demo is self-contained");
    let QuadDemoData::Traces { steps, algos, .. } = &data else {
        unreachable!("median1000 emits traces");
    };
    println!("median losses over 1000 runs of {steps} steps (noise floor 0.5):");
    println!(
        "{:<14} {:>12} {:>12} {:>12}",
        "algorithm", "median@100", "median@final", "final lr"
    );
    for algo in algos {
        println!(
            "{:<14} {:>12.4} {:>12.4} {:>12.3e}",
            algo.name,
            algo.median_loss[100],
            algo.median_loss[*steps],
            algo.median_lr[*steps - 1]
        );
    }
    println!("traces written to {out}");
}
