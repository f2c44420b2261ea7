//! The non-stationary quadratic: the optimum jumps every 300 steps and the
//! adaptive rate has to grow back. Prints the per-shift recovery factors of
//! vSGD's learning rate and the time-averaged losses of the whole matrix.

use vsgd::harness::{quad_demo, QuadDemoData, QuadDemoKind};

fn main() {
    let out = "quad_nonstat.csv";
    let data = quad_demo(QuadDemoKind::Nonstat, out).expect("demo is self-contained");
    let QuadDemoData::Traces {
        steps,
        shift_period: Some(period),
        algos,
    } = &data
    else {
        unreachable!("nonstat emits traces with a shift period");
    };

    println!("time-averaged expected loss over {steps} steps:");
    for algo in algos {
        println!("  {:<14} {:>10.4}", algo.name, algo.time_avg_loss);
    }

    let vsgd = algos.iter().find(|a| a.name == "vsgd").unwrap();
    println!("\nvSGD learning-rate recovery after each shift (median trace):");
    let period = *period as usize;
    for (k, t0) in (period..*steps).step_by(period).enumerate() {
        let before = vsgd.median_lr[t0 - 1];
        let after = vsgd.median_lr[t0..(t0 + 50).min(*steps)]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "  shift {:>2} at t={t0}: lr {before:.2e} -> {after:.2e}  ({:.0}x within 50 steps)",
            k + 1,
            after / before
        );
    }
    println!("\ntraces written to {out}");
}
