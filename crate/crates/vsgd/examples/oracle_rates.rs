//! Greedy-optimal learning rates on the noisy quadratic, checked against a
//! brute-force scan of the closed-form expected next-step loss.

use vsgd::{NoisyQuadratic, SeededRng};

fn main() {
    let world = NoisyQuadratic::new(
        vec![2.0, 0.5, 1.0],
        vec![0.0, 1.0, -2.0],
        vec![1.0, 0.1, 0.0],
    )
    .unwrap();
    let theta = vec![3.0, 1.5, -1.0];

    println!("per-dimension oracle rates (rate = dev^2 / (dev^2 + sigma^2) / h):");
    let local = world.oracle_local_rate(&theta);
    for (i, rate) in local.iter().enumerate() {
        println!(
            "  dim {i}: h = {:>4}, dev = {:>4}, sigma = {:>4}  ->  eta* = {rate:.6}",
            world.curvatures()[i],
            theta[i] - world.optimum()[i],
            world.noise()[i],
        );
    }

    let global = world.oracle_global_rate(&theta);
    println!("single global oracle rate: {global:.6}");

    // Brute-force check: scan eta over [0, 1] and compare the minimizer of
    // the closed-form expected next-step loss with the formula value.
    let mut best = (f64::INFINITY, 0.0);
    let steps = 1_000_000;
    for k in 0..=steps {
        let eta = k as f64 / steps as f64;
        let loss = world.expected_next_loss(&theta, eta);
        if loss < best.0 {
            best = (loss, eta);
        }
    }
    println!(
        "grid argmin over 1e6 points: eta = {:.6} (formula differs by {:.2e})",
        best.1,
        (best.1 - global).abs()
    );

    // The greedy rate never increases the expected loss.
    let mut rng = SeededRng::new(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let h = 10f64.powf(rng.uniform_in(-1.0, 1.0));
        let sigma = rng.uniform_in(0.0, 2.0);
        let dev = rng.uniform_in(-4.0, 4.0);
        let w = NoisyQuadratic::new(vec![h], vec![0.0], vec![sigma]).unwrap();
        let eta = w.oracle_local_rate(&[dev])[0];
        worst = worst.max(w.expected_next_loss(&[dev], eta) - w.expected_loss(&[dev]));
    }
    println!("max E[J'] - J over 1e5 random states: {worst:.3e} (<= 0 up to rounding)");
}
